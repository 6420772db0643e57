//! Evaluation, witness segments and anchor conditions.

mod conditions;
mod eval;
mod witness;

pub use conditions::*;
pub use eval::*;
pub use witness::*;
