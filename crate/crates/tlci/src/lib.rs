pub mod error;
pub mod interval;
pub mod automata;
pub mod formula;
pub mod parser;
pub mod word;
pub mod randform;
pub mod semantics;
pub mod rewrite;
pub mod difftest;
pub mod cli;
