//! Source-to-source translations of counting, Pnueli and witness modalities.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::formula::{size_stats, truncated, SizeStats, F};
use crate::semantics::ConditionSpec;

mod counting;
mod pnueli;
mod unilateral;

pub use counting::*;
pub use pnueli::*;
pub use unilateral::*;

/// Default cap on output size (distinct nodes).
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PassId {
    ModK,
    Rational,
    Pnueli2,
    Witness,
    ElimF,
    ElimC,
    Unilateral,
    ElimUnbounded,
}

impl PassId {
    pub const ALL: [PassId; 8] = [
        PassId::ModK,
        PassId::Rational,
        PassId::Pnueli2,
        PassId::Witness,
        PassId::ElimF,
        PassId::ElimC,
        PassId::Unilateral,
        PassId::ElimUnbounded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PassId::ModK => "mod-k",
            PassId::Rational => "rational",
            PassId::Pnueli2 => "pnueli2",
            PassId::Witness => "witness",
            PassId::ElimF => "elim-F",
            PassId::ElimC => "elim-C",
            PassId::Unilateral => "unilateral",
            PassId::ElimUnbounded => "elim-unbounded",
        }
    }

    /// Outputs are only equivalent on words satisfying C1/C2.
    pub fn is_conditional(self) -> bool {
        matches!(self, PassId::ElimF | PassId::ElimC | PassId::Unilateral)
    }
}

impl fmt::Display for PassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PassId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PassId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown pass '{s}'")))
    }
}

#[derive(Clone, Debug)]
pub enum SideCondition {
    C1 { psi: F, k: usize },
    C2 { family: Vec<F> },
}

impl fmt::Display for SideCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SideCondition::C1 { psi, k } => write!(f, "requires C1(psi={}, k={k})", truncated(psi, 200)),
            SideCondition::C2 { family } => {
                write!(f, "requires C2(family of {} formulas", family.len())?;
                for g in family {
                    write!(f, "; {}", truncated(g, 200))?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Collects the checkable form of side conditions.
pub fn condition_spec(conds: &[SideCondition]) -> ConditionSpec {
    let mut spec = ConditionSpec::default();
    for c in conds {
        match c {
            SideCondition::C1 { psi, k } => spec.c1.push((psi.clone(), *k)),
            SideCondition::C2 { family } => spec.c2.extend(family.iter().cloned()),
        }
    }
    spec
}

#[derive(Clone, Debug)]
pub struct PassReport {
    pub pass: PassId,
    /// Input as text (the witness pass has no input formula).
    pub input: String,
    pub output: F,
    pub side_conditions: Vec<SideCondition>,
    pub notes: Vec<String>,
    pub size_before: Option<SizeStats>,
    pub size_after: SizeStats,
}

impl PassReport {
    pub fn new(pass: PassId, input: Option<&F>, input_text: String, output: F) -> Self {
        let size_after = size_stats(&output);
        PassReport {
            pass,
            input: input_text,
            output,
            side_conditions: Vec::new(),
            notes: Vec::new(),
            size_before: input.map(size_stats),
            size_after,
        }
    }

    pub fn spec(&self) -> ConditionSpec {
        condition_spec(&self.side_conditions)
    }
}

/// Fails when the output exceeds `budget` distinct nodes.
pub fn check_budget(f: &F, budget: usize) -> Result<()> {
    let s = size_stats(f);
    if s.dag_nodes > budget {
        return Err(Error::Rewrite(format!("output has {} nodes, budget {budget}", s.dag_nodes)));
    }
    Ok(())
}
