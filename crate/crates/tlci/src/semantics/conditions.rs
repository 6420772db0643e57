//! Anchor conditions C1 and C2: certain first-in-window positions need an
//! event exactly one time unit earlier.

use std::fmt;

use crate::formula::F;
use crate::interval::{fmt_rat, rat, Rat};
use crate::semantics::Evaluator;
use crate::word::TimedWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CondKind {
    C1,
    C2,
}

/// Where the "unless d(1, j) < 1" exemption is measured from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exemption {
    /// `tau_j - tau_1 < 1`.
    FromFirst,
    /// `tau_j < 1`.
    FromZero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondViolation {
    pub kind: CondKind,
    /// 1-based position.
    pub j: usize,
    pub need_anchor: Rat,
    /// Index into the C2 family, or of the C1 spec.
    pub member: usize,
}

impl fmt::Display for CondViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            CondKind::C1 => "C1",
            CondKind::C2 => "C2",
        };
        write!(f, "{k} j={} need_anchor={}", self.j, fmt_rat(&self.need_anchor))
    }
}

fn exempt(w: &TimedWord, j: usize, ex: Exemption) -> bool {
    let base = match ex {
        Exemption::FromFirst => w.time(1),
        Exemption::FromZero => rat(0),
    };
    w.time(j) - base < rat(1)
}

/// Condition C1 for `psi` and `k`, given the truth values of `psi`.
fn c1_from_values(w: &TimedWord, a: &[bool], k: usize, member: usize, ex: Exemption) -> Vec<CondViolation> {
    let one = rat(1);
    let mut out = Vec::new();
    for j in 1..=w.len() {
        if !a[j - 1] {
            continue;
        }
        let tj = w.time(j);
        let strict = (1..j).filter(|&q| a[q - 1] && tj - w.time(q) > rat(0) && tj - w.time(q) < one).count();
        let weak = (1..=j).filter(|&q| a[q - 1] && tj - w.time(q) < one).count();
        if strict < k && weak >= k && !exempt(w, j, ex) && !w.has_time(tj - one) {
            out.push(CondViolation { kind: CondKind::C1, j, need_anchor: tj - one, member });
        }
    }
    out
}

pub fn check_c1(w: &TimedWord, psi: &F, k: usize) -> Vec<CondViolation> {
    check_c1_with(w, psi, k, Exemption::FromFirst)
}

pub fn check_c1_with(w: &TimedWord, psi: &F, k: usize, ex: Exemption) -> Vec<CondViolation> {
    let mut ev = Evaluator::new(w);
    let a = ev.values(psi).to_vec();
    c1_from_values(w, &a, k, 0, ex)
}

pub fn check_c2(w: &TimedWord, family: &[F]) -> Vec<CondViolation> {
    check_c2_with(w, family, Exemption::FromFirst)
}

pub fn check_c2_with(w: &TimedWord, family: &[F], ex: Exemption) -> Vec<CondViolation> {
    let mut ev = Evaluator::new(w);
    let one = rat(1);
    let mut out = Vec::new();
    for (m, f) in family.iter().enumerate() {
        let a = ev.values(f).to_vec();
        for j in 1..=w.len() {
            if !a[j - 1] {
                continue;
            }
            let tj = w.time(j);
            let first = !(1..j).any(|q| a[q - 1] && tj - w.time(q) < one);
            if first && !exempt(w, j, ex) && !w.has_time(tj - one) {
                out.push(CondViolation { kind: CondKind::C2, j, need_anchor: tj - one, member: m });
            }
        }
    }
    out
}

/// The side conditions a rewrite's output relies on.
#[derive(Clone, Debug, Default)]
pub struct ConditionSpec {
    /// `(psi, k)` pairs for C1.
    pub c1: Vec<(F, usize)>,
    /// Formulas for C2.
    pub c2: Vec<F>,
}

impl ConditionSpec {
    pub fn is_empty(&self) -> bool {
        self.c1.is_empty() && self.c2.is_empty()
    }

    pub fn extend(&mut self, other: &ConditionSpec) {
        self.c1.extend(other.c1.iter().cloned());
        self.c2.extend(other.c2.iter().cloned());
    }

    pub fn check(&self, w: &TimedWord) -> Vec<CondViolation> {
        self.check_with(w, Exemption::FromFirst)
    }

    pub fn check_with(&self, w: &TimedWord, ex: Exemption) -> Vec<CondViolation> {
        let mut ev = Evaluator::new(w);
        let mut out = Vec::new();
        for (n, (psi, k)) in self.c1.iter().enumerate() {
            let a = ev.values(psi).to_vec();
            out.extend(c1_from_values(w, &a, *k, n, ex));
        }
        drop(ev);
        out.extend(check_c2_with(w, &self.c2, ex));
        out
    }
}
