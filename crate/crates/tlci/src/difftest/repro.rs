//! The counterexamples to the naive automaton decoration and to the
//! proposed rewriting `C^k_(a,a+1) P <-> G_(0,1) F_(0,a) C^k_(0,1) P`.

use std::sync::Arc;

use crate::automata::counting_nfa;
use crate::formula::*;
use crate::interval::Interval;
use crate::semantics::eval;
use crate::word::{parse_timed_word, TimedWord};

pub const NAIVE_WORD: &str = "0 -\n0.5 P\n1.5 P\n2.5 P\n3.5 P\n4.5 -\n";
pub const UNIT_GAP_WORD: &str = "0 -\n0.6 -\n0.7 -\n0.8 P\n0.9 P\n1.6 -\n1.7 P\n2.1 P\n4 -\n";
/// One event at `tau_1 + 1`, two `P` in `tau_1 + (1,2)`, none in `tau_1 + (2,3)`.
pub const SPARSE_WORD: &str = "0 -\n1 -\n1.3 P\n1.7 P\n4 -\n";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReproLine {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct ReproReport {
    pub lines: Vec<ReproLine>,
}

impl ReproReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn render(&self) -> String {
        self.lines
            .iter()
            .map(|l| format!("{} {}: {}\n", if l.passed { "PASS" } else { "FAIL" }, l.name, l.detail))
            .collect()
    }
}

/// `G_(0,1) F_(0,a) C^k_(0,1) P`.
pub fn unit_rewriting_rhs(k: usize, a: usize) -> F {
    globally(
        Interval::open(0, 1),
        eventually(Interval::open(0, a as i64), count(k, Interval::open(0, 1), atom("P"))),
    )
}

pub fn unit_rewriting_lhs(k: usize, a: usize) -> F {
    count(k, Interval::open(a as i64, a as i64 + 1), atom("P"))
}

/// Swaps open and closed brackets of every bounded interval.
pub fn flip_openness(f: &F) -> F {
    rebuild::<()>(f, |node, kids| {
        let g = with_children(node, kids);
        let flipped = match g.interval() {
            Some(i) if i.hi().is_some() => {
                Interval::mk(i.lo(), !i.lo_closed(), i.hi(), !i.hi_closed())
            }
            _ => return Ok(g),
        };
        Ok(Arc::new(match &*g {
            Formula::Until(_, x, y) => Formula::Until(flipped, x.clone(), y.clone()),
            Formula::Next(_, x) => Formula::Next(flipped, x.clone()),
            Formula::Eventually(_, x) => Formula::Eventually(flipped, x.clone()),
            Formula::Globally(_, x) => Formula::Globally(flipped, x.clone()),
            Formula::WeakEventually(_, x) => Formula::WeakEventually(flipped, x.clone()),
            Formula::Once(_, x) => Formula::Once(flipped, x.clone()),
            Formula::Count(k, _, x) => Formula::Count(*k, flipped, x.clone()),
            Formula::Pnueli(k, _, xs) => Formula::Pnueli(*k, flipped, xs.clone()),
            Formula::AutoMod(a, _, xs) => Formula::AutoMod(a.clone(), flipped, xs.clone()),
            other => other.clone(),
        }))
    })
    .expect("infallible")
}

fn word(text: &str) -> TimedWord {
    parse_timed_word(text).expect("bundled word")
}

/// The three checks; `flip` evaluates interval-flipped formulas instead
/// (sensitivity check).
pub fn repro_counterexamples_with(flip: bool) -> ReproReport {
    let prep = |f: F| if flip { flip_openness(&f) } else { f };
    let at1 = |w: &TimedWord, f: &F| eval(w, f, 1).expect("nonempty");
    let mut lines = Vec::new();

    let w = word(NAIVE_WORD);
    let naive = prep(automod(Arc::new(counting_nfa(3)), Interval::open(2, 3), vec![atom("P"), tt()]));
    let c3 = prep(count(3, Interval::open(2, 3), atom("P")));
    let (x, y) = (at1(&w, &naive), at1(&w, &c3));
    lines.push(ReproLine {
        name: "naive-automaton",
        passed: x && !y,
        detail: format!("A{{C3}}[(2,3)](P, true)={x} C{{3}}[(2,3)] P={y} (want true/false)"),
    });

    let w = word(UNIT_GAP_WORD);
    let (rhs, lhs) = (prep(unit_rewriting_rhs(2, 1)), prep(unit_rewriting_lhs(2, 1)));
    let (x, y) = (at1(&w, &rhs), at1(&w, &lhs));
    lines.push(ReproLine {
        name: "unit-rewriting k=2 a=1",
        passed: x && !y,
        detail: format!("rhs={x} lhs={y} (want true/false)"),
    });

    let w = word(SPARSE_WORD);
    let (rhs, lhs) = (prep(unit_rewriting_rhs(2, 2)), prep(unit_rewriting_lhs(2, 2)));
    let (x, y) = (at1(&w, &rhs), at1(&w, &lhs));
    lines.push(ReproLine {
        name: "unit-rewriting k=2 a=2",
        passed: x != y,
        detail: format!("rhs={x} lhs={y} (want different; G over (0,1) is vacuous here)"),
    });
    ReproReport { lines }
}

pub fn repro_counterexamples() -> ReproReport {
    repro_counterexamples_with(false)
}
