//! Audits of the marker-count bounds used to cut the `phi_out` disjunctions.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{Rng, RngCore};

use super::{text_digest, trial_rng, word_digest, WitnessChoice};
use crate::error::{Error, Result};
use crate::formula::atom;
use crate::interval::{rat, Rat};
use crate::rewrite::{block_marker, gap_block};
use crate::semantics::{eval_all, gap_markers, pq_witness};
use crate::word::{generate_word, GenConfig, TimedWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LemmaId {
    /// Gap markers of the P,Q witness in `[0, a]`: at most `2a + 2`.
    L1,
    /// Gap markers of a witness automaton in `[0, a]`: at most `(m+1)(a+1)`.
    L2,
    /// Gap blocks of `k + 1` occurrences in `[0, a)`: at most `k a`.
    L4,
    /// Block markers in `[0, a]`: at most `k (a+1) + 1`.
    L5,
}

impl LemmaId {
    pub const ALL: [LemmaId; 4] = [LemmaId::L1, LemmaId::L2, LemmaId::L4, LemmaId::L5];
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmaId::L1 => "L1",
            LemmaId::L2 => "L2",
            LemmaId::L4 => "L4",
            LemmaId::L5 => "L5",
        })
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|l| l.to_string() == s)
            .ok_or_else(|| Error::Usage(format!("unknown lemma '{s}' (L1, L2, L4, L5)")))
    }
}

#[derive(Clone, Debug)]
pub struct BoundParams {
    pub a: usize,
    pub k: usize,
    pub witness: WitnessChoice,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams { a: 1, k: 2, witness: WitnessChoice::Pq }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundViolation {
    pub seed: u64,
    pub digest: String,
    pub position: usize,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub lemma: LemmaId,
    pub params: String,
    pub samples: usize,
    pub words: usize,
    pub max_observed: usize,
    pub bound: usize,
    pub violations: Vec<BoundViolation>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.max_observed <= self.bound
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "bounds lemma={} {} samples={} words={} max_observed={} bound={} violations={}",
            self.lemma,
            self.params,
            self.samples,
            self.words,
            self.max_observed,
            self.bound,
            self.violations.len()
        );
        for v in &self.violations {
            let _ = writeln!(s, "violation seed={} word={} pos={} count={}", v.seed, v.digest, v.position, v.count);
        }
        let _ = writeln!(s, "max_observed {} <= {} {}", self.max_observed, self.bound, if self.passed() { "PASS" } else { "FAIL" });
        format!("{s}digest {}\n", text_digest(&s))
    }
}

/// Positions (1-based) counted by the lemma, and the bound.
fn markers(lemma: LemmaId, p: &BoundParams, w: &TimedWord) -> Vec<usize> {
    let psi = atom("P");
    let holding = |v: Vec<bool>| (1..=v.len()).filter(|&j| v[j - 1]).collect();
    match lemma {
        LemmaId::L1 => gap_markers(w, &pq_witness(atom("P"), atom("Q"))),
        LemmaId::L2 => gap_markers(w, &p.witness.build()),
        LemmaId::L4 => holding(eval_all(w, &gap_block(&psi, p.k))),
        LemmaId::L5 => holding(eval_all(w, &block_marker(&psi, p.k))),
    }
}

pub fn lemma_bound(lemma: LemmaId, p: &BoundParams) -> usize {
    match lemma {
        LemmaId::L1 => 2 * p.a + 2,
        LemmaId::L2 => (p.witness.build().m() + 1) * (p.a + 1),
        LemmaId::L4 => p.k * p.a,
        LemmaId::L5 => p.k * (p.a + 1) + 1,
    }
}

/// Markers `j > i` with `d(i, j)` in `[0, a]` (`[0, a)` for L4), per position.
pub fn window_counts(lemma: LemmaId, p: &BoundParams, w: &TimedWord) -> Vec<usize> {
    let ms = markers(lemma, p, w);
    let a = rat(p.a as i64);
    let inside = |d: Rat| if lemma == LemmaId::L4 { d < a } else { d <= a };
    (1..=w.len()).map(|i| ms.iter().filter(|&&j| j > i && inside(w.time(j) - w.time(i))).count()).collect()
}

pub fn default_bound_config(lemma: LemmaId, p: &BoundParams) -> GenConfig {
    let props: &[&str] = match (lemma, p.witness) {
        (LemmaId::L1, _) | (LemmaId::L2, WitnessChoice::Pq) => &["P", "Q"],
        _ => &["P"],
    };
    let window = p.a as i64 + 3;
    GenConfig::new(props, 30, window, window + 1).with_density(0.6)
}

/// Samples words until `samples` (word, position) pairs are covered.
pub fn bound_trial(lemma: LemmaId, p: &BoundParams, cfg: &GenConfig, samples: usize, seed: u64) -> BoundReport {
    let mut r = BoundReport {
        lemma,
        params: match lemma {
            LemmaId::L1 => format!("a={}", p.a),
            LemmaId::L2 => format!("W={} a={}", p.witness.as_str(), p.a),
            _ => format!("k={} a={}", p.k, p.a),
        },
        samples: 0,
        words: 0,
        max_observed: 0,
        bound: lemma_bound(lemma, p),
        violations: Vec::new(),
    };
    while r.samples < samples {
        let mut rng = trial_rng(seed, r.words);
        let word_seed = rng.next_u64();
        let mut c = cfg.clone();
        c.event_count = rng.gen_range(1..=cfg.event_count.max(1));
        let w = generate_word(&c, word_seed);
        for (i, n) in window_counts(lemma, p, &w).into_iter().enumerate() {
            r.max_observed = r.max_observed.max(n);
            if n > r.bound {
                r.violations.push(BoundViolation { seed: word_seed, digest: word_digest(&w), position: i + 1, count: n });
            }
        }
        r.samples += w.len();
        r.words += 1;
    }
    r
}
