//! Differential testing of rewrite passes against the evaluator, lemma
//! bound audits and the golden counterexamples.
//!
//! Trial `t` of a campaign with seed `s` draws its parameters from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `t`, so a trial does not
//! depend on the others and serial and parallel runs agree.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::formula::*;
use crate::interval::{rat, Interval, Rat};
use crate::rewrite::*;
use crate::semantics::*;
use crate::word::{generate_word, render_timed_word, repair_conditions, GenConfig, TimedWord, DEFAULT_REPAIR_ROUNDS};

mod bounds;
mod repro;

pub use bounds::*;
pub use repro::*;

/// Largest skip rate a campaign tolerates.
pub const MAX_SKIP_RATE: f64 = 0.05;

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

pub fn word_digest(w: &TimedWord) -> String {
    let h = Sha256::digest(render_timed_word(w).as_bytes());
    hex::encode(&h[..8])
}

fn text_digest(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

/// Deliberate bugs used to check that campaigns can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// `pnueli2` without `phi_out`.
    StripOut,
    /// `elim-C` with one interval bound in `phi'_wit` closed.
    FlipBound,
    /// `mod-k` without the residue-0 automaton.
    DropResidue,
}

impl Mutation {
    pub fn for_pass(p: PassId) -> Option<Mutation> {
        match p {
            PassId::Pnueli2 => Some(Mutation::StripOut),
            PassId::ElimC => Some(Mutation::FlipBound),
            PassId::ModK => Some(Mutation::DropResidue),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mutation::StripOut => "strip-out",
            Mutation::FlipBound => "flip-bound",
            Mutation::DropResidue => "drop-residue",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessChoice {
    Pq,
    Consecutive(usize),
    Single,
}

impl WitnessChoice {
    pub fn build(self) -> WitnessAutomaton {
        match self {
            WitnessChoice::Pq => pq_witness(atom("P"), atom("Q")),
            WitnessChoice::Consecutive(k) => consecutive_witness(k, atom("P")),
            WitnessChoice::Single => single_witness(atom("P")),
        }
    }

    pub fn as_str(self) -> String {
        match self {
            WitnessChoice::Pq => "pq".into(),
            WitnessChoice::Consecutive(k) => format!("consec{k}"),
            WitnessChoice::Single => "single".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pq" => Ok(WitnessChoice::Pq),
            "single" => Ok(WitnessChoice::Single),
            _ => s
                .strip_prefix("consec")
                .and_then(|k| k.parse().ok())
                .filter(|&k: &usize| k >= 1)
                .map(WitnessChoice::Consecutive)
                .ok_or_else(|| Error::Usage(format!("unknown witness automaton '{s}' (pq, consec<k>, single)"))),
        }
    }
}

/// Pass parameters. Unused fields are ignored by a pass; arguments are the
/// atom `P` (and `Q` for `pnueli2`) unless `formula` is given.
#[derive(Clone, Debug)]
pub struct PassSpec {
    pub pass: PassId,
    pub k: usize,
    pub a: usize,
    pub interval: Option<Interval>,
    pub witness: WitnessChoice,
    pub formula: Option<F>,
    pub mutation: Option<Mutation>,
}

impl PassSpec {
    pub fn new(pass: PassId) -> Self {
        PassSpec { pass, k: 2, a: 1, interval: None, witness: WitnessChoice::Pq, formula: None, mutation: None }
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn a(mut self, a: usize) -> Self {
        self.a = a;
        self
    }

    pub fn interval(mut self, i: Interval) -> Self {
        self.interval = Some(i);
        self
    }

    pub fn witness(mut self, w: WitnessChoice) -> Self {
        self.witness = w;
        self
    }

    pub fn formula(mut self, f: F) -> Self {
        self.formula = Some(f);
        self
    }

    pub fn mutated(mut self) -> Self {
        self.mutation = Mutation::for_pass(self.pass);
        self
    }

    pub fn describe(&self) -> String {
        let mut s = format!("pass={}", self.pass);
        match self.pass {
            PassId::ModK | PassId::Rational | PassId::ElimUnbounded => {
                let _ = write!(s, " k={} I={}", self.k, self.interval_or_default());
            }
            PassId::Pnueli2 => {
                let _ = write!(s, " a={}", self.a);
            }
            PassId::Witness => {
                let _ = write!(s, " W={} a={}", self.witness.as_str(), self.a);
            }
            PassId::ElimF => {
                let _ = write!(s, " I={}", self.interval_or_default());
            }
            PassId::ElimC => {
                let _ = write!(s, " k={} a={}", self.k, self.a);
            }
            PassId::Unilateral => {
                let f = self.formula.clone().unwrap_or_else(tt);
                let _ = write!(s, " formula={f}");
            }
        }
        if let Some(m) = self.mutation {
            let _ = write!(s, " mutation={}", m.as_str());
        }
        s
    }

    fn interval_or_default(&self) -> Interval {
        self.interval.clone().unwrap_or_else(|| match self.pass {
            PassId::ElimUnbounded => Interval::mk(rat(self.a as i64), false, None, false),
            _ => Interval::open(self.a as i64, self.a as i64 + 1),
        })
    }
}

/// The reference side of a comparison.
#[derive(Clone, Debug)]
pub enum Oracle {
    Formula(F),
    Witness(WitnessAutomaton, Interval),
}

impl Oracle {
    fn values(&self, w: &TimedWord) -> Vec<bool> {
        match self {
            Oracle::Formula(f) => eval_all(w, f),
            Oracle::Witness(a, i) => witness_property_all(w, a, i),
        }
    }

    fn at_first(&self, w: &TimedWord) -> bool {
        match self {
            Oracle::Formula(f) => eval(w, f, 1).expect("nonempty word"),
            Oracle::Witness(a, i) => eval_witness_property(w, 1, a, i).expect("nonempty word"),
        }
    }

    pub fn max_const(&self) -> Rat {
        match self {
            Oracle::Formula(f) => max_const(f),
            Oracle::Witness(_, i) => i.max_const(),
        }
    }
}

/// A built pass instance ready for trials.
#[derive(Clone, Debug)]
pub struct PassCase {
    pub spec: PassSpec,
    pub oracle: Oracle,
    pub output: F,
    pub conditions: ConditionSpec,
    pub side_conditions: Vec<SideCondition>,
    /// Compare at position 1 only (conditional passes).
    pub first_only: bool,
    pub props: Vec<String>,
    pub strictly_increasing: bool,
}

fn atoms(f: &F) -> Vec<String> {
    let mut out = Vec::new();
    visit_dag(f, |g| {
        if let Formula::Atom(p) = &**g {
            if !out.contains(p) {
                out.push(p.clone());
            }
        }
    });
    out.sort();
    out
}

pub fn build_case(spec: &PassSpec) -> Result<PassCase> {
    let p = atom("P");
    let arg = spec.formula.clone().unwrap_or_else(|| p.clone());
    let mutated = |m: Mutation| spec.mutation == Some(m);
    let iv = spec.interval_or_default();
    let mut conds = Vec::new();
    let mut strictly = false;
    let (oracle, output) = match spec.pass {
        PassId::ModK => {
            let drop = mutated(Mutation::DropResidue).then_some(0);
            let out = modulo_counter_rewrite_with(spec.k, &iv, &arg, drop)?;
            (Oracle::Formula(count(spec.k, iv, arg)), out)
        }
        PassId::Rational => {
            strictly = true;
            let out = rational_rewrite(spec.k, &iv, &arg)?;
            (Oracle::Formula(count(spec.k, iv, arg)), out)
        }
        PassId::ElimUnbounded => {
            if iv.hi().is_some() || spec.k == 0 {
                return Err(Error::Usage(format!("elim-unbounded needs k >= 1 and an unbounded interval, got {iv}")));
            }
            let input = count(spec.k, iv, arg);
            let out = eliminate_unbounded_counting(&input);
            (Oracle::Formula(input), out)
        }
        PassId::Pnueli2 => {
            let q = atom("Q");
            let parts = pnueli2_parts(spec.a, &p, &q)?;
            let out = if mutated(Mutation::StripOut) { parts.wit.clone() } else { parts.formula() };
            let win = Interval::open(spec.a as i64, spec.a as i64 + 1);
            (Oracle::Formula(pnueli(2, win, vec![p.clone(), q])), out)
        }
        PassId::Witness => {
            let w = spec.witness.build();
            let out = witness_rewrite(&w, spec.a)?;
            let win = Interval::open(spec.a as i64, spec.a as i64 + 1);
            (Oracle::Witness(w, win), out)
        }
        PassId::ElimF => {
            let (out, fam) = eliminate_eventually(&iv, &arg)?;
            conds.push(SideCondition::C2 { family: fam });
            (Oracle::Formula(eventually(iv, arg)), out)
        }
        PassId::ElimC => {
            let m = ElimCMutation { flip_bound: mutated(Mutation::FlipBound) };
            let (out, c) = eliminate_counting_with(spec.k, spec.a, &arg, m)?;
            conds = c;
            let win = Interval::open(spec.a as i64, spec.a as i64 + 1);
            (Oracle::Formula(count(spec.k, win, arg)), out)
        }
        PassId::Unilateral => {
            let f = spec
                .formula
                .clone()
                .ok_or_else(|| Error::Usage("unilateral campaigns need a formula".into()))?;
            let r = rewrite_to_unilateral(&f)?;
            conds = r.side_conditions;
            (Oracle::Formula(f), r.output)
        }
    };
    let mut props = match &oracle {
        Oracle::Formula(f) => atoms(f),
        Oracle::Witness(w, _) => w.basis().iter().flat_map(atoms).collect(),
    };
    props.dedup();
    if props.is_empty() {
        props.push("P".into());
    }
    Ok(PassCase {
        spec: spec.clone(),
        oracle,
        output,
        conditions: condition_spec(&conds),
        side_conditions: conds,
        first_only: spec.pass.is_conditional(),
        props,
        strictly_increasing: strictly,
    })
}

impl PassCase {
    /// Generator settings covering the interval constants with room to spare.
    pub fn default_config(&self) -> GenConfig {
        let c = self.oracle.max_const().ceil().to_integer();
        let window = c.max(1) + 1;
        let props: Vec<&str> = self.props.iter().map(String::as_str).collect();
        let cfg = GenConfig::new(&props, 14, window, window + c.max(1) + 2).with_density(0.6);
        if self.strictly_increasing {
            cfg.strictly_increasing()
        } else {
            cfg
        }
    }

    fn positions(&self, w: &TimedWord) -> usize {
        if self.first_only {
            1
        } else {
            w.len()
        }
    }

    /// Input and output truth at the compared positions.
    fn compare(&self, w: &TimedWord) -> (Vec<bool>, Vec<bool>) {
        if self.first_only {
            (vec![self.oracle.at_first(w)], vec![eval(w, &self.output, 1).expect("nonempty")])
        } else {
            (self.oracle.values(w), eval_all(w, &self.output))
        }
    }

    fn disagrees(&self, w: &TimedWord) -> bool {
        let (x, y) = self.compare(w);
        x != y
    }

    fn extension(&self) -> Rat {
        self.oracle.max_const() + rat(1)
    }

    /// Oracle values at the compared positions survive extending the word.
    fn stable(&self, w: &TimedWord) -> bool {
        let n = self.positions(w);
        let ext = w.padded_to(w.last_time() + self.extension());
        let base = self.compare_oracle(w, n);
        base == self.compare_oracle(&ext, n)
    }

    fn compare_oracle(&self, w: &TimedWord, n: usize) -> Vec<bool> {
        if self.first_only {
            vec![self.oracle.at_first(w)]
        } else {
            self.oracle.values(w)[..n].to_vec()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub value: bool,
    pub extended_value: bool,
}

impl StabilityReport {
    pub fn stable(&self) -> bool {
        self.value == self.extended_value
    }
}

/// Truth at position 1 on `w` and on `w` padded with empty events up to
/// `last time + extension`.
pub fn stability_check(w: &TimedWord, f: &F, extension: Rat) -> Result<StabilityReport> {
    if extension <= rat(0) {
        return Err(Error::Usage("stability extension must be positive".into()));
    }
    let ext = w.padded_to(w.last_time() + extension);
    Ok(StabilityReport { value: eval(w, f, 1)?, extended_value: eval(&ext, f, 1)? })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub trial: usize,
    pub seed: u64,
    pub digest: String,
    pub position: usize,
    pub input: bool,
    pub output: bool,
    pub shrunk: TimedWord,
}

#[derive(Clone, Debug)]
pub struct TrialReport {
    pub spec: String,
    pub config: String,
    pub seed: u64,
    pub trials: usize,
    pub agreements: usize,
    pub repair_skips: usize,
    pub unstable_skips: usize,
    pub positions: usize,
    /// Compared positions where the input holds (guards against vacuous campaigns).
    pub input_true: usize,
    pub disagreements: Vec<Disagreement>,
    pub wall_time: Duration,
}

impl TrialReport {
    pub fn skips(&self) -> usize {
        self.repair_skips + self.unstable_skips
    }

    pub fn skip_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.skips() as f64 / self.trials as f64
        }
    }

    pub fn passed(&self) -> bool {
        self.disagreements.is_empty() && self.skip_rate() <= MAX_SKIP_RATE
    }

    fn body(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "campaign {} seed={} trials={}", self.spec, self.seed, self.trials);
        let _ = writeln!(s, "words {}", self.config);
        let _ = writeln!(
            s,
            "agreements={} skips={} (repair={} unstable={}) disagreements={} positions={} input_true={}",
            self.agreements,
            self.skips(),
            self.repair_skips,
            self.unstable_skips,
            self.disagreements.len(),
            self.positions,
            self.input_true
        );
        for d in &self.disagreements {
            let _ = writeln!(
                s,
                "disagreement trial={} seed={} word={} pos={} input={} output={}",
                d.trial, d.seed, d.digest, d.position, d.input, d.output
            );
            let events: Vec<String> = render_timed_word(&d.shrunk).lines().map(str::to_string).collect();
            let _ = writeln!(s, "  shrunk {}", events.join("; "));
        }
        let _ = writeln!(s, "result {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }

    pub fn digest(&self) -> String {
        text_digest(&self.body())
    }

    /// Deterministic text (wall time excluded).
    pub fn render(&self) -> String {
        let body = self.body();
        format!("{body}digest {}\n", text_digest(&body))
    }

    /// One-line machine-readable summary.
    pub fn summary(&self) -> String {
        format!(
            "summary trials={} agreements={} skips={} disagreements={} skip_rate={:.4} digest={}",
            self.trials,
            self.agreements,
            self.skips(),
            self.disagreements.len(),
            self.skip_rate(),
            self.digest()
        )
    }
}

enum Outcome {
    /// Positions compared, positions where the input holds.
    Agree(usize, usize),
    RepairSkip,
    Unstable,
    Disagree(Disagreement),
}

fn run_trial(case: &PassCase, cfg: &GenConfig, seed: u64, t: usize) -> Outcome {
    let mut rng = trial_rng(seed, t);
    let word_seed = rng.next_u64();
    let mut c = cfg.clone();
    c.event_count = rng.gen_range(1..=cfg.event_count.max(1));
    let mut w = generate_word(&c, word_seed);
    if !case.conditions.is_empty() {
        match repair_conditions(&w, &case.conditions, DEFAULT_REPAIR_ROUNDS) {
            Ok(r) => w = r,
            Err(_) => return Outcome::RepairSkip,
        }
    }
    if !case.stable(&w) {
        return Outcome::Unstable;
    }
    let (x, y) = case.compare(&w);
    match (0..x.len()).find(|&p| x[p] != y[p]) {
        None => Outcome::Agree(x.len(), x.iter().filter(|&&b| b).count()),
        Some(p) => Outcome::Disagree(Disagreement {
            trial: t,
            seed: word_seed,
            digest: word_digest(&w),
            position: p + 1,
            input: x[p],
            output: y[p],
            shrunk: shrink(case, &w),
        }),
    }
}

/// Greedy reduction: drop events, then propositions, while the
/// disagreement persists (and, for conditional passes, the conditions hold).
pub fn shrink(case: &PassCase, w: &TimedWord) -> TimedWord {
    let keeps = |v: &TimedWord| case.disagrees(v) && case.conditions.check(v).is_empty();
    let mut cur = w.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for i in (1..=cur.len()).rev() {
            if let Some(v) = cur.without(i) {
                if keeps(&v) {
                    cur = v;
                    changed = true;
                }
            }
        }
        for i in 1..=cur.len() {
            for p in cur.event(i).label.clone() {
                let mut lab = cur.event(i).label.clone();
                lab.remove(&p);
                let v = cur.with_label(i, lab);
                if keeps(&v) {
                    cur = v;
                    changed = true;
                }
            }
        }
    }
    cur
}

/// Runs `trials` comparisons of the pass input and output.
pub fn equivalence_trial(case: &PassCase, cfg: &GenConfig, trials: usize, seed: u64, parallel: bool) -> TrialReport {
    let start = Instant::now();
    let outcomes: Vec<Outcome> = if parallel {
        (0..trials).into_par_iter().map(|t| run_trial(case, cfg, seed, t)).collect()
    } else {
        (0..trials).map(|t| run_trial(case, cfg, seed, t)).collect()
    };
    let mut r = TrialReport {
        spec: case.spec.describe(),
        config: cfg.describe(),
        seed,
        trials,
        agreements: 0,
        repair_skips: 0,
        unstable_skips: 0,
        positions: 0,
        input_true: 0,
        disagreements: Vec::new(),
        wall_time: Duration::ZERO,
    };
    for o in outcomes {
        match o {
            Outcome::Agree(n, t) => {
                r.agreements += 1;
                r.positions += n;
                r.input_true += t;
            }
            Outcome::RepairSkip => r.repair_skips += 1,
            Outcome::Unstable => r.unstable_skips += 1,
            Outcome::Disagree(d) => r.disagreements.push(d),
        }
    }
    r.wall_time = start.elapsed();
    r
}

/// Builds the case and runs a campaign with its default word settings.
pub fn run_campaign(spec: &PassSpec, trials: usize, seed: u64, parallel: bool) -> Result<TrialReport> {
    let case = build_case(spec)?;
    let cfg = case.default_config();
    Ok(equivalence_trial(&case, &cfg, trials, seed, parallel))
}
