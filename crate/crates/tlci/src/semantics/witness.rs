//! Two-point witness properties given by automata, and the segment
//! structure (potential witnesses, gap markers) built on them.

use std::fmt;

use crate::automata::{determinize_minimize, relabel, Dfa, Nfa};
use crate::formula::{visit_dag, Formula};
use crate::error::{Error, Result};
use crate::formula::F;
use crate::interval::Interval;
use crate::semantics::Evaluator;
use crate::word::TimedWord;

/// 1-based positions `h <= l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    pub h: usize,
    pub l: usize,
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.h, self.l)
    }
}

/// Letter of the valuation alphabet: bit `b` of `letter - 1` is the truth
/// of argument `b`.
pub fn valuation_letter(bits: impl Iterator<Item = bool>) -> usize {
    bits.enumerate().fold(0, |acc, (b, x)| acc | (usize::from(x) << b)) + 1
}

/// Truth of a Boolean combination of atoms under a valuation of `atoms`
/// (bit `b` of `v` = atom `b`); `None` for temporal formulas.
pub fn prop_eval(f: &F, atoms: &[String], v: usize) -> Option<bool> {
    match &**f {
        Formula::True => Some(true),
        Formula::Atom(p) => atoms.iter().position(|a| a == p).map(|b| v >> b & 1 == 1),
        Formula::Not(g) => prop_eval(g, atoms, v).map(|x| !x),
        Formula::And(g, h) => Some(prop_eval(g, atoms, v)? && prop_eval(h, atoms, v)?),
        Formula::Or(g, h) => Some(prop_eval(g, atoms, v)? || prop_eval(h, atoms, v)?),
        _ => None,
    }
}

fn atoms_of(fs: &[F]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for f in fs {
        visit_dag(f, |g| {
            if let Formula::Atom(p) = &**g {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        });
    }
    out
}

/// A witness property: segments `h..l` whose argument labels the automaton
/// accepts (a position can be read as any argument it satisfies).
///
/// Letters of the internal alphabet are valuations of a basis: the atoms of
/// the arguments when these are propositional (so impossible argument
/// combinations never appear), otherwise the arguments themselves.
#[derive(Clone, Debug)]
pub struct WitnessAutomaton {
    name: String,
    source: Nfa,
    args: Vec<F>,
    basis: Vec<F>,
    /// Argument symbols readable under each letter (index = letter - 1).
    readable: Vec<Vec<usize>>,
    dfa: Dfa,
}

impl WitnessAutomaton {
    pub fn new(a: Nfa, args: Vec<F>) -> Result<Self> {
        if args.len() != a.arity() {
            return Err(Error::Automaton(format!(
                "witness automaton {} has arity {} but {} arguments",
                a.name(),
                a.arity(),
                args.len()
            )));
        }
        let atoms = atoms_of(&args);
        let propositional = args.iter().all(|f| prop_eval(f, &atoms, 0).is_some());
        let (basis, readable): (Vec<F>, Vec<Vec<usize>>) = if propositional {
            let readable = (0..1usize << atoms.len())
                .map(|v| (1..=args.len()).filter(|&s| prop_eval(&args[s - 1], &atoms, v) == Some(true)).collect())
                .collect();
            (atoms.iter().map(|p| crate::formula::atom(p)).collect(), readable)
        } else {
            let n = args.len();
            let readable = (0..1usize << n).map(|v| (1..=n).filter(|s| v >> (s - 1) & 1 == 1).collect()).collect();
            (args.clone(), readable)
        };
        if basis.len() > 6 {
            return Err(Error::Automaton("witness alphabet above 2^6 letters is not supported".into()));
        }
        let lifted = relabel(&a, readable.len(), |t| readable[t - 1].clone());
        let dfa = determinize_minimize(&lifted);
        Ok(WitnessAutomaton { name: a.name().to_string(), source: a, args, basis, readable, dfa })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Nfa {
        &self.source
    }

    pub fn args(&self) -> &[F] {
        &self.args
    }

    /// Formulas whose valuations are the letters of [`Self::dfa`].
    pub fn basis(&self) -> &[F] {
        &self.basis
    }

    pub fn letter_count(&self) -> usize {
        self.readable.len()
    }

    /// Minimal DFA over the letters.
    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    /// State count of the minimal DFA (no dead state).
    pub fn m(&self) -> usize {
        self.dfa.num_states()
    }

    /// Letter of every position (0-based index).
    pub fn letters(&self, ev: &mut Evaluator) -> Vec<usize> {
        let vals: Vec<Vec<bool>> = self.basis.iter().map(|a| ev.values(a).to_vec()).collect();
        (0..ev.word().len()).map(|p| valuation_letter(vals.iter().map(|v| v[p]))).collect()
    }

    /// `acc[h][l]` (0-based): the segment `h..l` is accepted.
    pub fn accepted(&self, w: &TimedWord) -> Vec<Vec<bool>> {
        let mut ev = Evaluator::new(w);
        let letters = self.letters(&mut ev);
        let n = w.len();
        let mut acc = vec![vec![false; n]; n];
        for h in 0..n {
            let mut q = self.dfa.nfa().initial();
            for l in h..n {
                match self.dfa.delta(q, letters[l]) {
                    Some(r) => q = r,
                    None => break,
                }
                acc[h][l] = self.dfa.nfa().is_final(q);
            }
        }
        acc
    }
}

/// Exists a segment `h..l` with `i < h`, both distances in `iv`, accepted by `w`.
pub fn eval_witness_property(rho: &TimedWord, i: usize, w: &WitnessAutomaton, iv: &Interval) -> Result<bool> {
    if i == 0 || i > rho.len() {
        return Err(Error::Position(i));
    }
    let acc = w.accepted(rho);
    let n = rho.len();
    let ti = rho.time(i);
    let i0 = i - 1;
    Ok((i0 + 1..n).any(|h| {
        iv.contains(rho.time(h + 1) - ti)
            && (h..n).any(|l| acc[h][l] && iv.contains(rho.time(l + 1) - ti))
    }))
}

/// Truth of the witness property at every position (0-based).
pub fn witness_property_all(rho: &TimedWord, w: &WitnessAutomaton, iv: &Interval) -> Vec<bool> {
    (1..=rho.len()).map(|i| eval_witness_property(rho, i, w, iv).expect("in range")).collect()
}

/// Accepted segments with no accepted proper sub-segment, sorted by start.
pub fn potential_witnesses(rho: &TimedWord, w: &WitnessAutomaton) -> Vec<Segment> {
    let acc = w.accepted(rho);
    let n = rho.len();
    // earliest accepted end from each start, and its minimum over later starts
    let first_end: Vec<usize> = (0..n).map(|h| (h..n).find(|&l| acc[h][l]).unwrap_or(usize::MAX)).collect();
    let mut later = vec![usize::MAX; n + 1];
    for h in (0..n).rev() {
        later[h] = later[h + 1].min(first_end[h]);
    }
    let mut out = Vec::new();
    for h in 0..n {
        // a nested segment starts at h and ends earlier, or starts later and ends by l
        let l = first_end[h];
        if l != usize::MAX && later[h + 1] > l {
            out.push(Segment { h: h + 1, l: l + 1 });
        }
    }
    out
}

/// Starts `h_j` of potential witnesses whose successor (in start order)
/// ends at least one time unit after `h_j`.
pub fn gap_markers(rho: &TimedWord, w: &WitnessAutomaton) -> Vec<usize> {
    let segs = potential_witnesses(rho, w);
    segs.windows(2)
        .filter(|p| rho.time(p[1].l) - rho.time(p[0].h) >= crate::interval::rat(1))
        .map(|p| p[0].h)
        .collect()
}

/// `P` at `h`, `Q` at `l > h`, neither strictly between.
/// Arguments: `(P, Q, !P & !Q)`.
pub fn pq_witness(p: F, q: F) -> WitnessAutomaton {
    use crate::formula::{and, not};
    let a = Nfa::new("pq", 3, 3, 0, [2], [(0, 1, 1), (1, 3, 1), (1, 2, 2)]).expect("well formed");
    let between = and(not(p.clone()), not(q.clone()));
    WitnessAutomaton::new(a, vec![p, q, between]).expect("arity 3")
}

/// `k` consecutive `psi` positions: `psi (!psi)* psi ... psi`.
/// Arguments: `(psi, !psi)`.
pub fn consecutive_witness(k: usize, psi: F) -> WitnessAutomaton {
    assert!(k >= 1);
    let mut t = vec![(0, 1, 1)];
    for c in 1..k {
        t.push((c, 2, c));
        t.push((c, 1, c + 1));
    }
    let a = Nfa::new(format!("consec{k}"), 2, k + 1, 0, [k], t).expect("well formed");
    let neg = crate::formula::not(psi.clone());
    WitnessAutomaton::new(a, vec![psi, neg]).expect("arity 2")
}

/// Single positions satisfying `phi`.
pub fn single_witness(phi: F) -> WitnessAutomaton {
    let a = Nfa::new("single", 1, 2, 0, [1], [(0, 1, 1)]).expect("well formed");
    WitnessAutomaton::new(a, vec![phi]).expect("arity 1")
}
