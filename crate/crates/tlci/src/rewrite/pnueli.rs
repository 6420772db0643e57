//! Two-point witness properties over `(a, a+1)` rewritten with unilateral
//! counting and automata modalities.
//!
//! With potential witnesses `<h_1,l_1>, <h_2,l_2>, ...` (minimal accepted
//! segments, sorted), the property holds at `i` iff one of them lies inside
//! `tau_i + (a, a+1)`. The formula checks that some start and some end lie
//! inside (`phi_wit`) and rules out the case where the last gap marker in
//! `tau_i + [0, a]` is followed by a witness ending beyond `a + 1` (`phi_out`).

use std::sync::Arc;

use crate::automata::{any_plus, complement, concat, determinize_minimize, intersect, union, Nfa};
use crate::error::{Error, Result};
use crate::formula::*;
use crate::interval::{rat, Interval};
use crate::semantics::WitnessAutomaton;

/// One formula per valuation of `basis`: letter `v + 1` holds iff the cube
/// for `v` does. Exactly one cube holds at every position.
pub fn cubes(basis: &[F]) -> Vec<F> {
    (0..1usize << basis.len())
        .map(|v| {
            and_all(
                basis
                    .iter()
                    .enumerate()
                    .map(|(b, f)| if v >> b & 1 == 1 { f.clone() } else { not(f.clone()) }),
            )
        })
        .collect()
}

fn minimal(a: &Nfa, name: &str) -> Nfa {
    determinize_minimize(a).into_nfa().renamed(name)
}

/// The automata of the construction, over the witness letters.
#[derive(Clone, Debug)]
pub struct WitnessAutomata {
    /// Minimal segments.
    pub min: Nfa,
    /// Some minimal segment starts strictly after the first position and ends at the last.
    pub a1: Nfa,
    /// First position starts a minimal segment, last position ends the next one.
    pub a2: Nfa,
}

/// `Min = L \ (S+ L S* | S* L S+)`, `A1 = S+ Min`,
/// `A2 = (Min S*) & (S+ Min) & !(S+ Min S+)`.
pub fn witness_automata(l: &Nfa, tag: &str) -> Result<WitnessAutomata> {
    let n = l.arity();
    let sp = any_plus(n);
    let sp_l = concat(&sp, l)?;
    let l_sp = concat(l, &sp)?;
    let sp_l_sp = concat(&sp_l, &sp)?;
    let nested = union(&union(&sp_l, &l_sp)?, &sp_l_sp)?;
    let min = minimal(&intersect(l, &complement(&nested))?, &format!("{tag}_start"));
    let a1 = minimal(&concat(&sp, &min)?, &format!("{tag}_A1"));
    let min_any = union(&min, &concat(&min, &sp)?)?;
    let sp_min = concat(&sp, &min)?;
    let inner = concat(&sp_min, &sp)?;
    let a2 = intersect(&intersect(&min_any, &sp_min)?, &complement(&inner))?;
    let a2 = minimal(&a2, &format!("{tag}_A2"));
    Ok(WitnessAutomata { min, a1, a2 })
}

/// `B^k` over letters `(base letter, marker bit)`: read the current
/// position, skip to the `k`-th marker, then run `a2` from it.
/// `base_bits` is the number of basis formulas of `a2`'s alphabet.
pub fn marker_chain(k: usize, a2: &Nfa, base_bits: usize, name: &str) -> Nfa {
    assert!(k >= 1);
    let letters = 1usize << (base_bits + 1);
    let base = |t: usize| ((t - 1) & ((1 << base_bits) - 1)) + 1;
    let marked = |t: usize| (t - 1) >> base_bits & 1 == 1;
    let c = |j: usize| 1 + j;
    let off = 1 + k;
    let mut t = Vec::new();
    for s in 1..=letters {
        t.push((0, s, c(0)));
        for j in 0..k {
            if !marked(s) {
                t.push((c(j), s, c(j)));
            } else if j + 1 < k {
                t.push((c(j), s, c(j + 1)));
            } else {
                for &r in a2.succ(a2.initial(), base(s)) {
                    t.push((c(j), s, off + r));
                }
            }
        }
        for &(p, b, q) in a2.transitions() {
            if b == base(s) {
                t.push((off + p, s, off + q));
            }
        }
    }
    let finals: Vec<usize> = (0..a2.num_states()).filter(|&q| a2.is_final(q)).map(|q| off + q).collect();
    let raw = Nfa::new(name, letters, off + a2.num_states(), 0, finals, t).expect("well formed");
    minimal(&raw, name)
}

/// Ingredients of the rewrite, kept apart for inspection and mutation.
#[derive(Clone, Debug)]
pub struct WitnessParts {
    pub start: F,
    pub wit: F,
    pub marker: F,
    pub out: F,
    pub bound: usize,
}

impl WitnessParts {
    pub fn formula(&self) -> F {
        and(self.wit.clone(), not(self.out.clone()))
    }
}

fn unit_window(a: usize) -> Interval {
    Interval::open(a as i64, a as i64 + 1)
}

fn assemble(
    a: usize,
    start: F,
    a1: &Nfa,
    a2: &Nfa,
    basis: &[F],
    bound: usize,
    tag: &str,
) -> WitnessParts {
    let win = unit_window(a);
    let args = cubes(basis);
    let wit = and(
        eventually(win.clone(), start.clone()),
        automod(Arc::new(a1.clone()), win, args.clone()),
    );
    let after_one = Interval::mk(rat(1), true, None, false);
    let marker = automod(Arc::new(a2.clone()), after_one, args);
    let mut marked_basis = basis.to_vec();
    marked_basis.push(marker.clone());
    let marked_args = cubes(&marked_basis);
    let upto = Interval::closed(0, a as i64);
    let beyond = Interval::mk(rat(a as i64 + 1), true, None, false);
    let out = or_all((1..=bound).map(|n| {
        let b = marker_chain(n, a2, basis.len(), &format!("{tag}_B{n}"));
        and_all([
            count(n, upto.clone(), marker.clone()),
            not(count(n + 1, upto.clone(), marker.clone())),
            automod(Arc::new(b), beyond.clone(), marked_args.clone()),
        ])
    }));
    WitnessParts { start, wit, marker, out, bound }
}

/// Letters `1=none, 2=P only, 3=Q only, 4=P and Q` (basis `(P, Q)`).
const N: usize = 1;
const PO: usize = 2;
const QO: usize = 3;
const PQ: usize = 4;

/// `S+ P (none)* Q`.
pub fn pnueli2_a1() -> Nfa {
    let (init, lp, after, fin) = (0, 1, 2, 3);
    let mut t = Vec::new();
    for s in [N, PO, QO, PQ] {
        t.push((init, s, lp));
        t.push((lp, s, lp));
    }
    t.extend([(lp, PO, after), (lp, PQ, after), (after, N, after), (after, QO, fin), (after, PQ, fin)]);
    Nfa::new("pn2_A1", 4, 4, init, [fin], t).expect("well formed")
}

/// From the start `h_j` of a potential witness to the end `l_{j+1}` of the next.
pub fn pnueli2_a2() -> Nfa {
    let (init, after_x, prev_no_p, prev_p, acc) = (0, 1, 2, 3, 4);
    let t = [
        (init, PO, after_x),
        (init, PQ, after_x),
        (after_x, N, after_x),
        (after_x, QO, prev_no_p),
        (after_x, PQ, prev_p),
        (prev_no_p, N, prev_no_p),
        (prev_no_p, QO, prev_no_p),
        (prev_no_p, PO, prev_p),
        (prev_no_p, PQ, prev_p),
        (prev_p, N, prev_p),
        (prev_p, PO, prev_p),
        (prev_p, QO, acc),
        (prev_p, PQ, acc),
    ];
    Nfa::new("pn2_A2", 4, 5, init, [acc], t).expect("well formed")
}

/// `P & ((!P & !Q) U Q)`: a potential witness starts here.
pub fn pnueli2_start(p: &F, q: &F) -> F {
    and(p.clone(), until(Interval::all(), and(not(p.clone()), not(q.clone())), q.clone()))
}

pub fn pnueli2_parts(a: usize, p: &F, q: &F) -> Result<WitnessParts> {
    if a == 0 {
        return Err(Error::Rewrite("pnueli2: a must be at least 1".into()));
    }
    let basis = [p.clone(), q.clone()];
    Ok(assemble(a, pnueli2_start(p, q), &pnueli2_a1(), &pnueli2_a2(), &basis, 2 * a + 2, "pn2"))
}

/// `Pn^2_(a,a+1)(P, Q)` as `phi_wit & !phi_out`.
pub fn pnueli2_rewrite(a: usize, p: &F, q: &F) -> Result<F> {
    Ok(pnueli2_parts(a, p, q)?.formula())
}

pub fn witness_parts(w: &WitnessAutomaton, a: usize) -> Result<WitnessParts> {
    if a == 0 {
        return Err(Error::Rewrite("witness: a must be at least 1".into()));
    }
    let tag = w.name().to_string();
    let auts = witness_automata(w.dfa().nfa(), &tag)?;
    let basis = w.basis().to_vec();
    let start = automod(Arc::new(auts.min.clone()), Interval::all(), cubes(&basis));
    let bound = (w.m() + 1) * (a + 1);
    Ok(assemble(a, start, &auts.a1, &auts.a2, &basis, bound, &tag))
}

/// The witness property over `(a, a+1)` without bilateral modalities.
pub fn witness_rewrite(w: &WitnessAutomaton, a: usize) -> Result<F> {
    Ok(witness_parts(w, a)?.formula())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::all_words;
    use crate::semantics::pq_witness;

    fn is_p(s: usize) -> bool {
        s == PO || s == PQ
    }

    fn is_q(s: usize) -> bool {
        s == QO || s == PQ
    }

    /// `P` at 0, `Q` at the end, nothing in between.
    fn min_seg(w: &[usize]) -> bool {
        w.len() >= 2 && is_p(w[0]) && is_q(w[w.len() - 1]) && w[1..w.len() - 1].iter().all(|&s| s == N)
    }

    fn a1_def(w: &[usize]) -> bool {
        (1..w.len()).any(|y| min_seg(&w[y..]))
    }

    fn a2_def(w: &[usize]) -> bool {
        let n = w.len();
        let starts = (0..n).any(|e| min_seg(&w[..=e]));
        let ends = (1..n).any(|y| min_seg(&w[y..]));
        let inner = (1..n).any(|y| (y..n - 1).any(|e| min_seg(&w[y..=e])));
        starts && ends && !inner
    }

    #[test]
    fn hand_built_languages() {
        let a1 = pnueli2_a1();
        let a2 = pnueli2_a2();
        for w in all_words(4, 8) {
            assert_eq!(a1.accepts(&w).unwrap(), a1_def(&w), "A1 {w:?}");
            assert_eq!(a2.accepts(&w).unwrap(), a2_def(&w), "A2 {w:?}");
        }
    }

    #[test]
    fn algebra_matches_hand_built() {
        let w = pq_witness(atom("P"), atom("Q"));
        assert_eq!(w.letter_count(), 4);
        let auts = witness_automata(w.dfa().nfa(), "pq").unwrap();
        for x in all_words(4, 7) {
            assert_eq!(auts.min.accepts(&x).unwrap(), min_seg(&x), "min {x:?}");
            assert_eq!(auts.a1.accepts(&x).unwrap(), a1_def(&x), "A1 {x:?}");
            assert_eq!(auts.a2.accepts(&x).unwrap(), a2_def(&x), "A2 {x:?}");
        }
    }

    #[test]
    fn marker_chain_language() {
        let a2 = pnueli2_a2();
        for k in 1..=2 {
            let b = marker_chain(k, &a2, 2, "b");
            for w in all_words(8, 5) {
                let base: Vec<usize> = w.iter().map(|t| ((t - 1) & 3) + 1).collect();
                let mk = |t: usize| (t - 1) >> 2 & 1 == 1;
                let marks: Vec<usize> = (1..w.len()).filter(|&p| mk(w[p])).collect();
                let want = marks.len() >= k && a2.accepts(&base[marks[k - 1]..]).unwrap();
                assert_eq!(b.accepts(&w).unwrap(), want, "k={k} {w:?}");
            }
        }
    }

    #[test]
    fn rejects_zero() {
        assert!(pnueli2_rewrite(0, &atom("P"), &atom("Q")).is_err());
    }

    #[test]
    fn output_count_nodes_unilateral() {
        let f = pnueli2_rewrite(1, &atom("P"), &atom("Q")).unwrap();
        visit_dag(&f, |g| {
            if let Formula::Count(_, i, _) = &**g {
                assert!(i.is_unilateral());
            }
        });
    }

    fn random_words(seed: u64, n: usize) -> Vec<crate::word::TimedWord> {
        use crate::word::{generate_word, GenConfig};
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|s| {
                let cfg = GenConfig::new(&["P", "Q"], rng.gen_range(2..12), 4, 6).with_density(rng.gen_range(0.3..0.9));
                generate_word(&cfg, seed * 7919 + s as u64)
            })
            .collect()
    }

    #[test]
    fn pnueli2_agrees_with_semantics() {
        let (p, q) = (atom("P"), atom("Q"));
        for a in 1..=2 {
            let f = pnueli2_rewrite(a, &p, &q).unwrap();
            let g = pnueli(2, Interval::open(a as i64, a as i64 + 1), vec![p.clone(), q.clone()]);
            for w in random_words(a as u64, 300) {
                assert_eq!(crate::semantics::eval_all(&w, &f), crate::semantics::eval_all(&w, &g), "a={a} {w}");
            }
        }
    }

    #[test]
    fn witness_rewrite_agrees_with_semantics() {
        use crate::semantics::{consecutive_witness, witness_property_all};
        for w in [pq_witness(atom("P"), atom("Q")), consecutive_witness(2, atom("P"))] {
            let f = witness_rewrite(&w, 1).unwrap();
            let iv = Interval::open(1, 2);
            for rho in random_words(11, 200) {
                assert_eq!(crate::semantics::eval_all(&rho, &f), witness_property_all(&rho, &w, &iv), "{} {rho}", w.name());
            }
        }
    }
}
