//! Elimination of bilateral eventually and counting under side conditions.
//!
//! Outputs agree with their inputs at position 1 on words satisfying the
//! reported conditions (C1 for counting, C2 for the argument families).

use crate::error::{Error, Result};
use crate::formula::*;
use crate::interval::{rat, Interval};

use super::{counting::chain_from_here, SideCondition};

fn upto(hi: i64, closed: bool) -> Interval {
    Interval::mk(rat(0), true, Some(rat(hi)), closed)
}

fn from(lo: i64) -> Interval {
    Interval::mk(rat(lo), true, None, false)
}

/// `X_>0 T & !psi U_[0,1] psi & !psi U_[1,inf) psi`: the next strictly later
/// event exists and the first `psi` after here lies exactly one unit ahead.
pub fn anchor_next(psi: &F) -> F {
    let np = not(psi.clone());
    and_all([
        next_later(),
        until(upto(1, true), np.clone(), psi.clone()),
        until(from(1), np, psi.clone()),
    ])
}

/// `G_(0,1) f` as `(X_>0 T & G_[0,1) f) | F_<=0 (X_>0 T & G_[0,1) f)`.
pub fn globally_open_unit(f: &F) -> F {
    let g = and(next_later(), globally(upto(1, false), f.clone()));
    or(g.clone(), same_time(g))
}

fn push_unique(fam: &mut Vec<F>, f: F) {
    if !fam.iter().any(|g| same(g, &f)) {
        fam.push(f);
    }
}

fn closure_level(prev: &[F]) -> Vec<F> {
    let mut out = Vec::new();
    for g in prev {
        for b in [g.clone(), not(g.clone())] {
            push_unique(&mut out, anchor_next(&b));
            push_unique(&mut out, globally_open_unit(&b));
        }
    }
    out
}

/// `Phi^0 .. Phi^a`: `Phi^0 = {phi}`, each next level applies both shapes to
/// every member and its negation.
pub fn build_phi_family(phi: &F, a: usize) -> Vec<Vec<F>> {
    let mut levels = vec![vec![phi.clone()]];
    for _ in 0..a {
        let next = closure_level(levels.last().expect("nonempty"));
        levels.push(next);
    }
    levels
}

/// Position where exactly the k-th `psi` of a window `[0,1]` sits one unit ahead.
pub fn block_marker(psi: &F, k: usize) -> F {
    and_all([
        or(next_later(), next(Interval::zero(), psi.clone())),
        count(k, upto(1, true), psi.clone()),
        not(count(k, upto(1, false), psi.clone())),
    ])
}

/// Start of `k + 1` consecutive `psi` positions spanning at least one unit.
pub fn gap_block(psi: &F, k: usize) -> F {
    and(chain_from_here(k + 1, psi), not(count(k, upto(1, false), psi.clone())))
}

/// `Psi^1 .. Psi^a`, `Psi^1 = {block_marker}`.
pub fn build_psi_family(psi: &F, k: usize, a: usize) -> Vec<Vec<F>> {
    let mut levels = vec![vec![block_marker(psi, k)]];
    for _ in 1..a {
        let next = closure_level(levels.last().expect("nonempty"));
        levels.push(next);
    }
    levels
}

/// Holds at position 1 iff the word satisfies C1 for `(psi, k)`.
pub fn condition_formula_c(psi: &F, k: usize) -> F {
    assert!(k >= 2);
    let c01 = count(k, upto(1, true), psi.clone());
    let fw = |f: F| weak_eventually(Interval::all(), f);
    let first = and_all([
        next(Interval::positive(), not(psi.clone())),
        not(c01.clone()),
        next(Interval::all(), count(k, upto(1, false), psi.clone())),
    ]);
    let second = and_all([
        next(Interval::positive(), psi.clone()),
        not(c01),
        next(Interval::all(), count(k - 1, upto(1, false), psi.clone())),
    ]);
    not(or(fw(first), fw(second)))
}

/// `F_<c,c+1> psi` for integer `c`, by recursion on `c`. Arguments of
/// recursive steps are collected in `fam` (their C2 is required).
pub fn elim_f_unit(c: i64, lc: bool, hc: bool, psi: &F, fam: &mut Vec<F>) -> F {
    if c == 0 {
        let base = eventually(upto(1, hc), psi.clone());
        if lc {
            return base;
        }
        let inner = and(next_later(), base);
        return or(inner.clone(), same_time(inner));
    }
    push_unique(fam, psi.clone());
    let ax = anchor_next(psi);
    let mut z1 = elim_f_unit(c - 1, lc, hc, &ax, fam);
    if c == 1 && lc {
        z1 = or(ax, z1);
    }
    let g = globally_open_unit(&not(psi.clone()));
    let z2 = and(elim_f_unit(c - 1, false, !lc, psi, fam), not(elim_f_unit(c - 1, false, !lc, &g, fam)));
    or(z1, z2)
}

fn integer_endpoint(x: crate::interval::Rat) -> Option<i64> {
    x.is_integer().then(|| x.to_integer())
}

/// `F_I phi` for bilateral `I` with integer endpoints, as a disjunction over
/// unit pieces. Returns the formula and the C2 family.
pub fn eliminate_eventually(i: &Interval, phi: &F) -> Result<(F, Vec<F>)> {
    if i.is_singular() || i.is_unilateral() {
        return Err(Error::Rewrite(format!("elim-F: interval {i} must be bilateral and non-singular")));
    }
    let (a, b) = match (integer_endpoint(i.lo()), i.hi().and_then(integer_endpoint)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Rewrite(format!("elim-F: interval {i} needs integer endpoints"))),
    };
    let mut fam = Vec::new();
    let pieces = (a..b).map(|c| {
        let lc = if c == a { i.lo_closed() } else { true };
        let hc = if c + 1 == b { i.hi_closed() } else { true };
        elim_f_unit(c, lc, hc, phi, &mut fam)
    });
    let f = or_all(pieces.collect::<Vec<_>>());
    Ok((f, fam))
}

/// Mutations of the counting construction (mutation testing only).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ElimCMutation {
    /// Close the upper bound of the block-marker window in `phi'_wit`.
    pub flip_bound: bool,
}

/// `U_[0,inf)` chain: the `n`-th `mark` strictly after here satisfies `f`.
fn nth_mark(n: usize, mark: &F, f: &F) -> F {
    let nm = not(mark.clone());
    let mut r = and(mark.clone(), f.clone());
    for _ in 1..n {
        r = and(mark.clone(), until(Interval::all(), nm.clone(), r));
    }
    until(Interval::all(), nm, r)
}

/// `C^k_(a,a+1) psi` in unilateral counting logic.
pub fn eliminate_counting_with(k: usize, a: usize, psi: &F, m: ElimCMutation) -> Result<(F, Vec<SideCondition>)> {
    if k < 2 {
        return Err(Error::Rewrite("elim-C: k must be at least 2 (use elim-F for k = 1)".into()));
    }
    if a == 0 {
        return Err(Error::Rewrite("elim-C: a must be at least 1".into()));
    }
    let ai = a as i64;
    let short = count(k, upto(1, false), psi.clone());
    let mk = block_marker(psi, k);
    let gm = gap_block(psi, k);
    let mark = or(mk.clone(), gm.clone());
    let (ac, ao) = (upto(ai, true), upto(ai, false));
    let p1 = or_all(
        (1..=k * a + 1).map(|n| and(count(n, ac.clone(), gm.clone()), not(count(n, ao.clone(), gm.clone())))),
    );
    let gap_only = and(gm.clone(), not(mk.clone()));
    let bound = k * a + k * (a + 1) + 1;
    let p3 = or_all((1..=bound).map(|n| {
        and_all([
            count(n, ao.clone(), mark.clone()),
            not(count(n + 1, ao.clone(), mark.clone())),
            nth_mark(n, &mark, &gap_only),
        ])
    }));
    let out = or(p1, p3);
    let within = not(or(not(psi.clone()), short));
    let mut fam = Vec::new();
    let hit = elim_f_unit(ai, false, false, &chain_from_here(k, psi), &mut fam);
    let marked = elim_f_unit(ai - 1, false, m.flip_bound, &mk, &mut fam);
    let tail_psi = elim_f_unit(ai - 1, false, true, psi, &mut fam);
    let tail_bad = elim_f_unit(ai - 1, false, true, &within, &mut fam);
    let f = and(hit, or(and(marked, not(out)), and(tail_psi, not(tail_bad))));
    let conds = vec![SideCondition::C1 { psi: psi.clone(), k }, SideCondition::C2 { family: fam }];
    Ok((f, conds))
}

pub fn eliminate_counting(k: usize, a: usize, psi: &F) -> Result<(F, Vec<SideCondition>)> {
    eliminate_counting_with(k, a, psi, ElimCMutation::default())
}

/// `X_<a,b> f` as `X_[0,b> f & !X_[0,a]' T` (the excluded prefix takes the
/// complementary bracket).
fn next_unilateral(i: &Interval, f: &F) -> F {
    let keep = Interval::mk(rat(0), true, i.hi(), i.hi_closed());
    let skip = Interval::mk(rat(0), true, Some(i.lo()), !i.lo_closed());
    and(next(keep, f.clone()), not(next(skip, tt())))
}

/// Count over `(0,1>`: the last event at the current instant counts from `[0,1>`.
fn count_from_zero(k: usize, i: &Interval, f: &F) -> F {
    let inner = and(next_later(), count(k, upto(1, i.hi_closed()), f.clone()));
    or(inner.clone(), same_time(inner))
}

/// Result of [`rewrite_to_unilateral`].
#[derive(Clone, Debug)]
pub struct UnilateralRewrite {
    pub output: F,
    pub side_conditions: Vec<SideCondition>,
    pub notes: Vec<String>,
}

/// Eliminates every bilateral interval, innermost first.
pub fn rewrite_to_unilateral(f: &F) -> Result<UnilateralRewrite> {
    let mut conds = Vec::new();
    let mut notes = Vec::new();
    let output = rebuild(f, |node, kids| {
        let g = match &**node {
            Formula::Pnueli(..) | Formula::AutoMod(..) => {
                return Err(Error::Rewrite(format!(
                    "unilateral: {} is not supported by this driver (use the witness pass)",
                    truncated(node, 60)
                )))
            }
            _ => with_children(node, kids),
        };
        let i = match g.interval() {
            Some(i) if i.is_bilateral() => i.clone(),
            _ => return Ok(g),
        };
        match &*g {
            Formula::Eventually(_, x) => {
                let (h, fam) = eliminate_eventually(&i, x)?;
                conds.push(SideCondition::C2 { family: fam });
                Ok(h)
            }
            Formula::WeakEventually(_, x) => {
                let (h, fam) = eliminate_eventually(&i, x)?;
                conds.push(SideCondition::C2 { family: fam });
                Ok(or(x.clone(), h))
            }
            Formula::Globally(_, x) => {
                let (h, fam) = eliminate_eventually(&i, &not(x.clone()))?;
                conds.push(SideCondition::C2 { family: fam });
                Ok(not(h))
            }
            Formula::Next(_, x) => Ok(next_unilateral(&i, x)),
            Formula::Count(1, _, x) => {
                let (h, fam) = eliminate_eventually(&i, x)?;
                conds.push(SideCondition::C2 { family: fam });
                Ok(h)
            }
            Formula::Count(k, _, x) => {
                let unit = i.len() == Some(rat(1)) && i.lo().is_integer();
                if unit && i.lo() == rat(0) {
                    return Ok(count_from_zero(*k, &i, x));
                }
                if !(unit && !i.lo_closed() && !i.hi_closed()) {
                    return Err(Error::Rewrite(format!(
                        "unilateral: counting over {i} is not supported (only open unit intervals (a,a+1) and (0,1>)"
                    )));
                }
                let (h, mut c) = eliminate_counting(*k, i.lo().to_integer() as usize, x)?;
                conds.append(&mut c);
                Ok(h)
            }
            _ => Err(Error::Rewrite(format!("unilateral: bilateral {} is not supported", truncated(&g, 60)))),
        }
    })?;
    if conds.is_empty() {
        notes.push("no bilateral intervals; output equals input".into());
    }
    Ok(UnilateralRewrite { output, side_conditions: conds, notes })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::parser::parse_formula;
    use crate::rewrite::condition_spec;
    use crate::semantics::{check_c1, eval, ConditionSpec};
    use crate::word::{generate_word, repair_conditions, GenConfig, TimedWord};

    fn p() -> F {
        atom("P")
    }

    fn repaired(seed: u64, n: usize, window: i64, spec: &ConditionSpec) -> (Vec<TimedWord>, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        let mut skipped = 0;
        for s in 0..n {
            let cfg = GenConfig::new(&["P"], rng.gen_range(2..14), window, window + 5).with_density(0.6);
            match repair_conditions(&generate_word(&cfg, seed * 10_007 + s as u64), spec, 10) {
                Ok(w) => out.push(w),
                Err(_) => skipped += 1,
            }
        }
        (out, skipped)
    }

    fn agree_at_first(orig: &F, out: &F, spec: &ConditionSpec, window: i64, seed: u64) -> usize {
        let (words, skipped) = repaired(seed, 200, window, spec);
        assert!(skipped <= 10, "skipped {skipped}");
        let mut pos = 0;
        for w in &words {
            let x = eval(w, orig, 1).unwrap();
            pos += x as usize;
            assert_eq!(x, eval(w, out, 1).unwrap(), "{orig} on\n{w}");
        }
        pos
    }

    #[test]
    fn base_case_shape() {
        let (f, fam) = eliminate_eventually(&Interval::mk(rat(0), false, Some(rat(1)), true), &p()).unwrap();
        assert!(fam.is_empty());
        let want = parse_formula("(X[(0,inf)] true & F[[0,1]] P) | F[[0,0]](X[(0,inf)] true & F[[0,1]] P)").unwrap();
        assert_eq!(*f, *want);
    }

    #[test]
    fn phi_and_psi_families() {
        let fam = build_phi_family(&p(), 2);
        assert!(same(&fam[0][0], &p()));
        assert_eq!(fam[1].len(), 4);
        assert_eq!(fam[2].len(), 16);
        let psi = build_psi_family(&p(), 2, 2);
        assert_eq!(psi[0].len(), 1);
        assert_eq!(psi[1].len(), 4);
        for g in fam.iter().chain(psi.iter()).flatten() {
            assert!(all_unilateral(g));
            assert!(validate_formula(g, ValidationPolicy::strict()).is_ok());
        }
    }

    #[test]
    fn elim_f_agrees_on_repaired_words() {
        for (n, iv) in [
            (1, Interval::open(1, 2)),
            (2, Interval::open(2, 3)),
            (3, Interval::mk(rat(1), true, Some(rat(2)), false)),
            (4, Interval::mk(rat(1), false, Some(rat(3)), true)),
        ] {
            let (out, fam) = eliminate_eventually(&iv, &p()).unwrap();
            assert!(all_unilateral(&out));
            let spec = ConditionSpec { c1: vec![], c2: fam };
            let pos = agree_at_first(&eventually(iv.clone(), p()), &out, &spec, iv.max_const().to_integer() + 1, n);
            assert!(pos > 10, "{iv}: only {pos} positive");
        }
    }

    #[test]
    fn elim_c_agrees_on_repaired_words() {
        for (k, a) in [(2, 1), (3, 1), (2, 2)] {
            let (out, conds) = eliminate_counting(k, a, &p()).unwrap();
            assert!(all_unilateral(&out));
            let orig = count(k, Interval::open(a as i64, a as i64 + 1), p());
            let pos = agree_at_first(&orig, &out, &condition_spec(&conds), a as i64 + 2, 20 + k as u64 * 3 + a as u64);
            assert!(pos > 5, "k={k} a={a}: only {pos} positive");
        }
    }

    #[test]
    fn condition_formula_on_random_words() {
        for k in [2, 3] {
            let c = condition_formula_c(&p(), k);
            let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
            let mut violated = 0;
            for s in 0..300 {
                let cfg = GenConfig::new(&["P"], rng.gen_range(2..14), 4, 8).with_density(0.6);
                let w = generate_word(&cfg, 500 + s);
                let ok = check_c1(&w, &p(), k).is_empty();
                violated += !ok as usize;
                assert_eq!(eval(&w, &c, 1).unwrap(), ok, "k={k}\n{w}");
            }
            assert!(violated > 20);
        }
    }

    #[test]
    fn driver_examples() {
        for src in ["F[(1,2)] P", "C{2}[(1,2)] P", "C{2}[(1,2)](F[(1,2)] P)", "G[(1,2)] P | X[(1,2)] P", "C{2}[(0,1)] P"] {
            let f = parse_formula(src).unwrap();
            let r = rewrite_to_unilateral(&f).unwrap();
            assert!(all_unilateral(&r.output), "{src}");
            assert!(validate_formula(&r.output, ValidationPolicy::strict()).is_ok());
            let spec = condition_spec(&r.side_conditions);
            agree_at_first(&f, &r.output, &spec, 4, 77);
        }
        let nested = rewrite_to_unilateral(&parse_formula("C{2}[(1,2)](F[(1,2)] P)").unwrap()).unwrap();
        let inner_psi = nested.side_conditions.iter().find_map(|c| match c {
            SideCondition::C1 { psi, .. } => Some(psi.clone()),
            _ => None,
        });
        assert!(all_unilateral(&inner_psi.unwrap()));
        for bad in ["C{2}[(1,3)] P", "Pn{2}[(1,2)](P, Q)", "F[(1/2,2)] P"] {
            assert!(rewrite_to_unilateral(&parse_formula(bad).unwrap()).is_err(), "{bad}");
        }
    }
}
