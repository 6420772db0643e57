//! Random formulas for property tests.

use rand::Rng;

use crate::formula::*;
use crate::interval::{frac, rat, Interval};

/// Random non-singular interval with small endpoints (halves allowed).
pub fn random_interval<R: Rng>(rng: &mut R) -> Interval {
    loop {
        let lo = frac(rng.gen_range(0..=6), 2);
        let lc = rng.gen_bool(0.5);
        if rng.gen_bool(0.2) {
            return Interval::mk(lo, lc, None, false);
        }
        let hi = lo + frac(rng.gen_range(1..=5), 2);
        let hc = rng.gen_bool(0.5);
        if let Ok(i) = Interval::new(lo, lc, Some(hi), hc) {
            return i;
        }
    }
}

/// Random future MITL formula of modal depth at most `depth`.
pub fn random_mitl<R: Rng>(rng: &mut R, props: &[&str], depth: usize) -> F {
    let leaf = |rng: &mut R| {
        if rng.gen_bool(0.15) {
            tt()
        } else {
            atom(props[rng.gen_range(0..props.len())])
        }
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    match rng.gen_range(0..9) {
        0 => not(random_mitl(rng, props, depth)),
        1 => and(random_mitl(rng, props, depth - 1), random_mitl(rng, props, depth - 1)),
        2 => or(random_mitl(rng, props, depth - 1), random_mitl(rng, props, depth - 1)),
        3 => until(random_interval(rng), random_mitl(rng, props, depth - 1), random_mitl(rng, props, depth - 1)),
        4 => next(random_interval(rng), random_mitl(rng, props, depth - 1)),
        5 => eventually(random_interval(rng), random_mitl(rng, props, depth - 1)),
        6 => globally(random_interval(rng), random_mitl(rng, props, depth - 1)),
        7 => weak_eventually(random_interval(rng), random_mitl(rng, props, depth - 1)),
        _ => count(rng.gen_range(1..=3), random_interval(rng), random_mitl(rng, props, depth - 1)),
    }
}

/// Unilateral interval `[0, b>` with `b` in 1..=3.
pub fn random_prefix_interval<R: Rng>(rng: &mut R) -> Interval {
    Interval::mk(rat(0), true, Some(rat(rng.gen_range(1..=3))), rng.gen_bool(0.5))
}
