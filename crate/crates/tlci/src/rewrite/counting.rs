//! Counting over unbounded intervals, modulo-k counters and rational
//! subdivision.

use std::sync::Arc;

use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::formula::*;
use crate::interval::{rat, Interval, Rat};

/// `S^1 = phi`, `S^{m+1} = phi & X F^w S^m`: `m` phi-positions starting here.
pub fn chain_from_here(m: usize, phi: &F) -> F {
    let mut s = phi.clone();
    for _ in 1..m {
        s = and(phi.clone(), next(Interval::all(), weak_eventually(Interval::all(), s)));
    }
    s
}

/// Replaces every `C^k_<a,inf) phi` by `F_<a,inf) S^k`.
pub fn eliminate_unbounded_counting(f: &F) -> F {
    rebuild::<()>(f, |node, kids| {
        Ok(match &**node {
            Formula::Count(k, i, _) if i.hi().is_none() => eventually(i.clone(), chain_from_here(*k, &kids[0])),
            _ => with_children(node, kids),
        })
    })
    .expect("infallible")
}

/// Residue automaton over `(arg, !arg)`: accepts when the run ends on an
/// arg-position whose index among arg-positions after the start is `r` mod `k`.
pub fn residue_nfa(k: usize, r: usize) -> Nfa {
    let c = |j: usize| 1 + j;
    let acc = k + 1;
    let mut t = vec![(0, 1, c(0)), (0, 2, c(0))];
    for j in 0..k {
        let nj = (j + 1) % k;
        t.push((c(j), 2, c(j)));
        t.push((c(j), 1, c(nj)));
        if nj == r % k {
            t.push((c(j), 1, acc));
        }
    }
    Nfa::new(format!("mod{k}r{r}"), 2, k + 2, 0, [acc], t).expect("well formed")
}

fn bilateral_nonsingular(i: &Interval, what: &str) -> Result<()> {
    if i.is_singular() {
        return Err(Error::Rewrite(format!("{what}: singular interval {i}")));
    }
    if i.is_unilateral() {
        return Err(Error::Rewrite(format!("{what}: interval {i} is unilateral; use the automaton modality directly")));
    }
    Ok(())
}

/// `C^k_I arg` as a conjunction of `k` residue automata. `drop_residue`
/// omits one conjunct (mutation testing only).
pub fn modulo_counter_rewrite_with(k: usize, i: &Interval, arg: &F, drop_residue: Option<usize>) -> Result<F> {
    if k == 0 {
        return Err(Error::Rewrite("mod-k: k must be positive".into()));
    }
    bilateral_nonsingular(i, "mod-k")?;
    let parts = (0..k)
        .filter(|r| Some(*r) != drop_residue)
        .map(|r| automod(Arc::new(residue_nfa(k, r)), i.clone(), vec![arg.clone(), not(arg.clone())]));
    Ok(and_all(parts))
}

pub fn modulo_counter_rewrite(k: usize, i: &Interval, arg: &F) -> Result<F> {
    modulo_counter_rewrite_with(k, i, arg, None)
}

fn iv(lo: Rat, lc: bool, hi: Rat, hc: bool) -> Interval {
    Interval::mk(lo, lc, Some(hi), hc)
}

/// `C^k_I arg` without counting, using past `O` and rational constants.
pub fn rational_rewrite(k: usize, i: &Interval, arg: &F) -> Result<F> {
    if k < 2 {
        return Err(Error::Rewrite("rational: k must be at least 2 (use F_I for k = 1)".into()));
    }
    bilateral_nonsingular(i, "rational")?;
    if k == 2 && !i.lo_closed() && !i.hi_closed() {
        return Ok(halves(i, arg));
    }
    Ok(cells(k, i, arg))
}

/// Three-disjunct split at the midpoint; exact on strictly increasing timestamps.
fn halves(i: &Interval, p: &F) -> F {
    let (a, b) = (i.lo(), i.hi().expect("bounded"));
    let m = (a + b) / rat(2);
    let h = (b - a) / rat(2);
    let left = iv(a, false, m, false);
    let right = iv(m, false, b, false);
    let near = iv(rat(0), false, h, false);
    or_all([
        eventually(left.clone(), and(p.clone(), eventually(near.clone(), p.clone()))),
        eventually(right.clone(), and(p.clone(), once(near, p.clone()))),
        and(eventually(left, p.clone()), eventually(right, p.clone())),
    ])
}

/// `m` occurrences within `J`, recursively.
fn count_free(m: usize, j: &Interval, p: &F) -> F {
    if m == 1 {
        eventually(j.clone(), p.clone())
    } else {
        cells(m, j, p)
    }
}

/// Subdivision of `I` into `2k` cells of width `|I|/2k`. Either all `k`
/// occurrences fit in one cell (chained `F_[0,w]` from the first one in a
/// left cell, chained `O_[0,w]` back from the last one in a right cell), or
/// an interior grid point splits them into two smaller counts.
fn cells(k: usize, i: &Interval, p: &F) -> F {
    let (a, b) = (i.lo(), i.hi().expect("bounded"));
    let n = 2 * k;
    let w = (b - a) / rat(n as i64);
    let g = |t: usize| a + w * rat(t as i64);
    let cell = |t: usize| {
        let lc = if t == 0 { i.lo_closed() } else { true };
        let hc = if t == n - 1 { i.hi_closed() } else { false };
        iv(g(t), lc, g(t + 1), hc)
    };
    let step = Interval::mk(rat(0), true, Some(w), true);
    let chain = |past: bool| {
        let mut c = p.clone();
        for _ in 1..k {
            let inner = if past { once(step.clone(), c) } else { eventually(step.clone(), c) };
            c = and(p.clone(), inner);
        }
        c
    };
    let forward = chain(false);
    let backward = chain(true);
    let mut parts = Vec::new();
    for t in 0..n {
        let body = if t < k { forward.clone() } else { backward.clone() };
        parts.push(eventually(cell(t), body));
    }
    for t in 1..n {
        let before = iv(a, i.lo_closed(), g(t), false);
        let after = iv(g(t), true, b, i.hi_closed());
        for m in 1..k {
            parts.push(and(count_free(m, &before, p), count_free(k - m, &after, p)));
        }
    }
    or_all(parts)
}
