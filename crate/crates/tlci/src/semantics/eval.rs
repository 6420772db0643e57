//! Pointwise semantics over finite timed words.
//!
//! Future modalities quantify over strictly later positions; the automaton
//! modality starts its run by consuming the current position. Count and
//! Pnueli are evaluated by direct enumeration of their definitions.

use crate::automata::Nfa;
use crate::error::{Error, Result};
use crate::formula::{Interner, Key, F};
use crate::interval::{Interval, Rat};
use crate::word::TimedWord;

/// Memoizing evaluator bound to one word. Values are indexed 0-based.
pub struct Evaluator<'w> {
    word: &'w TimedWord,
    times: Vec<Rat>,
    interner: Interner,
    values: Vec<Vec<bool>>,
}

/// True iff no later distance can be in `i` once `d` has been reached.
fn past_end(i: &Interval, d: Rat) -> bool {
    match i.hi() {
        None => false,
        Some(h) => d > h || (d == h && !i.hi_closed()),
    }
}

impl<'w> Evaluator<'w> {
    pub fn new(word: &'w TimedWord) -> Self {
        let times = word.events().iter().map(|e| e.time).collect();
        Evaluator { word, times, interner: Interner::default(), values: Vec::new() }
    }

    pub fn word(&self) -> &TimedWord {
        self.word
    }

    /// Truth values of `f` at every position.
    pub fn values(&mut self, f: &F) -> &[bool] {
        let id = self.interner.id(f);
        while self.values.len() < self.interner.len() {
            let next = self.values.len();
            let v = self.compute(next);
            self.values.push(v);
        }
        &self.values[id]
    }

    /// Truth at 1-based position `i`.
    pub fn at(&mut self, f: &F, i: usize) -> Result<bool> {
        if i == 0 || i > self.word.len() {
            return Err(Error::Position(i));
        }
        Ok(self.values(f)[i - 1])
    }

    fn compute(&self, id: usize) -> Vec<bool> {
        let n = self.times.len();
        let t = &self.times;
        let v = |c: usize| &self.values[c];
        match self.interner.key(id) {
            Key::True => vec![true; n],
            Key::Atom(p) => self.word.events().iter().map(|e| e.label.contains(p)).collect(),
            Key::Not(a) => v(*a).iter().map(|x| !x).collect(),
            Key::And(a, b) => v(*a).iter().zip(v(*b)).map(|(x, y)| *x && *y).collect(),
            Key::Or(a, b) => v(*a).iter().zip(v(*b)).map(|(x, y)| *x || *y).collect(),
            Key::Until(iv, a, b) => {
                let (a, b) = (v(*a), v(*b));
                (0..n)
                    .map(|i| {
                        for k in i + 1..n {
                            let d = t[k] - t[i];
                            if past_end(iv, d) {
                                return false;
                            }
                            if b[k] && iv.contains(d) {
                                return true;
                            }
                            if !a[k] {
                                return false;
                            }
                        }
                        false
                    })
                    .collect()
            }
            Key::Next(iv, a) => {
                let a = v(*a);
                (0..n).map(|i| i + 1 < n && a[i + 1] && iv.contains(t[i + 1] - t[i])).collect()
            }
            Key::Eventually(iv, a) => future_any(t, iv, v(*a), true),
            Key::Globally(iv, a) => future_any(t, iv, v(*a), false).into_iter().map(|x| !x).collect(),
            Key::WeakEventually(iv, a) => {
                let a = v(*a);
                let f = future_any(t, iv, a, true);
                (0..n).map(|i| a[i] || f[i]).collect()
            }
            Key::Once(iv, a) => {
                let a = v(*a);
                (0..n).map(|i| (0..i).any(|j| a[j] && iv.contains(t[i] - t[j]))).collect()
            }
            Key::Count(k, iv, a) => {
                let a = v(*a);
                (0..n)
                    .map(|i| {
                        let ps: Vec<usize> = (i + 1..n).filter(|&p| a[p]).collect();
                        (0..ps.len()).any(|s| {
                            s + k - 1 < ps.len()
                                && iv.contains(t[ps[s]] - t[i])
                                && iv.contains(t[ps[s + k - 1]] - t[i])
                        })
                    })
                    .collect()
            }
            Key::Pnueli(_, iv, args) => {
                let args: Vec<&Vec<bool>> = args.iter().map(|c| v(*c)).collect();
                (0..n)
                    .map(|i| {
                        (i + 1..n).any(|x1| {
                            if !args[0][x1] || !iv.contains(t[x1] - t[i]) {
                                return false;
                            }
                            // earliest completion minimizes the last distance
                            let mut last = x1;
                            for arg in &args[1..] {
                                match (last + 1..n).find(|&p| arg[p]) {
                                    Some(p) => last = p,
                                    None => return false,
                                }
                            }
                            iv.contains(t[last] - t[i])
                        })
                    })
                    .collect()
            }
            Key::AutoMod(ai, iv, args) => {
                let a = self.interner.automaton(*ai);
                let args: Vec<&Vec<bool>> = args.iter().map(|c| v(*c)).collect();
                (0..n).map(|i| automod_at(a, iv, &args, t, i)).collect()
            }
        }
    }
}

/// `any`: exists k > i with a[k] and t[k]-t[i] in iv (or, with `any=false`,
/// exists k > i in iv with !a[k]).
fn future_any(t: &[Rat], iv: &Interval, a: &[bool], any: bool) -> Vec<bool> {
    let n = t.len();
    (0..n)
        .map(|i| {
            for k in i + 1..n {
                let d = t[k] - t[i];
                if past_end(iv, d) {
                    break;
                }
                if a[k] == any && iv.contains(d) {
                    return true;
                }
            }
            false
        })
        .collect()
}

fn automod_at(a: &Nfa, iv: &Interval, args: &[&Vec<bool>], t: &[Rat], i: usize) -> bool {
    let mut cur = a.start_set();
    for l in i..t.len() {
        let d = t[l] - t[i];
        if past_end(iv, d) {
            return false;
        }
        let syms = (1..=args.len()).filter(|&s| args[s - 1][l]);
        cur = a.step(&cur, syms);
        if cur.is_empty() {
            return false;
        }
        if iv.contains(d) && cur.intersects(a.finals()) {
            return true;
        }
    }
    false
}

pub fn eval(w: &TimedWord, f: &F, i: usize) -> Result<bool> {
    Evaluator::new(w).at(f, i)
}

/// Truth values at all positions, 0-based.
pub fn eval_all(w: &TimedWord, f: &F) -> Vec<bool> {
    Evaluator::new(w).values(f).to_vec()
}
