//! Finite automata over the alphabet `{1..n}`. Runs are over non-empty words.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// A set of automaton states as a bitset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(Vec<u64>);

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet(vec![0; n.div_ceil(64).max(1)])
    }

    pub fn singleton(n: usize, q: usize) -> Self {
        let mut s = Self::empty(n);
        s.insert(q);
        s
    }

    pub fn insert(&mut self, q: usize) {
        self.0[q / 64] |= 1 << (q % 64);
    }

    pub fn contains(&self, q: usize) -> bool {
        self.0[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn union_with(&mut self, o: &StateSet) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= *b;
        }
    }

    pub fn intersects(&self, o: &StateSet) -> bool {
        self.0.iter().zip(&o.0).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| wi * 64 + b)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Nfa {
    name: String,
    arity: usize,
    state_names: Vec<String>,
    initial: usize,
    finals: StateSet,
    transitions: Vec<(usize, usize, usize)>,
    /// `delta[q][s-1]` lists successors of `q` on symbol `s`.
    delta: Vec<Vec<Vec<usize>>>,
}

impl Nfa {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        states: usize,
        initial: usize,
        finals: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let names = (0..states).map(|q| format!("s{q}")).collect();
        Self::with_names(name, arity, names, initial, finals, transitions)
    }

    pub fn with_names(
        name: impl Into<String>,
        arity: usize,
        state_names: Vec<String>,
        initial: usize,
        finals: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let n = state_names.len();
        if arity == 0 {
            return Err(Error::Automaton("arity must be at least 1".into()));
        }
        if initial >= n {
            return Err(Error::Automaton("initial state out of range".into()));
        }
        let mut fs = StateSet::empty(n);
        for q in finals {
            if q >= n {
                return Err(Error::Automaton(format!("final state {q} out of range")));
            }
            fs.insert(q);
        }
        let set: BTreeSet<_> = transitions.into_iter().collect();
        let mut delta = vec![vec![Vec::new(); arity]; n];
        for &(p, s, q) in &set {
            if p >= n || q >= n {
                return Err(Error::Automaton("transition endpoint out of range".into()));
            }
            if s == 0 || s > arity {
                return Err(Error::Automaton(format!("symbol {s} outside 1..{arity}")));
            }
            delta[p][s - 1].push(q);
        }
        Ok(Nfa {
            name: name.into(),
            arity,
            state_names,
            initial,
            finals: fs,
            transitions: set.into_iter().collect(),
            delta,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(&self, name: impl Into<String>) -> Nfa {
        let mut a = self.clone();
        a.name = name.into();
        a
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.contains(q)
    }

    pub fn finals(&self) -> &StateSet {
        &self.finals
    }

    pub fn transitions(&self) -> &[(usize, usize, usize)] {
        &self.transitions
    }

    pub fn succ(&self, q: usize, sym: usize) -> &[usize] {
        &self.delta[q][sym - 1]
    }

    pub fn start_set(&self) -> StateSet {
        StateSet::singleton(self.num_states(), self.initial)
    }

    /// Successor set of `from` reading any symbol in `syms`.
    pub fn step(&self, from: &StateSet, syms: impl Iterator<Item = usize> + Clone) -> StateSet {
        let mut out = StateSet::empty(self.num_states());
        for q in from.iter() {
            for s in syms.clone() {
                for &r in self.succ(q, s) {
                    out.insert(r);
                }
            }
        }
        out
    }

    pub fn accepts(&self, word: &[usize]) -> Result<bool> {
        if let Some(&s) = word.iter().find(|&&s| s == 0 || s > self.arity) {
            return Err(Error::Automaton(format!("symbol {s} outside 1..{}", self.arity)));
        }
        if word.is_empty() {
            return Ok(false);
        }
        let mut cur = self.start_set();
        for &s in word {
            cur = self.step(&cur, std::iter::once(s));
            if cur.is_empty() {
                return Ok(false);
            }
        }
        Ok(cur.intersects(&self.finals))
    }

    pub fn is_deterministic(&self) -> bool {
        self.delta.iter().all(|row| row.iter().all(|v| v.len() <= 1))
    }
}

impl fmt::Display for Nfa {
    /// Sidecar block format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "automaton {}", self.name)?;
        writeln!(f, "arity {}", self.arity)?;
        writeln!(f, "states {}", self.state_names.join(" "))?;
        writeln!(f, "initial {}", self.state_names[self.initial])?;
        let fin: Vec<_> = self.finals.iter().map(|q| self.state_names[q].as_str()).collect();
        writeln!(f, "final {}", fin.join(" "))?;
        for &(p, s, q) in &self.transitions {
            writeln!(f, "trans {} {} {}", self.state_names[p], s, self.state_names[q])?;
        }
        writeln!(f, "end")
    }
}

/// A deterministic (possibly partial) automaton.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dfa(Nfa);

impl Dfa {
    pub fn from_nfa(a: Nfa) -> Result<Self> {
        if a.is_deterministic() {
            Ok(Dfa(a))
        } else {
            Err(Error::Automaton(format!("automaton {} is not deterministic", a.name)))
        }
    }

    pub fn nfa(&self) -> &Nfa {
        &self.0
    }

    pub fn into_nfa(self) -> Nfa {
        self.0
    }

    pub fn num_states(&self) -> usize {
        self.0.num_states()
    }

    pub fn delta(&self, q: usize, sym: usize) -> Option<usize> {
        self.0.succ(q, sym).first().copied()
    }
}

/// Subset construction. The start state is never merged with a later subset
/// and is non-final, since runs are over non-empty words.
pub fn determinize(a: &Nfa) -> Dfa {
    let mut ids: HashMap<StateSet, usize> = HashMap::new();
    let mut sets: Vec<StateSet> = vec![a.start_set()];
    let mut queue = VecDeque::from([0usize]);
    let mut trans = Vec::new();
    while let Some(i) = queue.pop_front() {
        for s in 1..=a.arity {
            let next = a.step(&sets[i], std::iter::once(s));
            if next.is_empty() {
                continue;
            }
            let j = *ids.entry(next.clone()).or_insert_with(|| {
                sets.push(next);
                queue.push_back(sets.len() - 1);
                sets.len() - 1
            });
            trans.push((i, s, j));
        }
    }
    let finals: Vec<usize> = (1..sets.len()).filter(|&i| sets[i].intersects(&a.finals)).collect();
    Dfa(Nfa::new(a.name.clone(), a.arity, sets.len(), 0, finals, trans).expect("well formed"))
}

/// Minimal partial DFA: reachable, co-reachable states only, partition refined.
pub fn minimize(d: &Dfa) -> Dfa {
    let a = &d.0;
    let n = a.num_states();
    let sink = n;
    let total = n + 1;
    let step = |q: usize, s: usize| if q == sink { sink } else { d.delta(q, s).unwrap_or(sink) };
    let mut class: Vec<usize> = (0..total).map(|q| usize::from(q < n && a.is_final(q))).collect();
    loop {
        let mut sig_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = vec![0; total];
        for q in 0..total {
            let sig = (class[q], (1..=a.arity).map(|s| class[step(q, s)]).collect());
            let len = sig_ids.len();
            next[q] = *sig_ids.entry(sig).or_insert(len);
        }
        let changed = sig_ids.len() != count_classes(&class);
        class = next;
        if !changed {
            break;
        }
    }
    let dead = class[sink];
    // renumber live, reachable classes in BFS order from the start
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut order = vec![a.initial];
    let mut trans = Vec::new();
    let mut finals = Vec::new();
    ids.insert(class[a.initial], 0);
    let mut i = 0;
    while i < order.len() {
        let q = order[i];
        let cq = ids[&class[q]];
        if a.is_final(q) {
            finals.push(cq);
        }
        for s in 1..=a.arity {
            let r = step(q, s);
            if class[r] == dead {
                continue;
            }
            let len = ids.len();
            let cr = *ids.entry(class[r]).or_insert_with(|| {
                order.push(r);
                len
            });
            trans.push((cq, s, cr));
        }
        i += 1;
    }
    Dfa(Nfa::new(a.name.clone(), a.arity, ids.len(), 0, finals, trans).expect("well formed"))
}

fn count_classes(c: &[usize]) -> usize {
    c.iter().collect::<BTreeSet<_>>().len()
}

pub fn determinize_minimize(a: &Nfa) -> Dfa {
    minimize(&determinize(a))
}

/// Copy of `a` whose initial state has no incoming edges and is not final.
fn fresh_start(a: &Nfa) -> (usize, Vec<(usize, usize, usize)>, Vec<usize>) {
    let n = a.num_states();
    let mut trans: Vec<_> = a.transitions.clone();
    for &(p, s, q) in &a.transitions {
        if p == a.initial {
            trans.push((n, s, q));
        }
    }
    let finals = a.finals.iter().collect();
    (n + 1, trans, finals)
}

fn shifted(t: &[(usize, usize, usize)], by: usize) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
    t.iter().map(move |&(p, s, q)| (p + by, s, q + by))
}

fn same_arity(a: &Nfa, b: &Nfa) -> Result<()> {
    if a.arity != b.arity {
        return Err(Error::Automaton(format!("arity mismatch {} vs {}", a.arity, b.arity)));
    }
    Ok(())
}

/// `L(a) . L(b)`.
pub fn concat(a: &Nfa, b: &Nfa) -> Result<Nfa> {
    same_arity(a, b)?;
    let (nb, tb, fb) = fresh_start(b);
    let bstart = b.num_states();
    let off = a.num_states();
    let mut trans: Vec<_> = a.transitions.clone();
    trans.extend(shifted(&tb, off));
    for &(p, s, q) in &a.transitions {
        if a.is_final(q) {
            // after a's last letter, b starts at its fresh initial state
            trans.push((p, s, bstart + off));
        }
    }
    let finals = fb.into_iter().filter(|&q| q != bstart).map(|q| q + off);
    Nfa::new("concat", a.arity, off + nb, a.initial, finals, trans)
}

pub fn union(a: &Nfa, b: &Nfa) -> Result<Nfa> {
    same_arity(a, b)?;
    let off = a.num_states();
    let start = off + b.num_states();
    let mut trans: Vec<_> = a.transitions.clone();
    trans.extend(shifted(&b.transitions, off));
    for &(p, s, q) in &a.transitions {
        if p == a.initial {
            trans.push((start, s, q));
        }
    }
    for &(p, s, q) in &b.transitions {
        if p == b.initial {
            trans.push((start, s, q + off));
        }
    }
    let finals = a.finals.iter().chain(b.finals.iter().map(|q| q + off));
    Nfa::new("union", a.arity, start + 1, start, finals, trans)
}

pub fn intersect(a: &Nfa, b: &Nfa) -> Result<Nfa> {
    same_arity(a, b)?;
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut order = vec![(a.initial, b.initial)];
    ids.insert((a.initial, b.initial), 0);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (p, q) = order[i];
        for s in 1..=a.arity {
            for &p2 in a.succ(p, s) {
                for &q2 in b.succ(q, s) {
                    let len = ids.len();
                    let j = *ids.entry((p2, q2)).or_insert_with(|| {
                        order.push((p2, q2));
                        len
                    });
                    trans.push((i, s, j));
                }
            }
        }
        i += 1;
    }
    let finals = (1..order.len()).filter(|&i| a.is_final(order[i].0) && b.is_final(order[i].1));
    Nfa::new("inter", a.arity, order.len(), 0, finals, trans)
}

/// Complement relative to the non-empty words.
pub fn complement(a: &Nfa) -> Nfa {
    let d = determinize(a);
    let n = d.num_states();
    let sink = n;
    let mut trans = Vec::new();
    for q in 0..=n {
        for s in 1..=a.arity {
            let r = if q == sink { sink } else { d.delta(q, s).unwrap_or(sink) };
            trans.push((q, s, r));
        }
    }
    let finals = (1..=n).filter(|&q| q == sink || !d.0.is_final(q));
    Nfa::new("compl", a.arity, n + 1, 0, finals, trans).expect("well formed")
}

pub fn difference(a: &Nfa, b: &Nfa) -> Result<Nfa> {
    intersect(a, &complement(b))
}

/// All non-empty words.
pub fn any_plus(arity: usize) -> Nfa {
    let t = (1..=arity).flat_map(|s| [(0, s, 1), (1, s, 1)]);
    Nfa::new("any", arity, 2, 0, [1], t).expect("well formed")
}

/// Words of length one over `syms`.
pub fn letters(arity: usize, syms: &[usize]) -> Nfa {
    Nfa::new("letters", arity, 2, 0, [1], syms.iter().map(|&s| (0, s, 1))).expect("well formed")
}

/// Re-labels transitions: symbol `t` of the result behaves like every old
/// symbol in `map(t)`.
pub fn relabel(a: &Nfa, new_arity: usize, map: impl Fn(usize) -> Vec<usize>) -> Nfa {
    let mut trans = Vec::new();
    for t in 1..=new_arity {
        for s in map(t) {
            for q in 0..a.num_states() {
                for &r in a.succ(q, s) {
                    trans.push((q, t, r));
                }
            }
        }
    }
    Nfa::with_names(a.name.clone(), new_arity, a.state_names.clone(), a.initial, a.finals.iter(), trans)
        .expect("well formed")
}

/// Language equality on all words up to `max_len` (test helper).
pub fn agree_up_to(a: &Nfa, b: &Nfa, max_len: usize) -> Option<Vec<usize>> {
    all_words(a.arity, max_len).into_iter().find(|w| a.accepts(w).unwrap() != b.accepts(w).unwrap())
}

/// All words of length 1..=max_len over `1..=arity`.
pub fn all_words(arity: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for s in 1..=arity {
                let mut v = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Fig. 2 shape: start, k hops entered on symbol 1 with loops on "any", final loop.
pub fn counting_nfa(k: usize) -> Nfa {
    assert!(k >= 1);
    let fin = k + 1;
    let mut t = vec![(0, 1, 1), (0, 2, 1)];
    for c in 1..=k {
        t.push((c, 1, c + 1));
        t.push((c, 2, c));
        t.push((c, 1, c));
    }
    t.push((fin, 1, fin));
    t.push((fin, 2, fin));
    // states: 0 start, 1 = zero hops made, ..., k+1 = k hops (final)
    Nfa::new(format!("C{k}"), 2, k + 2, 0, [fin], t).expect("well formed")
}

/// Until automaton over (phi1, phi2, any): first step on anything, phi1 loop,
/// phi2 exit into the final state.
pub fn until_nfa() -> Nfa {
    let t = [(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 1, 1), (1, 2, 2)];
    Nfa::new("U", 3, 3, 0, [2], t).expect("well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive run search, independent of the subset simulation.
    fn runs_accept(a: &Nfa, w: &[usize]) -> bool {
        fn go(a: &Nfa, q: usize, w: &[usize]) -> bool {
            match w.split_first() {
                None => a.is_final(q),
                Some((&s, rest)) => a
                    .transitions()
                    .iter()
                    .any(|&(p, t, r)| p == q && t == s && go(a, r, rest)),
            }
        }
        !w.is_empty() && go(a, a.initial(), w)
    }

    fn random_nfa(rng: &mut ChaCha8Rng, states: usize, arity: usize) -> Nfa {
        let mut t = Vec::new();
        for p in 0..states {
            for s in 1..=arity {
                for q in 0..states {
                    if rng.gen_bool(0.2) {
                        t.push((p, s, q));
                    }
                }
            }
        }
        let finals: Vec<usize> = (0..states).filter(|_| rng.gen_bool(0.3)).collect();
        Nfa::new("r", arity, states, 0, finals, t).unwrap()
    }

    #[test]
    fn fig2_examples() {
        let c3 = counting_nfa(3);
        assert_eq!(c3.num_states(), 5);
        assert!(c3.accepts(&[2, 1, 2, 1, 2, 1]).unwrap());
        assert!(!c3.accepts(&[1, 1]).unwrap());
        assert!(c3.accepts(&[3]).is_err());
    }

    #[test]
    fn counting_language() {
        let c2 = counting_nfa(2);
        for w in all_words(2, 5) {
            let ones = w[1..].iter().filter(|&&s| s == 1).count();
            assert_eq!(c2.accepts(&w).unwrap(), ones >= 2, "{w:?}");
        }
    }

    #[test]
    fn counting_minimal_size() {
        for k in 1..=4 {
            let a = counting_nfa(k);
            let m = determinize_minimize(&a);
            assert_eq!(m.num_states(), k + 2);
            assert_eq!(agree_up_to(&a, m.nfa(), 2 * k), None);
        }
    }

    #[test]
    fn until_dfa_same_language() {
        let a = until_nfa();
        let d = determinize_minimize(&a);
        assert_eq!(agree_up_to(&a, d.nfa(), 6), None);
    }

    #[test]
    fn minimize_idempotent() {
        let d = determinize_minimize(&counting_nfa(3));
        let d2 = minimize(&d);
        assert_eq!(d.num_states(), d2.num_states());
        assert_eq!(d, d2);
    }

    #[test]
    fn random_against_run_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let arity = rng.gen_range(1..=3);
            let a = random_nfa(&mut rng, 6, arity);
            let d = determinize_minimize(&a);
            let d0 = determinize(&a);
            for w in all_words(arity, 5) {
                let r = runs_accept(&a, &w);
                assert_eq!(a.accepts(&w).unwrap(), r);
                assert_eq!(d.nfa().accepts(&w).unwrap(), r);
                assert_eq!(d0.nfa().accepts(&w).unwrap(), r);
            }
            assert!(d.num_states() <= d0.num_states());
        }
    }

    #[test]
    fn algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let a = random_nfa(&mut rng, 4, 2);
            let b = random_nfa(&mut rng, 4, 2);
            let cat = concat(&a, &b).unwrap();
            let uni = union(&a, &b).unwrap();
            let int = intersect(&a, &b).unwrap();
            let com = complement(&a);
            for w in all_words(2, 5) {
                let ia = |v: &[usize]| runs_accept(&a, v);
                let ib = |v: &[usize]| runs_accept(&b, v);
                let split = (1..w.len()).any(|i| ia(&w[..i]) && ib(&w[i..]));
                assert_eq!(cat.accepts(&w).unwrap(), split, "concat {w:?}");
                assert_eq!(uni.accepts(&w).unwrap(), ia(&w) || ib(&w));
                assert_eq!(int.accepts(&w).unwrap(), ia(&w) && ib(&w));
                assert_eq!(com.accepts(&w).unwrap(), !ia(&w));
            }
        }
    }

    #[test]
    fn minimal_size_is_canonical() {
        // two different NFAs for "ends with 1" minimize to the same size
        let a = Nfa::new("a", 2, 2, 0, [1], [(0, 1, 1), (0, 2, 0), (0, 1, 0), (1, 1, 1), (1, 2, 0)]).unwrap();
        let b = concat(&any_plus(2), &letters(2, &[1])).unwrap();
        let b = union(&b, &letters(2, &[1])).unwrap();
        assert_eq!(agree_up_to(&a, &b, 6), None);
        assert_eq!(determinize_minimize(&a).num_states(), determinize_minimize(&b).num_states());
    }
}
