//! Formula AST with shared subterms.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::automata::Nfa;
use crate::interval::{Interval, Rat};

pub type F = Arc<Formula>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    Atom(String),
    Not(F),
    And(F, F),
    Or(F, F),
    Until(Interval, F, F),
    Next(Interval, F),
    Eventually(Interval, F),
    Globally(Interval, F),
    WeakEventually(Interval, F),
    Once(Interval, F),
    Count(usize, Interval, F),
    Pnueli(usize, Interval, Vec<F>),
    AutoMod(Arc<Nfa>, Interval, Vec<F>),
}

use Formula::*;

pub fn tt() -> F {
    Arc::new(True)
}

pub fn ff() -> F {
    not(tt())
}

pub fn atom(p: &str) -> F {
    Arc::new(Atom(p.to_string()))
}

pub fn not(f: F) -> F {
    Arc::new(Not(f))
}

pub fn and(f: F, g: F) -> F {
    Arc::new(And(f, g))
}

pub fn or(f: F, g: F) -> F {
    Arc::new(Or(f, g))
}

pub fn implies(f: F, g: F) -> F {
    or(not(f), g)
}

/// Left-nested conjunction; `true` when empty.
pub fn and_all(fs: impl IntoIterator<Item = F>) -> F {
    fs.into_iter().reduce(and).unwrap_or_else(tt)
}

/// Left-nested disjunction; `false` when empty.
pub fn or_all(fs: impl IntoIterator<Item = F>) -> F {
    fs.into_iter().reduce(or).unwrap_or_else(ff)
}

pub fn until(i: Interval, f: F, g: F) -> F {
    Arc::new(Until(i, f, g))
}

pub fn next(i: Interval, f: F) -> F {
    Arc::new(Next(i, f))
}

pub fn eventually(i: Interval, f: F) -> F {
    Arc::new(Eventually(i, f))
}

pub fn globally(i: Interval, f: F) -> F {
    Arc::new(Globally(i, f))
}

pub fn weak_eventually(i: Interval, f: F) -> F {
    Arc::new(WeakEventually(i, f))
}

pub fn once(i: Interval, f: F) -> F {
    Arc::new(Once(i, f))
}

pub fn count(k: usize, i: Interval, f: F) -> F {
    Arc::new(Count(k, i, f))
}

pub fn pnueli(k: usize, i: Interval, args: Vec<F>) -> F {
    Arc::new(Pnueli(k, i, args))
}

pub fn automod(a: Arc<Nfa>, i: Interval, args: Vec<F>) -> F {
    Arc::new(AutoMod(a, i, args))
}

/// `X_{>0} true`: the next event exists and is strictly later.
pub fn next_later() -> F {
    next(Interval::positive(), tt())
}

/// `F_{<=0} f`: f at a strictly later position with the same timestamp.
pub fn same_time(f: F) -> F {
    eventually(Interval::zero(), f)
}

impl Formula {
    pub fn interval(&self) -> Option<&Interval> {
        match self {
            Until(i, ..) | Next(i, _) | Eventually(i, _) | Globally(i, _) | WeakEventually(i, _)
            | Once(i, _) | Count(_, i, _) | Pnueli(_, i, _) | AutoMod(_, i, _) => Some(i),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&F> {
        match self {
            True | Atom(_) => vec![],
            Not(f) | Next(_, f) | Eventually(_, f) | Globally(_, f) | WeakEventually(_, f)
            | Once(_, f) | Count(_, _, f) => vec![f],
            And(f, g) | Or(f, g) | Until(_, f, g) => vec![f, g],
            Pnueli(_, _, a) | AutoMod(_, _, a) => a.iter().collect(),
        }
    }

    pub fn is_modal(&self) -> bool {
        self.interval().is_some()
    }
}

/// Visits each distinct node (by pointer) once, children before parents.
pub fn visit_dag(f: &F, mut visit: impl FnMut(&F)) {
    let mut seen: HashSet<*const Formula> = HashSet::new();
    let mut stack: Vec<(&F, bool)> = vec![(f, false)];
    while let Some((g, expanded)) = stack.pop() {
        let p = Arc::as_ptr(g);
        if expanded {
            visit(g);
            continue;
        }
        if !seen.insert(p) {
            continue;
        }
        stack.push((g, true));
        for c in g.children().into_iter().rev() {
            if !seen.contains(&Arc::as_ptr(c)) {
                stack.push((c, false));
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeStats {
    /// Structurally distinct subformulas.
    pub dag_nodes: usize,
    /// Nodes of the fully expanded tree (saturating).
    pub tree_nodes: u128,
}

impl fmt::Display for SizeStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dag={} tree={}", self.dag_nodes, self.tree_nodes)
    }
}

pub fn size_stats(f: &F) -> SizeStats {
    let mut tree: HashMap<*const Formula, u128> = HashMap::new();
    let mut interner = Interner::default();
    visit_dag(f, |g| {
        let t = g.children().iter().fold(1u128, |acc, c| acc.saturating_add(tree[&Arc::as_ptr(c)]));
        tree.insert(Arc::as_ptr(g), t);
    });
    interner.id(f);
    SizeStats { dag_nodes: interner.len(), tree_nodes: tree[&Arc::as_ptr(f)] }
}

/// Structural key of a node whose children are already interned.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Key {
    True,
    Atom(String),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Until(Interval, usize, usize),
    Next(Interval, usize),
    Eventually(Interval, usize),
    Globally(Interval, usize),
    WeakEventually(Interval, usize),
    Once(Interval, usize),
    Count(usize, Interval, usize),
    Pnueli(usize, Interval, Vec<usize>),
    AutoMod(usize, Interval, Vec<usize>),
}

/// Hash-consing: structurally equal subformulas get the same id, in time
/// linear in the number of distinct pointers.
#[derive(Default)]
pub struct Interner {
    by_ptr: HashMap<*const Formula, usize>,
    by_key: HashMap<Key, usize>,
    keys: Vec<Key>,
    nodes: Vec<F>,
    automata: Vec<Arc<Nfa>>,
}

impl Interner {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, id: usize) -> &Key {
        &self.keys[id]
    }

    pub fn node(&self, id: usize) -> &F {
        &self.nodes[id]
    }

    pub fn automaton(&self, idx: usize) -> &Arc<Nfa> {
        &self.automata[idx]
    }

    pub fn id(&mut self, f: &F) -> usize {
        let mut order = Vec::new();
        visit_dag(f, |g| order.push(g.clone()));
        for g in &order {
            let p = Arc::as_ptr(g);
            if self.by_ptr.contains_key(&p) {
                continue;
            }
            let c = |x: &F| self.by_ptr[&Arc::as_ptr(x)];
            let key = match &**g {
                True => Key::True,
                Atom(a) => Key::Atom(a.clone()),
                Not(x) => Key::Not(c(x)),
                And(x, y) => Key::And(c(x), c(y)),
                Or(x, y) => Key::Or(c(x), c(y)),
                Until(i, x, y) => Key::Until(i.clone(), c(x), c(y)),
                Next(i, x) => Key::Next(i.clone(), c(x)),
                Eventually(i, x) => Key::Eventually(i.clone(), c(x)),
                Globally(i, x) => Key::Globally(i.clone(), c(x)),
                WeakEventually(i, x) => Key::WeakEventually(i.clone(), c(x)),
                Once(i, x) => Key::Once(i.clone(), c(x)),
                Count(k, i, x) => Key::Count(*k, i.clone(), c(x)),
                Pnueli(k, i, xs) => Key::Pnueli(*k, i.clone(), xs.iter().map(c).collect()),
                AutoMod(a, i, xs) => {
                    let args = xs.iter().map(c).collect();
                    let ai = match self.automata.iter().position(|b| Arc::ptr_eq(a, b) || b == a) {
                        Some(n) => n,
                        None => {
                            self.automata.push(a.clone());
                            self.automata.len() - 1
                        }
                    };
                    Key::AutoMod(ai, i.clone(), args)
                }
            };
            let id = match self.by_key.get(&key) {
                Some(&id) => id,
                None => {
                    let id = self.keys.len();
                    self.by_key.insert(key.clone(), id);
                    self.keys.push(key);
                    self.nodes.push(g.clone());
                    id
                }
            };
            self.by_ptr.insert(p, id);
        }
        self.by_ptr[&Arc::as_ptr(f)]
    }
}

/// Structural equality without tree-sized recursion.
pub fn same(f: &F, g: &F) -> bool {
    let mut i = Interner::default();
    i.id(f) == i.id(g)
}

/// Largest finite interval constant.
pub fn max_const(f: &F) -> Rat {
    let mut m = Rat::from_integer(0);
    visit_dag(f, |g| {
        if let Some(i) = g.interval() {
            m = m.max(i.max_const());
        }
    });
    m
}

/// Modal nesting depth.
pub fn modal_depth(f: &F) -> usize {
    let mut depth: HashMap<*const Formula, usize> = HashMap::new();
    let mut last = 0;
    visit_dag(f, |g| {
        let c = g.children().iter().map(|c| depth[&Arc::as_ptr(c)]).max().unwrap_or(0);
        let d = c + usize::from(g.is_modal());
        depth.insert(Arc::as_ptr(g), d);
        last = d;
    });
    last
}

/// Every interval attached to a modality is unilateral.
pub fn all_unilateral(f: &F) -> bool {
    let mut ok = true;
    visit_dag(f, |g| {
        if let Some(i) = g.interval() {
            ok &= i.is_unilateral();
        }
    });
    ok
}

/// Distinct automata referenced by AutoMod nodes, in first-visit order.
pub fn automata_of(f: &F) -> Vec<Arc<Nfa>> {
    let mut out: Vec<Arc<Nfa>> = Vec::new();
    visit_dag(f, |g| {
        if let AutoMod(a, ..) = &**g {
            if !out.iter().any(|b| b == a) {
                out.push(a.clone());
            }
        }
    });
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidationPolicy {
    pub allow_singular_intervals: bool,
    pub allow_past: bool,
}

impl ValidationPolicy {
    /// Fragment accepted by the rewrites (Once allowed: the rational pass emits it).
    pub fn strict() -> Self {
        ValidationPolicy { allow_singular_intervals: false, allow_past: true }
    }

    pub fn future_only() -> Self {
        ValidationPolicy { allow_singular_intervals: false, allow_past: false }
    }

    pub fn permissive() -> Self {
        ValidationPolicy { allow_singular_intervals: true, allow_past: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: String,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self.reason, self.node)
    }
}

/// Display text cut at `limit` characters; printing stops early.
pub fn truncated(g: &Formula, limit: usize) -> String {
    struct Cap(String, usize);
    impl fmt::Write for Cap {
        fn write_str(&mut self, s: &str) -> fmt::Result {
            for ch in s.chars() {
                if self.0.len() >= self.1 {
                    return Err(fmt::Error);
                }
                self.0.push(ch);
            }
            Ok(())
        }
    }
    let mut c = Cap(String::new(), limit);
    if fmt::write(&mut c, format_args!("{g}")).is_err() {
        c.0.push_str("...");
    }
    c.0
}

fn head(g: &Formula) -> String {
    truncated(g, 60)
}

pub fn validate_formula(f: &F, p: ValidationPolicy) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    visit_dag(f, |g| {
        let mut bad = |reason: &str| out.push(Violation { node: head(g), reason: reason.to_string() });
        if let Some(i) = g.interval() {
            if i.is_singular() && !i.is_zero_point() && !p.allow_singular_intervals {
                bad("singular interval");
            }
        }
        match &**g {
            Once(..) if !p.allow_past => bad("past modality"),
            Count(k, ..) if *k == 0 => bad("count must be at least 1"),
            Pnueli(k, _, args) => {
                if *k == 0 {
                    bad("Pnueli arity must be at least 1");
                }
                if args.len() != *k {
                    bad("Pnueli argument count differs from k");
                }
            }
            AutoMod(a, _, args) if args.len() != a.arity() => bad("automaton arity mismatch"),
            _ => {}
        }
    });
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[F]) -> fmt::Result {
    write!(f, "(")?;
    for (n, a) in args.iter().enumerate() {
        if n > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{a}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Formula {
    /// Fully parenthesized; every modality shows its interval.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            True => write!(f, "true"),
            Atom(p) => write!(f, "{p}"),
            Not(g) => write!(f, "(!{g})"),
            And(g, h) => write!(f, "({g} & {h})"),
            Or(g, h) => write!(f, "({g} | {h})"),
            Until(i, g, h) => write!(f, "({g} U[{i}] {h})"),
            Next(i, g) => write!(f, "(X[{i}] {g})"),
            Eventually(i, g) => write!(f, "(F[{i}] {g})"),
            Globally(i, g) => write!(f, "(G[{i}] {g})"),
            WeakEventually(i, g) => write!(f, "(Fw[{i}] {g})"),
            Once(i, g) => write!(f, "(O[{i}] {g})"),
            Count(k, i, g) => write!(f, "(C{{{k}}}[{i}] {g})"),
            Pnueli(k, i, args) => {
                write!(f, "Pn{{{k}}}[{i}]")?;
                write_args(f, args)
            }
            AutoMod(a, i, args) => {
                write!(f, "A{{{}}}[{i}]", a.name())?;
                write_args(f, args)
            }
        }
    }
}

/// Same node kind with new children (in `children()` order).
pub fn with_children(f: &Formula, c: Vec<F>) -> F {
    let mut it = c.into_iter();
    let mut nx = || it.next().expect("child count");
    Arc::new(match f {
        True => True,
        Atom(p) => Atom(p.clone()),
        Not(_) => Not(nx()),
        And(..) => And(nx(), nx()),
        Or(..) => Or(nx(), nx()),
        Until(i, ..) => Until(i.clone(), nx(), nx()),
        Next(i, _) => Next(i.clone(), nx()),
        Eventually(i, _) => Eventually(i.clone(), nx()),
        Globally(i, _) => Globally(i.clone(), nx()),
        WeakEventually(i, _) => WeakEventually(i.clone(), nx()),
        Once(i, _) => Once(i.clone(), nx()),
        Count(k, i, _) => Count(*k, i.clone(), nx()),
        Pnueli(k, i, a) => Pnueli(*k, i.clone(), (0..a.len()).map(|_| nx()).collect()),
        AutoMod(a, i, xs) => AutoMod(a.clone(), i.clone(), (0..xs.len()).map(|_| nx()).collect()),
    })
}

/// Bottom-up rebuild: `g` receives each node and its already rebuilt
/// children. Shared subterms are rebuilt once.
pub fn rebuild<E>(f: &F, mut g: impl FnMut(&F, Vec<F>) -> Result<F, E>) -> Result<F, E> {
    let mut done: HashMap<*const Formula, F> = HashMap::new();
    let mut order = Vec::new();
    visit_dag(f, |x| order.push(x.clone()));
    for x in &order {
        let kids = x.children().iter().map(|c| done[&Arc::as_ptr(c)].clone()).collect();
        let y = g(x, kids)?;
        done.insert(Arc::as_ptr(x), y);
    }
    Ok(done[&Arc::as_ptr(f)].clone())
}
