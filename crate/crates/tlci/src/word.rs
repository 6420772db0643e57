//! Finite timed words.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interval::{fmt_rat, parse_rat, rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    pub label: BTreeSet<String>,
    pub time: Rat,
}

impl Event {
    pub fn new(time: Rat, props: &[&str]) -> Self {
        Event { label: props.iter().map(|p| p.to_string()).collect(), time }
    }

    pub fn empty(time: Rat) -> Self {
        Event { label: BTreeSet::new(), time }
    }
}

/// Nonempty, timestamps nondecreasing and nonnegative. Positions are 1-based
/// in the public API.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TimedWord {
    events: Vec<Event>,
}

impl TimedWord {
    pub fn new(events: Vec<Event>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::Word { line: 0, msg: "word must have at least one event".into() });
        }
        for (n, e) in events.iter().enumerate() {
            if e.time.is_negative() {
                return Err(Error::Word { line: n + 1, msg: "negative timestamp".into() });
            }
            if n > 0 && e.time < events[n - 1].time {
                return Err(Error::Word { line: n + 1, msg: "timestamps must be nondecreasing".into() });
            }
        }
        Ok(TimedWord { events })
    }

    /// Convenience for tests: `(time, props)` pairs.
    pub fn from_pairs(pairs: &[(Rat, &[&str])]) -> Result<Self> {
        Self::new(pairs.iter().map(|(t, p)| Event::new(*t, p)).collect())
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Event at 1-based position `i`.
    pub fn event(&self, i: usize) -> &Event {
        &self.events[i - 1]
    }

    pub fn time(&self, i: usize) -> Rat {
        self.events[i - 1].time
    }

    pub fn last_time(&self) -> Rat {
        self.events[self.events.len() - 1].time
    }

    pub fn has_time(&self, t: Rat) -> bool {
        self.events.binary_search_by(|e| e.time.cmp(&t)).is_ok()
    }

    /// Removes the event at 1-based position `i` (None if it would empty the word).
    pub fn without(&self, i: usize) -> Option<TimedWord> {
        if self.len() == 1 {
            return None;
        }
        let mut ev = self.events.clone();
        ev.remove(i - 1);
        Some(TimedWord { events: ev })
    }

    pub fn with_label(&self, i: usize, label: BTreeSet<String>) -> TimedWord {
        let mut ev = self.events.clone();
        ev[i - 1].label = label;
        TimedWord { events: ev }
    }

    /// Appends empty events at unit spacing after the last event up to `horizon`.
    pub fn padded_to(&self, horizon: Rat) -> TimedWord {
        let mut ev = self.events.clone();
        let mut t = self.last_time() + rat(1);
        while t <= horizon {
            ev.push(Event::empty(t));
            t += rat(1);
        }
        TimedWord { events: ev }
    }
}

impl fmt::Display for TimedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.events {
            let lab = if e.label.is_empty() {
                "-".to_string()
            } else {
                e.label.iter().cloned().collect::<Vec<_>>().join(",")
            };
            writeln!(f, "{} {}", fmt_rat(&e.time), lab)?;
        }
        Ok(())
    }
}

pub fn render_timed_word(w: &TimedWord) -> String {
    w.to_string()
}

fn valid_prop(p: &str) -> bool {
    let mut c = p.chars();
    matches!(c.next(), Some(x) if x.is_ascii_alphabetic()) && c.all(|x| x.is_ascii_alphanumeric() || x == '_')
}

pub fn parse_timed_word(text: &str) -> Result<TimedWord> {
    let mut events: Vec<Event> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let ln = n + 1;
        let err = |msg: String| Error::Word { line: ln, msg };
        let mut parts = line.split_whitespace();
        let ts = parts.next().unwrap_or_default();
        let lab = parts.next().ok_or_else(|| err("expected '<timestamp> <label>'".into()))?;
        if parts.next().is_some() {
            return Err(err("trailing fields".into()));
        }
        if ts.starts_with('-') {
            return Err(err("negative timestamp".into()));
        }
        let time = parse_rat(ts).map_err(|_| err(format!("bad timestamp '{ts}'")))?;
        let mut label = BTreeSet::new();
        if lab != "-" {
            for p in lab.split(',') {
                if !valid_prop(p) {
                    return Err(err(format!("bad proposition '{p}'")));
                }
                label.insert(p.to_string());
            }
        }
        if let Some(prev) = events.last() {
            if time < prev.time {
                return Err(err("timestamps must be nondecreasing".into()));
            }
        }
        events.push(Event { label, time });
    }
    TimedWord::new(events)
}

/// Inserts `(empty, t)` after all events with timestamp `<= t`.
pub fn insert_empty_event(w: &TimedWord, t: Rat) -> TimedWord {
    let at = w.events.partition_point(|e| e.time <= t);
    let mut ev = w.events.clone();
    ev.insert(at, Event::empty(t.max(Rat::zero())));
    TimedWord { events: ev }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub event_count: usize,
    pub active_window: Rat,
    pub pad_to: Rat,
    pub props: Vec<String>,
    /// Per-proposition probability, aligned with `props`.
    pub density: Vec<f64>,
    pub allow_simultaneous: bool,
    /// Timestamps of labeled events are multiples of `1/grid`.
    pub grid: i64,
}

impl GenConfig {
    pub fn new(props: &[&str], event_count: usize, active_window: i64, pad_to: i64) -> Self {
        GenConfig {
            event_count,
            active_window: rat(active_window),
            pad_to: rat(pad_to),
            props: props.iter().map(|p| p.to_string()).collect(),
            density: vec![0.5; props.len()],
            allow_simultaneous: true,
            grid: 10,
        }
    }

    pub fn with_density(mut self, d: f64) -> Self {
        self.density = vec![d; self.props.len()];
        self
    }

    pub fn strictly_increasing(mut self) -> Self {
        self.allow_simultaneous = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Usage(format!("generator config: {m}")));
        if self.pad_to < self.active_window {
            return bad("pad_to must be at least active_window");
        }
        if self.active_window.is_negative() || self.grid < 1 {
            return bad("window must be nonnegative and grid positive");
        }
        if self.density.len() != self.props.len() || self.density.iter().any(|d| !(0.0..=1.0).contains(d)) {
            return bad("one density in [0,1] per proposition");
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!(
            "events={} window={} pad_to={} props={} density={:?} simultaneous={} grid={}",
            self.event_count,
            fmt_rat(&self.active_window),
            fmt_rat(&self.pad_to),
            self.props.join(","),
            self.density,
            self.allow_simultaneous,
            self.grid
        )
    }
}

/// Deterministic in `(cfg, seed)`. Labeled events lie on the `1/grid` lattice
/// inside `[0, active_window]`; empty padding follows at unit spacing.
pub fn generate_word(cfg: &GenConfig, seed: u64) -> TimedWord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slots = (cfg.active_window * rat(cfg.grid)).floor().to_integer().max(0) as usize + 1;
    let mut ticks: Vec<usize> = if cfg.allow_simultaneous {
        let mut v: Vec<usize> = Vec::with_capacity(cfg.event_count);
        for _ in 0..cfg.event_count {
            if !v.is_empty() && rng.gen_bool(0.15) {
                v.push(v[rng.gen_range(0..v.len())]);
            } else {
                v.push(rng.gen_range(0..slots));
            }
        }
        v
    } else {
        sample(&mut rng, slots, cfg.event_count.min(slots)).into_vec()
    };
    ticks.sort_unstable();
    let mut events: Vec<Event> = ticks
        .into_iter()
        .map(|t| {
            let label = cfg
                .props
                .iter()
                .zip(&cfg.density)
                .filter(|(_, d)| rng.gen_bool(**d))
                .map(|(p, _)| p.clone())
                .collect();
            Event { label, time: Rat::new(t as i64, cfg.grid) }
        })
        .collect();
    let mut t = events.last().map_or(Rat::zero(), |e| e.time + rat(1));
    while t <= cfg.pad_to || events.is_empty() {
        events.push(Event::empty(t));
        t += rat(1);
    }
    TimedWord { events }
}

/// Inserts empty events at every required anchor until the supplied
/// conditions hold. Insertions can change the truth of the condition
/// formulas, so the check is repeated; `cap` bounds the rounds.
pub fn repair_conditions(w: &TimedWord, spec: &crate::semantics::ConditionSpec, cap: usize) -> Result<TimedWord> {
    let mut cur = w.clone();
    for _ in 0..cap {
        let need: BTreeSet<Rat> = spec.check(&cur).into_iter().map(|v| v.need_anchor).collect();
        if need.is_empty() {
            return Ok(cur);
        }
        for t in need {
            if !cur.has_time(t) {
                cur = insert_empty_event(&cur, t);
            }
        }
    }
    if spec.check(&cur).is_empty() {
        Ok(cur)
    } else {
        Err(Error::RepairCap(cap))
    }
}

pub const DEFAULT_REPAIR_ROUNDS: usize = 10;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::frac;

    #[test]
    fn parse_naive_word() {
        let w = parse_timed_word("0 -\n0.5 P\n1.5 P\n2.5 P\n3.5 P").unwrap();
        assert_eq!(w.len(), 5);
        assert!(w.event(1).label.is_empty());
        assert_eq!(w.time(2), frac(1, 2));
        assert!(w.event(5).label.contains("P"));
    }

    #[test]
    fn parse_errors() {
        let w = parse_timed_word("0 P,Q").unwrap();
        assert_eq!(w.event(1).label.len(), 2);
        let e = parse_timed_word("1 P\n0.5 P").unwrap_err();
        assert_eq!(e, Error::Word { line: 2, msg: "timestamps must be nondecreasing".into() });
        assert!(matches!(parse_timed_word("-1 P"), Err(Error::Word { line: 1, .. })));
        assert!(parse_timed_word("# c\n0 P\nx Q").is_err());
        assert!(parse_timed_word("").is_err());
    }

    #[test]
    fn insert_after_equal() {
        let w = parse_timed_word("0 -\n1 P\n1 Q\n2 -").unwrap();
        let v = insert_empty_event(&w, rat(1));
        assert_eq!(v.len(), 5);
        assert!(v.event(4).label.is_empty() && v.time(4) == rat(1));
        let z = insert_empty_event(&w, rat(9));
        assert_eq!(z.time(5), rat(9));
    }

    #[test]
    fn generator() {
        let cfg = GenConfig::new(&["P"], 0, 3, 5);
        let w = generate_word(&cfg, 1);
        assert!(w.events().iter().all(|e| e.label.is_empty()));
        let cfg = GenConfig::new(&["P", "Q"], 12, 4, 9);
        assert_eq!(generate_word(&cfg, 42), generate_word(&cfg, 42));
        for s in 0..50 {
            let w = generate_word(&cfg, s);
            assert!(TimedWord::new(w.events().to_vec()).is_ok());
            assert!(w.last_time() <= rat(9) && w.last_time() + rat(1) > rat(9));
            assert_eq!(parse_timed_word(&render_timed_word(&w)).unwrap(), w);
        }
        let strict = cfg.clone().strictly_increasing();
        for s in 0..50 {
            let w = generate_word(&strict, s);
            assert!(w.events().windows(2).all(|p| p[0].time < p[1].time));
        }
    }

    #[test]
    fn density_statistics() {
        let cfg = GenConfig::new(&["P"], 1, 2, 2);
        let mut hits = 0;
        let n = 1000;
        for s in 0..n {
            hits += generate_word(&cfg, s).event(1).label.len();
        }
        let f = hits as f64 / n as f64;
        assert!((f - 0.5).abs() < 0.05, "{f}");
    }
}
