//! Text syntax for formulas and the automata sidecar file.
//!
//! ```text
//! imp   := or ('->' imp)?
//! or    := and ('|' and)*
//! and   := until ('&' until)*
//! until := unary ('U' ival? until)?
//! unary := '!' unary | ('X'|'F'|'G'|'O'|'Fw') ival? unary | 'C{k}' ival? unary
//!        | 'Pn{k}' ival? args | 'A{name}' ival? args | 'true' | 'false' | ident | '(' imp ')'
//! ival  := '[' ('['|'(') num ',' (num|'inf') (']'|')') ']'
//! ```

use std::collections::HashMap;
use std::sync::Arc;

use crate::automata::{counting_nfa, until_nfa, Nfa};
use crate::error::{Error, Result};
use crate::formula::*;
use crate::interval::{parse_rat, Interval};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Sym(&'static str),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[st..i].to_string()), st));
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < b.len() && ((b[i] as char).is_ascii_digit() || b[i] == b'.' || b[i] == b'/') {
                i += 1;
            }
            out.push((Tok::Num(src[st..i].to_string()), st));
        } else if src[i..].starts_with("->") {
            out.push((Tok::Sym("->"), i));
            i += 2;
        } else {
            let s = match c {
                '(' => "(",
                ')' => ")",
                '[' => "[",
                ']' => "]",
                '{' => "{",
                '}' => "}",
                ',' => ",",
                '!' => "!",
                '&' => "&",
                '|' => "|",
                _ => return Err(Error::Parse(format!("unexpected character '{c}' at column {}", i + 1))),
            };
            out.push((Tok::Sym(s), i));
            i += 1;
        }
    }
    Ok(out)
}

const KEYWORDS: [&str; 11] = ["X", "F", "G", "O", "Fw", "U", "C", "Pn", "A", "true", "false"];

/// Named automata available to `A{name}`. `U` and `C<k>` are built in.
#[derive(Clone, Debug, Default)]
pub struct AutomataTable {
    table: HashMap<String, Arc<Nfa>>,
}

impl AutomataTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: Arc<Nfa>) {
        self.table.insert(a.name().to_string(), a);
    }

    pub fn get(&self, name: &str) -> Option<Arc<Nfa>> {
        if let Some(a) = self.table.get(name) {
            return Some(a.clone());
        }
        if name == "U" {
            return Some(Arc::new(until_nfa()));
        }
        let k: usize = name.strip_prefix('C')?.parse().ok()?;
        (k >= 1).then(|| Arc::new(counting_nfa(k)))
    }

    pub fn from_formula(f: &F) -> Self {
        let mut t = Self::new();
        for a in automata_of(f) {
            t.insert(a);
        }
        t
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
    automata: &'a AutomataTable,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |t| t.1) + 1
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse(format!("{msg} at column {}", self.col())))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == s)
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.is_sym(s) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{s}'"))
        }
    }

    fn number(&mut self) -> Result<crate::interval::Rat> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = n.clone();
                let r = parse_rat(&n).map_err(|_| Error::Parse(format!("bad number '{n}' at column {}", self.col())))?;
                self.pos += 1;
                Ok(r)
            }
            _ => self.err("expected number"),
        }
    }

    fn braced_int(&mut self) -> Result<usize> {
        self.expect("{")?;
        let k = match self.peek() {
            Some(Tok::Num(n)) => n.parse::<usize>().ok(),
            _ => None,
        };
        let Some(k) = k else { return self.err("expected integer") };
        self.pos += 1;
        self.expect("}")?;
        Ok(k)
    }

    fn interval(&mut self) -> Result<Interval> {
        if !self.is_sym("[") {
            return Ok(Interval::all());
        }
        self.pos += 1;
        let lc = if self.is_sym("[") {
            true
        } else if self.is_sym("(") {
            false
        } else {
            return self.err("expected '[' or '(' opening an interval");
        };
        self.pos += 1;
        let lo = self.number()?;
        self.expect(",")?;
        let hi = if self.is_ident("inf") {
            self.pos += 1;
            None
        } else {
            Some(self.number()?)
        };
        let hc = if self.is_sym("]") {
            true
        } else if self.is_sym(")") {
            false
        } else {
            return self.err("expected ']' or ')' closing an interval");
        };
        let col = self.col();
        self.pos += 1;
        self.expect("]")?;
        Interval::new(lo, lc, hi, hc).map_err(|e| Error::Parse(format!("{e} at column {col}")))
    }

    fn args(&mut self) -> Result<Vec<F>> {
        self.expect("(")?;
        let mut v = vec![self.imp()?];
        while self.is_sym(",") {
            self.pos += 1;
            v.push(self.imp()?);
        }
        self.expect(")")?;
        Ok(v)
    }

    fn imp(&mut self) -> Result<F> {
        let l = self.or()?;
        if self.is_sym("->") {
            self.pos += 1;
            let r = self.imp()?;
            return Ok(implies(l, r));
        }
        Ok(l)
    }

    fn or(&mut self) -> Result<F> {
        let mut l = self.and()?;
        while self.is_sym("|") {
            self.pos += 1;
            l = or(l, self.and()?);
        }
        Ok(l)
    }

    fn and(&mut self) -> Result<F> {
        let mut l = self.until()?;
        while self.is_sym("&") {
            self.pos += 1;
            l = and(l, self.until()?);
        }
        Ok(l)
    }

    fn until(&mut self) -> Result<F> {
        let l = self.unary()?;
        if self.is_ident("U") {
            self.pos += 1;
            let i = self.interval()?;
            let r = self.until()?;
            return Ok(until(i, l, r));
        }
        Ok(l)
    }

    fn unary(&mut self) -> Result<F> {
        let Some(t) = self.peek().cloned() else { return self.err("unexpected end of input") };
        match t {
            Tok::Sym("!") => {
                self.pos += 1;
                Ok(not(self.unary()?))
            }
            Tok::Sym("(") => {
                self.pos += 1;
                let f = self.imp()?;
                self.expect(")")?;
                Ok(f)
            }
            Tok::Ident(id) => {
                self.pos += 1;
                match id.as_str() {
                    "true" => Ok(tt()),
                    "false" => Ok(ff()),
                    "X" | "F" | "G" | "O" | "Fw" => {
                        let i = self.interval()?;
                        let f = self.unary()?;
                        Ok(match id.as_str() {
                            "X" => next(i, f),
                            "F" => eventually(i, f),
                            "G" => globally(i, f),
                            "O" => once(i, f),
                            _ => weak_eventually(i, f),
                        })
                    }
                    "C" => {
                        let k = self.braced_int()?;
                        let i = self.interval()?;
                        Ok(count(k, i, self.unary()?))
                    }
                    "Pn" => {
                        let k = self.braced_int()?;
                        let i = self.interval()?;
                        Ok(pnueli(k, i, self.args()?))
                    }
                    "A" => {
                        self.expect("{")?;
                        let name = match self.peek() {
                            Some(Tok::Ident(n)) => n.clone(),
                            _ => return self.err("expected automaton name"),
                        };
                        let col = self.col();
                        self.pos += 1;
                        self.expect("}")?;
                        let a = self.automata.get(&name).ok_or_else(|| {
                            Error::Parse(format!("unknown automaton '{name}' at column {col}"))
                        })?;
                        let i = self.interval()?;
                        Ok(automod(a, i, self.args()?))
                    }
                    "U" => {
                        self.pos -= 1;
                        self.err("'U' needs a left operand")
                    }
                    _ => Ok(atom(&id)),
                }
            }
            _ => self.err("unexpected token"),
        }
    }
}

pub fn parse_formula(src: &str) -> Result<F> {
    parse_formula_with(src, &AutomataTable::new())
}

pub fn parse_formula_with(src: &str, automata: &AutomataTable) -> Result<F> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, len: src.len(), automata };
    let f = p.imp()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// An interval as written inside the brackets of a modality, e.g. `(1,2]`.
pub fn parse_interval(src: &str) -> Result<Interval> {
    let wrapped = format!("[{src}]");
    let table = AutomataTable::new();
    let mut p = Parser { toks: lex(&wrapped)?, pos: 0, len: wrapped.len(), automata: &table };
    let i = p.interval()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(i)
}

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Parses sidecar blocks:
///
/// ```text
/// automaton NAME
/// arity N
/// states s0 s1 ...
/// initial s0
/// final s1 ...
/// trans s0 1 s1
/// end
/// ```
pub fn parse_automata(src: &str) -> Result<AutomataTable> {
    let mut table = AutomataTable::new();
    let mut cur: Option<Block> = None;
    #[derive(Default)]
    struct Block {
        name: String,
        arity: usize,
        states: Vec<String>,
        initial: Option<String>,
        finals: Vec<String>,
        trans: Vec<(String, usize, String)>,
    }
    let err = |ln: usize, m: &str| Error::Parse(format!("automata line {ln}: {m}"));
    for (n, raw) in src.lines().enumerate() {
        let ln = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let kw = it.next().unwrap_or_default();
        let rest: Vec<&str> = it.collect();
        if kw == "automaton" {
            if cur.is_some() {
                return Err(err(ln, "missing 'end'"));
            }
            let [name] = rest[..] else { return Err(err(ln, "expected one name")) };
            cur = Some(Block { name: name.to_string(), ..Default::default() });
            continue;
        }
        let Some(b) = cur.as_mut() else { return Err(err(ln, "expected 'automaton'")) };
        match kw {
            "arity" => {
                b.arity = rest.first().and_then(|s| s.parse().ok()).ok_or_else(|| err(ln, "bad arity"))?
            }
            "states" => b.states = rest.iter().map(|s| s.to_string()).collect(),
            "initial" => b.initial = rest.first().map(|s| s.to_string()),
            "final" => b.finals = rest.iter().map(|s| s.to_string()).collect(),
            "trans" => {
                let [p, s, q] = rest[..] else { return Err(err(ln, "expected 'trans p sym q'")) };
                let s = s.parse().map_err(|_| err(ln, "bad symbol"))?;
                b.trans.push((p.to_string(), s, q.to_string()));
            }
            "end" => {
                let b = cur.take().expect("open block");
                let idx = |s: &str| {
                    b.states.iter().position(|x| x == s).ok_or_else(|| err(ln, &format!("unknown state '{s}'")))
                };
                let init = idx(b.initial.as_deref().ok_or_else(|| err(ln, "missing initial"))?)?;
                let finals = b.finals.iter().map(|s| idx(s)).collect::<Result<Vec<_>>>()?;
                let trans = b
                    .trans
                    .iter()
                    .map(|(p, s, q)| Ok((idx(p)?, *s, idx(q)?)))
                    .collect::<Result<Vec<_>>>()?;
                let a = Nfa::with_names(b.name.clone(), b.arity, b.states.clone(), init, finals, trans)
                    .map_err(|e| err(ln, &e.to_string()))?;
                table.insert(Arc::new(a));
            }
            _ => return Err(err(ln, &format!("unknown keyword '{kw}'"))),
        }
    }
    if cur.is_some() {
        return Err(Error::Parse("automata: missing 'end' at end of file".into()));
    }
    Ok(table)
}

/// Sidecar text for the automata referenced by `f`.
pub fn render_automata(f: &F) -> String {
    automata_of(f).iter().map(|a| a.to_string()).collect::<Vec<_>>().join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{frac, rat};

    #[test]
    fn basic_forms() {
        let f = parse_formula("C{3}[(2,3)] P").unwrap();
        assert_eq!(*f, *count(3, Interval::open(2, 3), atom("P")));
        let g = parse_formula("F P").unwrap();
        assert_eq!(*g, *eventually(Interval::all(), atom("P")));
        let h = parse_formula("P -> Q").unwrap();
        assert_eq!(*h, *implies(atom("P"), atom("Q")));
        assert_eq!(*parse_formula("false").unwrap(), *ff());
        let i = parse_formula("F[(1/2,0.75]] P").unwrap();
        let iv = Interval::mk(frac(1, 2), false, Some(frac(3, 4)), true);
        assert_eq!(*i, *eventually(iv, atom("P")));
        let u = parse_formula("a U[[0,inf)] b & c").unwrap();
        assert_eq!(*u, *and(until(Interval::all(), atom("a"), atom("b")), atom("c")));
    }

    #[test]
    fn precedence() {
        let f = parse_formula("!a & b | c -> d").unwrap();
        let want = implies(or(and(not(atom("a")), atom("b")), atom("c")), atom("d"));
        assert_eq!(*f, *want);
    }

    #[test]
    fn automata_builtin() {
        let f = parse_formula("A{C3}[(2,3)](P, true)").unwrap();
        match &*f {
            Formula::AutoMod(a, i, args) => {
                assert_eq!(a.num_states(), 5);
                assert_eq!(*i, Interval::open(2, 3));
                assert_eq!(args.len(), 2);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn errors_have_columns() {
        let e = parse_formula("F[(2,1)] P").unwrap_err().to_string();
        assert!(e.contains("column"), "{e}");
        assert!(parse_formula("P &").is_err());
        assert!(parse_formula("A{nope}(P)").is_err());
        assert!(parse_formula("F[(1,inf]] P").is_err());
        assert!(parse_formula("P Q").is_err());
    }

    #[test]
    fn intervals_alone() {
        assert_eq!(parse_interval("(1,2]").unwrap(), Interval::mk(rat(1), false, Some(rat(2)), true));
        assert_eq!(parse_interval("[0,inf)").unwrap(), Interval::all());
        assert!(parse_interval("(2,1)").is_err());
        assert!(parse_interval("(1,2) x").is_err());
    }

    #[test]
    fn round_trip() {
        for s in [
            "Pn{2}[(1,2)](P, Q)",
            "(P U[(1,2)] Q) | G[[0,3]] !R",
            "O[(0,1/2)] P & Fw[(1,inf)] X[(0,inf)] true",
            "A{U}[[1,2)](a, b, true)",
        ] {
            let f = parse_formula(s).unwrap();
            let g = parse_formula(&f.to_string()).unwrap();
            assert_eq!(*f, *g, "{s}");
        }
        let _ = rat(0);
    }

    #[test]
    fn sidecar() {
        let a = Arc::new(counting_nfa(2).renamed("two"));
        let f = automod(a.clone(), Interval::all(), vec![atom("P"), tt()]);
        let text = render_automata(&f);
        let t = parse_automata(&text).unwrap();
        assert_eq!(*t.get("two").unwrap(), *a);
        let g = parse_formula_with(&f.to_string(), &t).unwrap();
        assert_eq!(*g, *f);
        assert!(parse_automata("automaton x\narity 1\nstates a\ninitial b\nend\n").is_err());
    }
}
