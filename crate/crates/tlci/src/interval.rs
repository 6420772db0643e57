//! Intervals over non-negative rationals.

use std::fmt;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::Error;

pub type Rat = Ratio<i64>;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n)
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

/// An interval `<lo, hi>` with openness flags. `hi = None` is +infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rat,
    hi: Option<Rat>,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rat, lo_closed: bool, hi: Option<Rat>, hi_closed: bool) -> Result<Self, Error> {
        if lo.is_negative() {
            return Err(Error::Interval(format!("negative lower endpoint {lo}")));
        }
        match hi {
            None if hi_closed => {
                return Err(Error::Interval("infinite upper endpoint cannot be closed".into()))
            }
            Some(h) if h < lo => return Err(Error::Interval(format!("empty interval: {lo} > {h}"))),
            Some(h) if h == lo && !(lo_closed && hi_closed) => {
                return Err(Error::Interval(format!("empty interval at {lo}")))
            }
            _ => {}
        }
        Ok(Interval { lo, hi, lo_closed, hi_closed })
    }

    /// Panicking constructor for endpoints known to be valid.
    pub fn mk(lo: Rat, lo_closed: bool, hi: Option<Rat>, hi_closed: bool) -> Self {
        Self::new(lo, lo_closed, hi, hi_closed).expect("valid interval")
    }

    pub fn open(lo: i64, hi: i64) -> Self {
        Self::mk(rat(lo), false, Some(rat(hi)), false)
    }

    pub fn closed(lo: i64, hi: i64) -> Self {
        Self::mk(rat(lo), true, Some(rat(hi)), true)
    }

    /// `[0, inf)`.
    pub fn all() -> Self {
        Self::mk(Rat::zero(), true, None, false)
    }

    /// `(0, inf)`.
    pub fn positive() -> Self {
        Self::mk(Rat::zero(), false, None, false)
    }

    /// `[0, 0]`.
    pub fn zero() -> Self {
        Self::mk(Rat::zero(), true, Some(Rat::zero()), true)
    }

    pub fn lo(&self) -> Rat {
        self.lo
    }

    pub fn hi(&self) -> Option<Rat> {
        self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn contains(&self, t: Rat) -> bool {
        if t.is_negative() {
            return false;
        }
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = match self.hi {
            None => true,
            Some(h) if self.hi_closed => t <= h,
            Some(h) => t < h,
        };
        above && below
    }

    pub fn is_singular(&self) -> bool {
        self.hi == Some(self.lo)
    }

    pub fn is_unilateral(&self) -> bool {
        (self.lo.is_zero() && self.lo_closed) || self.hi.is_none()
    }

    pub fn is_bilateral(&self) -> bool {
        !self.is_unilateral()
    }

    /// `[0,0]`, the only singular interval definable without punctuality.
    pub fn is_zero_point(&self) -> bool {
        self.lo.is_zero() && self.hi == Some(Rat::zero())
    }

    /// Largest finite endpoint.
    pub fn max_const(&self) -> Rat {
        self.hi.unwrap_or(self.lo)
    }

    /// Length, `None` when unbounded.
    pub fn len(&self) -> Option<Rat> {
        self.hi.map(|h| h - self.lo)
    }

    pub fn has_integer_endpoints(&self) -> bool {
        self.lo.is_integer() && self.hi.is_none_or(|h| h.is_integer())
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lo_ok = self.lo > other.lo
            || (self.lo == other.lo && (other.lo_closed || !self.lo_closed));
        let hi_ok = match (self.hi, other.hi) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a < b || (a == b && (other.hi_closed || !self.hi_closed)),
        };
        lo_ok && hi_ok
    }

    pub fn with_lo_closed(&self, c: bool) -> Result<Self, Error> {
        Self::new(self.lo, c, self.hi, self.hi_closed)
    }

    pub fn with_hi_closed(&self, c: bool) -> Result<Self, Error> {
        Self::new(self.lo, self.lo_closed, self.hi, c)
    }
}

pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        match self.hi {
            None => write!(f, "{l}{},inf)", fmt_rat(&self.lo)),
            Some(h) => {
                let r = if self.hi_closed { ']' } else { ')' };
                write!(f, "{l}{},{}{r}", fmt_rat(&self.lo), fmt_rat(&h))
            }
        }
    }
}

/// Parses a nonnegative rational written as an integer, a decimal or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad number '{s}'"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q <= 0 || p < 0 {
            return Err(bad());
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if ip.is_empty() && fp.is_empty() {
            return Err(bad());
        }
        if !ip.chars().all(|c| c.is_ascii_digit()) || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        if fp.len() > 15 {
            return Err(bad());
        }
        let ip: i64 = if ip.is_empty() { 0 } else { ip.parse().map_err(|_| bad())? };
        let den = 10i64.pow(fp.len() as u32);
        let fv: i64 = if fp.is_empty() { 0 } else { fp.parse().map_err(|_| bad())? };
        let num = ip.checked_mul(den).and_then(|v| v.checked_add(fv)).ok_or_else(bad)?;
        return Ok(Rat::new(num, den));
    }
    if !s.chars().all(|c| c.is_ascii_digit()) || s.is_empty() {
        return Err(bad());
    }
    Ok(rat(s.parse().map_err(|_| bad())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn openness() {
        let i = Interval::open(2, 3);
        assert!(i.contains(frac(5, 2)));
        assert!(!i.contains(rat(2)));
        assert!(Interval::mk(rat(2), true, Some(rat(3)), false).contains(rat(2)));
        assert!(!i.contains(rat(-1)));
    }

    #[test]
    fn unit_boundary_against_cross_multiplication() {
        let i = Interval::open(0, 1);
        for (n, d) in [(1i64, 1i64), (999, 1000), (1000, 1000), (1, 1000), (0, 7), (7, 6)] {
            // n/d in (0,1) iff 0 < n and n < d (d > 0)
            assert_eq!(i.contains(frac(n, d)), 0 < n && n < d, "{n}/{d}");
        }
    }

    #[test]
    fn empty_rejected() {
        assert!(Interval::new(rat(2), false, Some(rat(2)), true).is_err());
        assert!(Interval::new(rat(3), true, Some(rat(2)), true).is_err());
        assert!(Interval::new(rat(0), true, None, true).is_err());
        assert!(Interval::new(rat(2), true, Some(rat(2)), true).unwrap().is_singular());
    }

    #[test]
    fn shapes() {
        assert!(Interval::all().is_unilateral());
        assert!(Interval::positive().is_unilateral());
        assert!(Interval::open(0, 1).is_bilateral());
        assert!(Interval::mk(rat(0), true, Some(rat(1)), false).is_unilateral());
        assert_eq!(Interval::mk(frac(1, 2), false, None, false).to_string(), "(1/2,inf)");
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_rat("0.5").unwrap(), frac(1, 2));
        assert_eq!(parse_rat("3/6").unwrap(), frac(1, 2));
        assert_eq!(parse_rat("12").unwrap(), rat(12));
        assert!(parse_rat("-1").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }
}
