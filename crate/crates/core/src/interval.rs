//! Closed `f64` intervals with outward rounding.
//!
//! Each arithmetic result is widened by one ulp on both sides. Results of
//! `powf` are widened by 64 ulps, which covers the library rounding error
//! plus the effect of a rounded exponent such as `1/p` for bases below
//! `e^100`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

const TRANSCENDENTAL_ULPS: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn down(v: f64, ulps: u32) -> f64 {
    (0..ulps).fold(v, |acc, _| acc.next_down())
}

fn up(v: f64, ulps: u32) -> f64 {
    (0..ulps).fold(v, |acc, _| acc.next_up())
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// Encloses the rational `num / den`.
    pub fn ratio(num: u64, den: u64) -> Self {
        let q = num as f64 / den as f64;
        Interval::new(down(q, 1), up(q, 1))
    }

    /// Encloses the integer `v`, which may not be representable.
    pub fn from_u64(v: u64) -> Self {
        let f = v as f64;
        if f as u128 == v as u128 {
            Interval::point(f)
        } else {
            Interval::new(down(f, 1), up(f, 1))
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            Interval::new(-self.hi, -self.lo)
        } else {
            Interval::new(0.0, self.hi.max(-self.lo))
        }
    }

    /// `self^e` for a nonnegative interval and exponent `e > 0`.
    pub fn powf(self, e: f64) -> Interval {
        debug_assert!(self.lo >= 0.0 && e > 0.0);
        let lo = if self.lo == 0.0 {
            0.0
        } else {
            down(self.lo.powf(e), TRANSCENDENTAL_ULPS).max(0.0)
        };
        Interval::new(lo, up(self.hi.powf(e), TRANSCENDENTAL_ULPS))
    }

    /// Multiplies by a nonnegative integer count.
    pub fn scale(self, k: u64) -> Interval {
        if k == 0 {
            return Interval::point(0.0);
        }
        self * Interval::from_u64(k)
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval::new(down(self.lo + rhs.lo, 1), up(self.hi + rhs.hi, 1))
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Interval) -> Interval {
        Interval::new(down(self.lo - rhs.hi, 1), up(self.hi - rhs.lo, 1))
    }
}

impl Mul for Interval {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        let c = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(down(lo, 1), up(hi, 1))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_encloses() {
        let r = Interval::ratio(7, 3);
        assert!(r.lo < 7.0 / 3.0 && 7.0 / 3.0 < r.hi);
        assert!(r.width() < 1e-14);
    }

    #[test]
    fn arithmetic_encloses_exact_values() {
        let a = Interval::ratio(1, 3);
        let b = Interval::ratio(2, 3);
        assert!((a + b).contains(1.0));
        assert!((a * Interval::point(3.0)).contains(1.0));
        assert!((b - a).contains(1.0 / 3.0));
        assert!((a - b).abs().contains(1.0 / 3.0));
        assert!(Interval::point(8.0).powf(1.0 / 3.0).contains(2.0));
        assert_eq!(Interval::point(0.0).powf(2.5).lo, 0.0);
    }

    #[test]
    fn large_integers_are_widened() {
        let big = (1u64 << 60) + 1;
        let i = Interval::from_u64(big);
        assert!(i.lo < i.hi);
        assert_eq!(Interval::from_u64(12), Interval::point(12.0));
    }
}
