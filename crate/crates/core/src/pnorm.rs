//! The exponent `p` of the norm together with a certified handle on `2^p`.
//!
//! Every exact decision in this crate that involves `2^p` has the shape
//! `lhs <=> k * 2^p` for nonnegative integers `lhs`, `k`. For integer `p`
//! that is a shift. Otherwise `2^p` is irrational, so equality never holds
//! for `k >= 1`, and the comparison is decided by enclosing `2^p * 2^bits`
//! between two integers and doubling `bits` until the enclosure separates
//! the two sides.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// Fraction bits carried by an `f64` with `p >= 1`.
const FRAC_BITS: u32 = 52;
const DEFAULT_BITS: u32 = 128;

/// Default ceiling for precision escalation, in bits.
pub const DEFAULT_MAX_BITS: u32 = 1 << 16;

static MAX_BITS_OVERRIDE: AtomicU32 = AtomicU32::new(DEFAULT_MAX_BITS);

/// Sets the escalation ceiling used by [`PNorm::new`] for the rest of the
/// process.
pub fn set_default_max_bits(bits: u32) {
    MAX_BITS_OVERRIDE.store(bits, AtomicOrdering::Relaxed);
}

pub fn default_max_bits() -> u32 {
    MAX_BITS_OVERRIDE.load(AtomicOrdering::Relaxed)
}

/// Largest accepted `p`.
pub const MAX_P: f64 = 65536.0;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Enclosure {
    bits: u32,
    lo: BigUint,
    hi: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum PowRepr {
    Integer(u32),
    Irrational {
        int_part: u32,
        frac_units: u64,
        enclosure: Enclosure,
    },
}

/// The norm exponent `p >= 1` with `2^p` cached as an `f64` and as a
/// certified integer enclosure.
#[derive(Clone, PartialEq)]
pub struct PNorm {
    p: f64,
    two_pow_p: f64,
    repr: PowRepr,
    max_bits: u32,
}

impl fmt::Debug for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PNorm")
            .field("p", &self.p)
            .field("two_pow_p", &self.two_pow_p)
            .finish()
    }
}

impl PNorm {
    pub fn new(p: f64) -> Result<Self> {
        Self::with_max_bits(p, default_max_bits())
    }

    /// Like [`PNorm::new`] but with an explicit ceiling on the precision used
    /// when a comparison against `2^p` is close.
    pub fn with_max_bits(p: f64, max_bits: u32) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return domain(format!("p must be a finite real >= 1, got {p}"));
        }
        if p > MAX_P {
            return domain(format!("p must be at most {MAX_P}, got {p}"));
        }
        let max_bits = max_bits.max(DEFAULT_BITS);
        if p.fract() == 0.0 {
            let e = p as u32;
            return Ok(PNorm {
                p,
                two_pow_p: 2f64.powi(e as i32),
                repr: PowRepr::Integer(e),
                max_bits,
            });
        }
        let int_part = p.trunc() as u32;
        // p >= 1 has ulp >= 2^-52, so the fraction is an exact multiple of 2^-52
        let frac_units = ((p - p.trunc()) * (1u64 << FRAC_BITS) as f64) as u64;
        let enclosure = enclose(int_part, frac_units, DEFAULT_BITS);
        let two_pow_p = enclosure_to_f64(&enclosure);
        Ok(PNorm {
            p,
            two_pow_p,
            repr: PowRepr::Irrational {
                int_part,
                frac_units,
                enclosure,
            },
            max_bits,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `2^p` rounded to the nearest `f64`.
    pub fn two_pow_p(&self) -> f64 {
        self.two_pow_p
    }

    pub fn is_integer(&self) -> bool {
        matches!(self.repr, PowRepr::Integer(_))
    }

    /// The integer exponent when `p` is an integer.
    pub fn integer_exponent(&self) -> Option<u32> {
        match self.repr {
            PowRepr::Integer(e) => Some(e),
            PowRepr::Irrational { .. } => None,
        }
    }

    pub fn max_bits(&self) -> u32 {
        self.max_bits
    }

    /// Integers `(lo, hi, bits)` with `lo <= 2^p * 2^bits <= hi` at the cached
    /// precision. Both bounds are exact for integer `p`.
    pub fn enclosure(&self) -> (BigUint, BigUint, u32) {
        match &self.repr {
            PowRepr::Integer(e) => {
                let v = BigUint::one() << *e;
                (v.clone(), v, 0)
            }
            PowRepr::Irrational { enclosure, .. } => {
                (enclosure.lo.clone(), enclosure.hi.clone(), enclosure.bits)
            }
        }
    }

    /// Exact comparison of `lhs` against `k * 2^p`.
    pub fn cmp_multiple(&self, lhs: &BigUint, k: &BigUint) -> Ordering {
        if k.is_zero() {
            return lhs.cmp(k);
        }
        match &self.repr {
            PowRepr::Integer(e) => lhs.cmp(&(k << *e)),
            PowRepr::Irrational {
                int_part,
                frac_units,
                enclosure,
            } => {
                if let Some(ord) = decide(lhs, k, enclosure) {
                    return ord;
                }
                let mut bits = enclosure.bits;
                loop {
                    bits = bits.saturating_mul(2);
                    assert!(
                        bits <= self.max_bits,
                        "comparison against 2^{} undecided at {} bits",
                        self.p,
                        self.max_bits
                    );
                    let wider = enclose(*int_part, *frac_units, bits);
                    if let Some(ord) = decide(lhs, k, &wider) {
                        return ord;
                    }
                }
            }
        }
    }

    /// [`PNorm::cmp_multiple`] for machine integers.
    pub fn cmp_multiple_u64(&self, lhs: u64, k: u64) -> Ordering {
        if k == 0 {
            return lhs.cmp(&0);
        }
        if let PowRepr::Integer(e) = self.repr {
            if e >= 64 {
                return Ordering::Less;
            }
            return (lhs as u128).cmp(&((k as u128) << e));
        }
        self.cmp_multiple(&BigUint::from(lhs), &BigUint::from(k))
    }

    /// `floor(value / 2^p)`, exactly.
    pub fn floor_div_2p(&self, value: u64) -> u64 {
        if let PowRepr::Integer(e) = self.repr {
            return if e >= 64 { 0 } else { value >> e };
        }
        let guess = (value as f64 / self.two_pow_p).floor();
        let mut c = if guess.is_finite() && guess > 0.0 {
            guess.min(value as f64) as u64
        } else {
            0
        };
        while c > 0 && self.cmp_multiple_u64(value, c) == Ordering::Less {
            c -= 1;
        }
        while self.cmp_multiple_u64(value, c + 1) != Ordering::Less {
            c += 1;
        }
        c
    }

    /// Largest `x >= 0` with `x * 2^p < bound`. Requires `bound >= 1`.
    pub fn max_multiple_below(&self, bound: u64) -> u64 {
        debug_assert!(bound >= 1);
        let c = self.floor_div_2p(bound);
        if c > 0 && self.cmp_multiple_u64(bound, c) == Ordering::Equal {
            c - 1
        } else {
            c
        }
    }
}

fn decide(lhs: &BigUint, k: &BigUint, enc: &Enclosure) -> Option<Ordering> {
    // 2^p * 2^bits is irrational, so lo < it < hi strictly
    let scaled = lhs << enc.bits;
    if scaled <= k * &enc.lo {
        Some(Ordering::Less)
    } else if scaled >= k * &enc.hi {
        Some(Ordering::Greater)
    } else {
        None
    }
}

fn ceil_sqrt(x: &BigUint) -> BigUint {
    let s = x.sqrt();
    if &(&s * &s) < x {
        s + 1u32
    } else {
        s
    }
}

fn ceil_shr(x: &BigUint, bits: u32) -> BigUint {
    let q = x >> bits;
    if &(&q << bits) < x {
        q + 1u32
    } else {
        q
    }
}

/// Encloses `2^(int_part + frac_units / 2^52) * 2^bits` between integers by
/// repeated floor/ceil square roots of 2 and products over the set fraction
/// bits. Floors stay below and ceilings stay above at every step.
fn enclose(int_part: u32, frac_units: u64, bits: u32) -> Enclosure {
    let mut root_lo = BigUint::from(2u32) << bits;
    let mut root_hi = root_lo.clone();
    let mut lo = BigUint::one() << bits;
    let mut hi = lo.clone();
    for j in 1..=FRAC_BITS {
        root_lo = (&root_lo << bits).sqrt();
        root_hi = ceil_sqrt(&(&root_hi << bits));
        if (frac_units >> (FRAC_BITS - j)) & 1 == 1 {
            lo = (&lo * &root_lo) >> bits;
            hi = ceil_shr(&(&hi * &root_hi), bits);
        }
    }
    Enclosure {
        bits,
        lo: lo << int_part,
        hi: hi << int_part,
    }
}

fn enclosure_to_f64(enc: &Enclosure) -> f64 {
    let mid: BigUint = (&enc.lo + &enc.hi) >> 1u32;
    let v = mid.to_f64().unwrap_or(f64::INFINITY);
    v * 2f64.powi(-(enc.bits as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_p() {
        assert!(PNorm::new(0.5).is_err());
        assert!(PNorm::new(f64::NAN).is_err());
        assert!(PNorm::new(1.0).is_ok());
    }

    #[test]
    fn two_pow_p_within_one_ulp() {
        for &p in &[1.0, 1.5, 2.0, 2.1, 2.2, 3.0, 3.7, 5.9] {
            let pn = PNorm::new(p).unwrap();
            let reference = 2f64.powf(p);
            let ulp = reference.next_up() - reference;
            assert!((pn.two_pow_p() - reference).abs() <= ulp, "p={p}");
        }
    }

    #[test]
    fn enclosure_brackets_float_value() {
        let pn = PNorm::new(2.1).unwrap();
        let (lo, hi, bits) = pn.enclosure();
        assert!(lo < hi);
        let scale = 2f64.powi(bits as i32);
        let v = 2f64.powf(2.1);
        assert!((lo.to_f64().unwrap() / scale - v).abs() < 1e-14);
        assert!((hi.to_f64().unwrap() / scale - v).abs() < 1e-14);
        // width of a few units at 128 bits
        assert!((&hi - &lo) < BigUint::from(1u64 << 16));
    }

    #[test]
    fn floor_div_examples() {
        assert_eq!(PNorm::new(3.0).unwrap().floor_div_2p(9), 1);
        assert_eq!(PNorm::new(2.1).unwrap().floor_div_2p(100), 23);
        assert_eq!(PNorm::new(2.0).unwrap().floor_div_2p(4), 1);
        assert_eq!(PNorm::new(2.0).unwrap().floor_div_2p(3), 0);
        assert_eq!(PNorm::new(1.0).unwrap().floor_div_2p(7), 3);
        assert_eq!(PNorm::new(70.0).unwrap().floor_div_2p(u64::MAX), 0);
    }

    #[test]
    fn floor_div_matches_float_away_from_boundaries() {
        for &p in &[1.3, 1.5, 2.1, 2.5, 3.3] {
            let pn = PNorm::new(p).unwrap();
            let t = 2f64.powf(p);
            for v in 0..5000u64 {
                let q = v as f64 / t;
                if (q - q.round()).abs() > 1e-9 {
                    assert_eq!(pn.floor_div_2p(v), q.floor() as u64, "p={p} v={v}");
                }
            }
        }
    }

    #[test]
    fn integer_p_boundaries_are_exact() {
        let pn = PNorm::new(2.0).unwrap();
        assert_eq!(pn.cmp_multiple_u64(8, 2), Ordering::Equal);
        assert_eq!(pn.cmp_multiple_u64(7, 2), Ordering::Less);
        assert_eq!(pn.max_multiple_below(8), 1);
        assert_eq!(pn.max_multiple_below(9), 2);
        assert_eq!(pn.max_multiple_below(1), 0);
        let big = PNorm::new(64.0).unwrap();
        assert_eq!(big.cmp_multiple_u64(u64::MAX, 1), Ordering::Less);
    }

    #[test]
    fn escalation_separates_near_ties() {
        // p = log2(3) + tiny: 2^p is just above 3, so 3 < 2^p
        let p = 3f64.log2().next_up();
        let pn = PNorm::new(p).unwrap();
        let exact = 2f64.powf(p);
        let expected = if exact > 3.0 {
            Ordering::Less
        } else {
            Ordering::Greater
        };
        assert_eq!(pn.cmp_multiple_u64(3, 1), expected);
        // a near-tie far down in the fraction still resolves
        let pn = PNorm::with_max_bits(1.0 + f64::EPSILON, 1 << 12).unwrap();
        assert_eq!(pn.cmp_multiple_u64(2, 1), Ordering::Less);
        assert_eq!(pn.floor_div_2p(2), 0);
    }

    #[test]
    fn escalation_resolves_huge_operands() {
        let pn = PNorm::new(2.1).unwrap();
        let PowRepr::Irrational {
            int_part,
            frac_units,
            ..
        } = pn.repr
        else {
            unreachable!()
        };
        let fine = enclose(int_part, frac_units, 1024);
        let k = BigUint::one() << 300u32;
        // lhs = floor(k * 2^p) needs far more than the cached 128 bits
        let lhs = (&k * &fine.lo) >> 1024u32;
        assert_eq!(pn.cmp_multiple(&lhs, &k), Ordering::Less);
        assert_eq!(pn.cmp_multiple(&(lhs + 1u32), &k), Ordering::Greater);
    }
}
