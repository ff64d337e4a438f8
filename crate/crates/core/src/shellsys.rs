//! Level recursion, shell and ball cardinalities, and the binary entropy
//! function.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::binomial::{binomial, partial_row_sum, BinomialRow};
use crate::error::{domain, Result};
use crate::pnorm::PNorm;

/// An exact nonnegative integer count.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BigCount(pub BigUint);

impl BigCount {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    /// `log2` of the count as an `f64`; `-inf` for zero.
    pub fn log2(&self) -> f64 {
        big_log2(&self.0)
    }

    /// `ceil(self / rhs)`. Panics if `rhs` is zero.
    pub fn div_ceil(&self, rhs: &BigCount) -> BigCount {
        BigCount(Integer::div_ceil(&self.0, &rhs.0))
    }
}

pub(crate) fn big_log2(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 64 {
        return v.to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.log2() + shift as f64
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for BigCount {
    type Err = num_bigint::ParseBigIntError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.parse().map(BigCount)
    }
}

// Decimal strings keep arbitrarily large counts intact in JSON.
impl Serialize for BigCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_str_radix(10))
    }
}

impl<'de> Deserialize<'de> for BigCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The shells `J_1, ..., J_r` for given `(p, n, m)`: `levels[0] = m` and each
/// following level is `floor(previous / 2^p)`, stopping before zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellSystem {
    pnorm: PNorm,
    n: u64,
    m: u64,
    levels: Vec<u64>,
}

impl ShellSystem {
    pub fn new(p: f64, n: u64, m: u64) -> Result<Self> {
        Self::build(PNorm::new(p)?, n, m)
    }

    pub fn build(pnorm: PNorm, n: u64, m: u64) -> Result<Self> {
        if m < 1 || m > n {
            return domain(format!("m must satisfy 1 <= m <= n, got m={m}, n={n}"));
        }
        let mut levels = vec![m];
        loop {
            let next = pnorm.floor_div_2p(*levels.last().unwrap());
            if next == 0 {
                break;
            }
            levels.push(next);
        }
        Ok(ShellSystem {
            pnorm,
            n,
            m,
            levels,
        })
    }

    pub fn pnorm(&self) -> &PNorm {
        &self.pnorm
    }

    pub fn p(&self) -> f64 {
        self.pnorm.p()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    /// Number of shells `r`.
    pub fn shell_count(&self) -> usize {
        self.levels.len()
    }

    /// Support size `m_i` of shell `i` (1-based).
    pub fn level(&self, shell: usize) -> Result<u64> {
        if shell == 0 || shell > self.levels.len() {
            return domain(format!(
                "shell index {shell} outside 1..={}",
                self.levels.len()
            ));
        }
        Ok(self.levels[shell - 1])
    }

    /// `|J_i| = C(n, m_i) * 2^{m_i}`.
    pub fn shell_size(&self, shell: usize) -> Result<BigCount> {
        Ok(shell_size(self.n, self.level(shell)?))
    }

    /// Number of points of shell `i` strictly inside the ball of radius
    /// `m^{1/p}` around a fixed point of the same shell.
    pub fn ball_size(&self, shell: usize) -> Result<BigCount> {
        Ok(ball_size_at_level(&self.pnorm, self.n, self.level(shell)?))
    }
}

/// `C(n, level) * 2^level`.
pub fn shell_size(n: u64, level: u64) -> BigCount {
    BigCount(binomial(n, level) << level)
}

/// Within one shell of support size `level`, a point at `t` moved support
/// positions and `x` sign flips on the common support lies at
/// `d_p^p = (m / level) * (2t + 2^p x)`. It is inside the ball iff
/// `2t + 2^p x < level`. Returns, for each `t`, the largest admissible `x`,
/// or an empty table past the last admissible `t`.
pub fn ball_thresholds(pnorm: &PNorm, level: u64) -> Vec<u64> {
    (0..)
        .map(|t: u64| 2 * t)
        .take_while(|&two_t| two_t < level)
        .map(|two_t| pnorm.max_multiple_below(level - two_t))
        .collect()
}

/// Ball cardinality for a shell with support size `level` in dimension `n`:
/// the sum over `2t + 2^p x < level` of
/// `C(level, t) C(n - level, t) C(level - t, x) 2^t`.
pub fn ball_size_at_level(pnorm: &PNorm, n: u64, level: u64) -> BigCount {
    debug_assert!(level >= 1 && level <= n);
    let outside = n - level;
    let mut choose_inside = BinomialRow::new(level);
    let mut choose_outside = BinomialRow::new(outside);
    let mut total = BigUint::zero();
    for (t, x_max) in ball_thresholds(pnorm, level).into_iter().enumerate() {
        let t = t as u64;
        if t > outside {
            break;
        }
        let flips = partial_row_sum(level - t, x_max);
        let term = choose_inside.value() * choose_outside.value() * flips;
        total += term << t;
        choose_inside.advance();
        choose_outside.advance();
    }
    BigCount(total)
}

/// Binary entropy `H(s) = -s log2 s - (1-s) log2 (1-s)`, zero at both ends.
pub fn entropy(sigma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&sigma) {
        return domain(format!("entropy argument must lie in [0, 1], got {sigma}"));
    }
    Ok(entropy_clamped(sigma))
}

/// [`entropy`] without the domain check; arguments are clamped to `[0, 1]`.
pub(crate) fn entropy_clamped(sigma: f64) -> f64 {
    if sigma <= 0.0 || sigma >= 1.0 || sigma.is_nan() {
        return 0.0;
    }
    let q = 1.0 - sigma;
    -(sigma * sigma.log2() + q * q.log2())
}
