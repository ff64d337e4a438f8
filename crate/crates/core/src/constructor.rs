//! Explicit codes: shell enumeration, the greedy selection that realizes the
//! Gilbert-Varshamov count, and pairwise certification of the result.
//!
//! Points are kept combinatorially. A point of shell `i` is a support of
//! `m_i` coordinates and a sign on each; its nonzero coordinates all have
//! magnitude `(m / m_i)^{1/p}`, which is never materialized for comparisons
//! inside one shell.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, KissError, Result};
use crate::exactbounds::system_bound;
use crate::interval::Interval;
use crate::pnorm::PNorm;
use crate::shellsys::{ball_thresholds, shell_size, BigCount, ShellSystem};

/// Default ceiling on the number of points enumerated per shell.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Relative slack allowed below `m` for interval-certified distances.
pub const CERT_TOLERANCE: f64 = 1e-9;

/// A point of shell `shell` (1-based): sorted 0-based `support` coordinates,
/// and bit `k` of `signs` set when the coordinate `support[k]` is negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ShellPoint {
    pub shell: usize,
    pub support: Vec<u32>,
    pub signs: u64,
}

impl ShellPoint {
    pub fn is_negative(&self, k: usize) -> bool {
        (self.signs >> k) & 1 == 1
    }

    /// `+1`, `-1` or `0` for each of the `n` coordinates.
    pub fn sign_vector(&self, n: u64) -> Vec<i8> {
        let mut out = vec![0i8; n as usize];
        for (k, &c) in self.support.iter().enumerate() {
            out[c as usize] = if self.is_negative(k) { -1 } else { 1 };
        }
        out
    }

    fn packed(&self) -> (u128, u128) {
        let mut supp = 0u128;
        let mut neg = 0u128;
        for (k, &c) in self.support.iter().enumerate() {
            supp |= 1 << c;
            if self.is_negative(k) {
                neg |= 1 << c;
            }
        }
        (supp, neg)
    }
}

/// Overlap statistics of two points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Overlap {
    only_u: u64,
    only_v: u64,
    same_sign: u64,
    opposite_sign: u64,
}

fn overlap(u: &ShellPoint, v: &ShellPoint) -> Overlap {
    let mut o = Overlap::default();
    let (mut a, mut b) = (0, 0);
    while a < u.support.len() && b < v.support.len() {
        match u.support[a].cmp(&v.support[b]) {
            Ordering::Less => {
                o.only_u += 1;
                a += 1;
            }
            Ordering::Greater => {
                o.only_v += 1;
                b += 1;
            }
            Ordering::Equal => {
                if u.is_negative(a) == v.is_negative(b) {
                    o.same_sign += 1;
                } else {
                    o.opposite_sign += 1;
                }
                a += 1;
                b += 1;
            }
        }
    }
    o.only_u += (u.support.len() - a) as u64;
    o.only_v += (v.support.len() - b) as u64;
    o
}

/// Points of one shell in enumeration order: supports in colex order, and
/// for each support the sign patterns `0..2^{m_i}` in counter order.
pub struct ShellIter {
    shell: usize,
    n: u32,
    support: Vec<u32>,
    signs: u64,
    sign_limit: u64,
    done: bool,
}

impl ShellIter {
    fn new(shell: usize, n: u64, level: u64) -> Self {
        ShellIter {
            shell,
            n: n as u32,
            support: (0..level as u32).collect(),
            signs: 0,
            sign_limit: 1u64 << level,
            done: level > n,
        }
    }

    fn advance_support(&mut self) -> bool {
        let k = self.support.len();
        for j in 0..k {
            let limit = if j + 1 < k {
                self.support[j + 1]
            } else {
                self.n
            };
            if self.support[j] + 1 < limit {
                self.support[j] += 1;
                for (i, slot) in self.support[..j].iter_mut().enumerate() {
                    *slot = i as u32;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for ShellIter {
    type Item = ShellPoint;

    fn next(&mut self) -> Option<ShellPoint> {
        if self.done {
            return None;
        }
        let point = ShellPoint {
            shell: self.shell,
            support: self.support.clone(),
            signs: self.signs,
        };
        self.signs += 1;
        if self.signs == self.sign_limit {
            self.signs = 0;
            if !self.advance_support() {
                self.done = true;
            }
        }
        Some(point)
    }
}

fn check_cap(sys: &ShellSystem, shell: usize, cap: u64) -> Result<u64> {
    let level = sys.level(shell)?;
    let size = shell_size(sys.n(), level);
    if level > 63 || size.value() > &BigUint::from(cap) {
        return Err(KissError::CapExceeded {
            shell,
            size: size.to_string(),
            cap,
        });
    }
    Ok(level)
}

/// Lazily walks every point of shell `shell`.
pub fn shell_iter(sys: &ShellSystem, shell: usize, cap: u64) -> Result<ShellIter> {
    let level = check_cap(sys, shell, cap)?;
    Ok(ShellIter::new(shell, sys.n(), level))
}

/// All `C(n, m_i) 2^{m_i}` points of shell `shell`.
pub fn enumerate_shell(sys: &ShellSystem, shell: usize, cap: u64) -> Result<Vec<ShellPoint>> {
    Ok(shell_iter(sys, shell, cap)?.collect())
}

/// Same-shell distance data: `t` support positions of `u` missing from `v`,
/// `x` sign disagreements on the common support, and
/// `d_p^p = (m / m_i)(2t + 2^p x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SameShellDistance {
    pub t: u64,
    pub x: u64,
    /// The exact value when `p` is an integer.
    pub exact: Option<BigRational>,
    pub interval: Interval,
}

/// An `f64` interval around `2^p`.
pub fn two_pow_p_interval(pnorm: &PNorm) -> Interval {
    if let Some(e) = pnorm.integer_exponent() {
        if e < 1000 {
            return Interval::point(2f64.powi(e as i32));
        }
    }
    let (lo, hi, bits) = pnorm.enclosure();
    let scale = 2f64.powi(-(bits as i32));
    let lo = lo.to_f64().unwrap_or(f64::INFINITY) * scale;
    let hi = hi.to_f64().unwrap_or(f64::INFINITY) * scale;
    Interval::new(lo.next_down(), hi.next_up())
}

fn same_shell_value(sys: &ShellSystem, level: u64, t: u64, x: u64) -> Interval {
    let weight = Interval::from_u64(2 * t) + two_pow_p_interval(sys.pnorm()).scale(x);
    Interval::ratio(sys.m(), level) * weight
}

pub fn same_shell_dist_p_pow(
    u: &ShellPoint,
    v: &ShellPoint,
    sys: &ShellSystem,
) -> Result<SameShellDistance> {
    if u.shell != v.shell {
        return domain(format!(
            "same-shell distance needs one shell, got {} and {}",
            u.shell, v.shell
        ));
    }
    let level = sys.level(u.shell)?;
    let o = overlap(u, v);
    let (t, x) = (o.only_u, o.opposite_sign);
    let exact = sys.pnorm().integer_exponent().map(|e| {
        let weight = BigInt::from(2 * t) + (BigInt::from(x) << e);
        BigRational::new(BigInt::from(sys.m()) * weight, BigInt::from(level))
    });
    Ok(SameShellDistance {
        t,
        x,
        exact,
        interval: same_shell_value(sys, level, t, x),
    })
}

/// Encloses `d_p(u, v)^p` for points of different shells.
pub fn cross_shell_dist_p_pow(
    u: &ShellPoint,
    v: &ShellPoint,
    sys: &ShellSystem,
) -> Result<Interval> {
    if u.shell == v.shell {
        return domain("cross-shell distance needs two different shells");
    }
    let (lu, lv) = (sys.level(u.shell)?, sys.level(v.shell)?);
    Ok(cross_value(sys, lu, lv, overlap(u, v)))
}

fn cross_value(sys: &ShellSystem, lu: u64, lv: u64, o: Overlap) -> Interval {
    let p = sys.p();
    let wu = Interval::ratio(sys.m(), lu);
    let wv = Interval::ratio(sys.m(), lv);
    let a = wu.powf(1.0 / p);
    let b = wv.powf(1.0 / p);
    let mut total = wu.scale(o.only_u) + wv.scale(o.only_v);
    if o.same_sign > 0 {
        total = total + (a - b).abs().powf(p).scale(o.same_sign);
    }
    if o.opposite_sign > 0 {
        total = total + (a + b).powf(p).scale(o.opposite_sign);
    }
    total
}

/// Per-shell ball membership: `2t + 2^p x < m_i`.
struct BallTest {
    thresholds: Vec<u64>,
}

impl BallTest {
    fn new(pnorm: &PNorm, level: u64) -> Self {
        BallTest {
            thresholds: ball_thresholds(pnorm, level),
        }
    }

    fn inside(&self, t: u64, x: u64) -> bool {
        self.thresholds
            .get(t as usize)
            .is_some_and(|&xmax| x <= xmax)
    }
}

/// Scans shell `shell` in enumeration order and keeps each point that lies
/// outside the balls of all points kept so far.
pub fn greedy_code(sys: &ShellSystem, shell: usize, cap: u64) -> Result<Vec<ShellPoint>> {
    let level = check_cap(sys, shell, cap)?;
    let test = BallTest::new(sys.pnorm(), level);
    let mut kept: Vec<ShellPoint> = Vec::new();
    if sys.n() <= 128 {
        let mut packed: Vec<(u128, u128)> = Vec::new();
        for point in ShellIter::new(shell, sys.n(), level) {
            let (su, nu) = point.packed();
            let clear = packed.iter().all(|&(sv, nv)| {
                let t = (su & !sv).count_ones() as u64;
                let x = (su & sv & (nu ^ nv)).count_ones() as u64;
                !test.inside(t, x)
            });
            if clear {
                packed.push((su, nu));
                kept.push(point);
            }
        }
    } else {
        for point in ShellIter::new(shell, sys.n(), level) {
            let clear = kept.iter().all(|q| {
                let o = overlap(&point, q);
                !test.inside(o.only_u, o.opposite_sign)
            });
            if clear {
                kept.push(point);
            }
        }
    }
    Ok(kept)
}

/// `|B_i(u)|` by walking the whole shell.
pub fn brute_ball_count(
    sys: &ShellSystem,
    shell: usize,
    center: &ShellPoint,
    cap: u64,
) -> Result<u64> {
    let level = check_cap(sys, shell, cap)?;
    if center.shell != shell || center.support.len() as u64 != level {
        return domain("ball center must be a point of the requested shell");
    }
    let test = BallTest::new(sys.pnorm(), level);
    Ok(ShellIter::new(shell, sys.n(), level)
        .filter(|v| {
            let o = overlap(center, v);
            test.inside(o.only_u, o.opposite_sign)
        })
        .count() as u64)
}

/// An explicit code on the scaled sphere of radius `m^{1/p}` with its
/// certified minimum distance.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeCertificate {
    pub sys: ShellSystem,
    pub points: Vec<ShellPoint>,
    pub sizes_per_shell: Vec<usize>,
    /// Certified lower bound on `min d_p(u, v)^p` over distinct points.
    pub min_dist_p_pow: f64,
    /// The multi-shell Gilbert-Varshamov total the code must reach.
    pub guarantee: BigCount,
}

impl CodeCertificate {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn validate_point(sys: &ShellSystem, point: &ShellPoint) -> Result<()> {
    let level = sys.level(point.shell)?;
    if point.support.len() as u64 != level {
        return Err(KissError::Certification(format!(
            "point in shell {} has support size {}, expected {level}",
            point.shell,
            point.support.len()
        )));
    }
    if point.support.windows(2).any(|w| w[0] >= w[1]) {
        return Err(KissError::Certification(format!(
            "support {:?} is not strictly increasing",
            point.support
        )));
    }
    if point.support.last().is_some_and(|&c| c as u64 >= sys.n()) {
        return Err(KissError::Certification(format!(
            "support {:?} exceeds dimension {}",
            point.support,
            sys.n()
        )));
    }
    if level < 64 && point.signs >> level != 0 {
        return Err(KissError::Certification(format!(
            "sign bits {:#b} exceed support size {level}",
            point.signs
        )));
    }
    Ok(())
}

/// Checks every pair of `points` and returns the certified minimum of
/// `d_p^p`. Same-shell pairs are decided exactly; cross-shell pairs must
/// clear `m (1 - CERT_TOLERANCE)`.
pub fn certify_points(sys: &ShellSystem, points: &[ShellPoint]) -> Result<f64> {
    for point in points {
        validate_point(sys, point)?;
    }
    let tests: Vec<BallTest> = sys
        .levels()
        .iter()
        .map(|&l| BallTest::new(sys.pnorm(), l))
        .collect();
    let floor = sys.m() as f64 * (1.0 - CERT_TOLERANCE);
    let rows: Vec<std::result::Result<f64, String>> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let u = &points[i];
            let mut best = f64::INFINITY;
            for v in &points[i + 1..] {
                let o = overlap(u, v);
                let value = if u.shell == v.shell {
                    if tests[u.shell - 1].inside(o.only_u, o.opposite_sign) {
                        return Err(format!(
                            "points {:?}/{:#b} and {:?}/{:#b} of shell {} are closer than m^(1/p)",
                            u.support, u.signs, v.support, v.signs, u.shell
                        ));
                    }
                    same_shell_value(sys, sys.levels()[u.shell - 1], o.only_u, o.opposite_sign)
                } else {
                    let lu = sys.levels()[u.shell - 1];
                    let lv = sys.levels()[v.shell - 1];
                    let value = cross_value(sys, lu, lv, o);
                    if value.lo < floor {
                        return Err(format!(
                            "shells {} and {} have a pair at d^p in {value}, below {}",
                            u.shell,
                            v.shell,
                            sys.m()
                        ));
                    }
                    value
                };
                best = best.min(value.lo);
            }
            Ok(best)
        })
        .collect();
    let mut min = f64::INFINITY;
    for row in rows {
        min = min.min(row.map_err(KissError::Certification)?);
    }
    Ok(min)
}

/// Greedy codes on every shell, united and certified.
pub fn build_certificate(sys: &ShellSystem, cap: u64) -> Result<CodeCertificate> {
    for shell in 1..=sys.shell_count() {
        check_cap(sys, shell, cap)?;
    }
    let report = system_bound(sys);
    let mut points = Vec::new();
    let mut sizes_per_shell = Vec::new();
    for (idx, term) in report.per_shell.iter().enumerate() {
        let code = greedy_code(sys, idx + 1, cap)?;
        if BigUint::from(code.len()) < *term.gv_term.value() {
            return Err(KissError::Certification(format!(
                "greedy code on shell {} has {} points, below the guaranteed {}",
                idx + 1,
                code.len(),
                term.gv_term
            )));
        }
        sizes_per_shell.push(code.len());
        points.extend(code);
    }
    let min_dist_p_pow = certify_points(sys, &points)?;
    let cert = CodeCertificate {
        sys: sys.clone(),
        points,
        sizes_per_shell,
        min_dist_p_pow,
        guarantee: report.total,
    };
    check_guarantee(&cert)?;
    Ok(cert)
}

fn check_guarantee(cert: &CodeCertificate) -> Result<()> {
    if BigUint::from(cert.points.len()) < *cert.guarantee.value() {
        return Err(KissError::Certification(format!(
            "code has {} points, below the guarantee {}",
            cert.points.len(),
            cert.guarantee
        )));
    }
    Ok(())
}

/// Re-checks a certificate from scratch: point validity, every pairwise
/// distance, the recorded minimum, per-shell counts and the guarantee.
pub fn verify_certificate(cert: &CodeCertificate) -> Result<f64> {
    let expected = system_bound(&cert.sys).total;
    if expected != cert.guarantee {
        return Err(KissError::Certification(format!(
            "recorded guarantee {} differs from the recomputed {expected}",
            cert.guarantee
        )));
    }
    let mut counts = vec![0usize; cert.sys.shell_count()];
    for point in &cert.points {
        validate_point(&cert.sys, point)?;
        counts[point.shell - 1] += 1;
    }
    if counts != cert.sizes_per_shell {
        return Err(KissError::Certification(format!(
            "per-shell sizes {:?} do not match the points {:?}",
            cert.sizes_per_shell, counts
        )));
    }
    let min = certify_points(&cert.sys, &cert.points)?;
    if cert.min_dist_p_pow > min {
        return Err(KissError::Certification(format!(
            "recorded minimum {} exceeds the certified {min}",
            cert.min_dist_p_pow
        )));
    }
    check_guarantee(cert)?;
    Ok(min)
}
