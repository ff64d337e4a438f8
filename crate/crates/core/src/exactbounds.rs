//! Exact finite-`n` lower bounds on the kissing number `K_p(n) = A_p(n, 1/2)`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binomial::partial_row_sum;
use crate::error::{domain, Result};
use crate::pnorm::PNorm;
use crate::shellsys::{ball_size_at_level, shell_size, BigCount, ShellSystem};

/// Largest `n` for which [`best_bound`] sweeps every `m` without a window.
pub const MAX_EXHAUSTIVE_N: u64 = 2000;

/// Label attached to reports that drop an unknown constant or a `1 + o(1)`
/// factor.
pub const UP_TO_CONSTANT: &str = "up to an unspecified constant";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    MultiShell,
    HammingLargeP,
    EuclideanComparison,
}

/// One shell's contribution `ceil(|J_i| / B_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShellTerm {
    pub shell: usize,
    pub level: u64,
    pub shell_size: BigCount,
    pub ball_size: BigCount,
    pub gv_term: BigCount,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub p: f64,
    pub n: u64,
    pub m_star: u64,
    pub levels: Vec<u64>,
    pub per_shell: Vec<ShellTerm>,
    pub total: BigCount,
    pub method: BoundMethod,
    /// Multiplier applied to the first shell for the binary-code log factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jv_factor: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    pub fn total_log2(&self) -> f64 {
        self.total.log2()
    }
}

/// The bound obtained from the Euclidean code through `A_p(n, 1/2) >=
/// A_2(n, 2^{-p/2})` for `1 < p <= 2`, with the `1 + o(1)` factor set to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonBound {
    pub p: f64,
    pub n: u64,
    pub theta: f64,
    pub value_log2: f64,
    pub value: f64,
    pub method: BoundMethod,
    pub asymptotic_factor_dropped: bool,
}

fn level_term(pnorm: &PNorm, n: u64, shell: usize, level: u64) -> ShellTerm {
    let size = shell_size(n, level);
    let ball = ball_size_at_level(pnorm, n, level);
    let gv_term = size.div_ceil(&ball);
    ShellTerm {
        shell,
        level,
        shell_size: size,
        ball_size: ball,
        gv_term,
    }
}

/// `ceil(|J_i| / B_i)` for shell `i` (1-based).
pub fn gv_shell_term(sys: &ShellSystem, shell: usize) -> Result<BigCount> {
    Ok(shell_term(sys, shell)?.gv_term)
}

pub fn shell_term(sys: &ShellSystem, shell: usize) -> Result<ShellTerm> {
    let level = sys.level(shell)?;
    Ok(level_term(sys.pnorm(), sys.n(), shell, level))
}

/// The multi-shell sum for one system.
pub fn system_bound(sys: &ShellSystem) -> BoundReport {
    let per_shell: Vec<ShellTerm> = sys
        .levels()
        .iter()
        .enumerate()
        .map(|(i, &level)| level_term(sys.pnorm(), sys.n(), i + 1, level))
        .collect();
    assemble(sys.p(), sys.n(), sys.m(), sys.levels().to_vec(), per_shell)
}

fn assemble(p: f64, n: u64, m: u64, levels: Vec<u64>, per_shell: Vec<ShellTerm>) -> BoundReport {
    let total = per_shell
        .iter()
        .fold(BigUint::default(), |acc, t| acc + t.gv_term.value());
    BoundReport {
        p,
        n,
        m_star: m,
        levels,
        per_shell,
        total: BigCount(total),
        method: BoundMethod::MultiShell,
        jv_factor: None,
        note: None,
    }
}

/// `sum_i ceil(|J_i| / B_i)` for fixed `m`.
pub fn total_bound(p: f64, n: u64, m: u64) -> Result<BoundReport> {
    Ok(system_bound(&ShellSystem::new(p, n, m)?))
}

/// Maximum of [`total_bound`] over every `m` in `1..=n`. Ties go to the
/// smaller `m`.
pub fn best_bound(p: f64, n: u64) -> Result<BoundReport> {
    if n > MAX_EXHAUSTIVE_N {
        return domain(format!(
            "exhaustive m-sweep is limited to n <= {MAX_EXHAUSTIVE_N}; supply an m window for n={n}"
        ));
    }
    best_bound_in(p, n, 1..=n)
}

/// Maximum of [`total_bound`] over `m` in `window`.
pub fn best_bound_in(p: f64, n: u64, window: RangeInclusive<u64>) -> Result<BoundReport> {
    if n < 1 {
        return domain("n must be at least 1");
    }
    let (lo, hi) = (*window.start(), *window.end());
    if lo < 1 || hi > n || lo > hi {
        return domain(format!("m window {lo}..={hi} must lie inside 1..={n}"));
    }
    let pnorm = PNorm::new(p)?;
    let systems: Vec<ShellSystem> = (lo..=hi)
        .map(|m| ShellSystem::build(pnorm.clone(), n, m))
        .collect::<Result<_>>()?;

    // every shell term depends on the level alone, so compute each level once
    let mut needed: Vec<u64> = systems.iter().flat_map(|s| s.levels().to_vec()).collect();
    needed.sort_unstable();
    needed.dedup();
    let terms: BTreeMap<u64, ShellTerm> = needed
        .par_iter()
        .map(|&level| (level, level_term(&pnorm, n, 0, level)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();

    let totals: Vec<BigUint> = systems
        .par_iter()
        .map(|sys| {
            sys.levels()
                .iter()
                .fold(BigUint::default(), |acc, l| acc + terms[l].gv_term.value())
        })
        .collect();
    let mut best = 0;
    for (idx, total) in totals.iter().enumerate() {
        if total > &totals[best] {
            best = idx;
        }
    }
    let sys = &systems[best];
    let per_shell = sys
        .levels()
        .iter()
        .enumerate()
        .map(|(i, l)| ShellTerm {
            shell: i + 1,
            ..terms[l].clone()
        })
        .collect();
    Ok(assemble(p, n, sys.m(), sys.levels().to_vec(), per_shell))
}

/// Volume of the Hamming ball of radius `ceil(n / 2^p) - 1` in `{0,1}^n`.
pub fn hamming_ball_size(p: f64, n: u64) -> Result<BigCount> {
    if n < 1 {
        return domain("n must be at least 1");
    }
    let pnorm = PNorm::new(p)?;
    let radius = pnorm.max_multiple_below(n);
    Ok(BigCount(partial_row_sum(n, radius)))
}

/// The `m = n` bound: the first shell is `{+-1}^n`, treated as a binary code
/// with minimum Hamming distance `ceil(n / 2^p)`.
///
/// With `use_jv_factor` the first term becomes
/// `ceil(2^n * max(1, floor(log2 B)) / B)`, i.e. the logarithmic improvement
/// with its unknown constant set to 1.
pub fn large_p_bound(p: f64, n: u64, use_jv_factor: bool) -> Result<BoundReport> {
    let sys = ShellSystem::new(p, n, n)?;
    let mut report = system_bound(&sys);
    report.method = BoundMethod::HammingLargeP;
    if use_jv_factor {
        let first = &mut report.per_shell[0];
        let log_factor = (first.ball_size.value().bits() - 1).max(1);
        let scaled = first.shell_size.value() * BigUint::from(log_factor);
        first.gv_term = BigCount(scaled).div_ceil(&first.ball_size);
        report.total = BigCount(
            report
                .per_shell
                .iter()
                .fold(BigUint::default(), |acc, t| acc + t.gv_term.value()),
        );
        report.jv_factor = Some(log_factor);
        report.note = Some(format!("first shell {UP_TO_CONSTANT}"));
    }
    Ok(report)
}

/// Evaluates the Euclidean-code lower bound at `sin(theta/2) = 2^{-p/2}`.
pub fn euclidean_comparison(p: f64, n: u64) -> Result<ComparisonBound> {
    if !(p > 1.0 && p <= 2.0) {
        return domain(format!("comparison bound requires 1 < p <= 2, got {p}"));
    }
    if n < 2 {
        return domain(format!("comparison bound requires n >= 2, got {n}"));
    }
    let half_sin = 2f64.powf(-p / 2.0);
    let theta = 2.0 * half_sin.asin();
    let sin_t = theta.sin();
    let cos_t = theta.cos();
    let prefactor = (sin_t / (std::f64::consts::SQRT_2 * half_sin)).ln();
    let nf = n as f64;
    let value_log2 = prefactor.log2()
        + nf.log2()
        + 0.5 * (2.0 * std::f64::consts::PI * nf).log2()
        + cos_t.log2()
        - (nf - 1.0) * sin_t.log2();
    Ok(ComparisonBound {
        p,
        n,
        theta,
        value_log2,
        value: value_log2.exp2(),
        method: BoundMethod::EuclideanComparison,
        asymptotic_factor_dropped: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigCount {
        BigCount::from(v)
    }

    #[test]
    fn gv_term_examples() {
        let sys = ShellSystem::new(1.0, 4, 3).unwrap();
        assert_eq!(gv_shell_term(&sys, 1).unwrap(), big(4));
        let sys = ShellSystem::new(2.0, 6, 5).unwrap();
        assert_eq!(gv_shell_term(&sys, 1).unwrap(), big(12));
        // a level-one shell keeps all 2n points
        let sys = ShellSystem::new(1.0, 10, 7).unwrap();
        assert_eq!(gv_shell_term(&sys, 3).unwrap(), big(20));
    }

    #[test]
    fn total_bound_sums_shells() {
        let r = total_bound(1.0, 10, 7).unwrap();
        assert_eq!(r.levels, vec![7, 3, 1]);
        assert_eq!(r.per_shell[2].gv_term, big(20));
        let sum = r
            .per_shell
            .iter()
            .fold(BigUint::default(), |a, t| a + t.gv_term.value());
        assert_eq!(r.total.value(), &sum);
        let single = total_bound(2.0, 10, 3).unwrap();
        assert_eq!(single.per_shell.len(), 1);
        assert_eq!(single.total, single.per_shell[0].gv_term);
    }

    #[test]
    fn best_bound_small_cases() {
        assert_eq!(best_bound(1.0, 1).unwrap().total, big(2));
        assert_eq!(best_bound(2.0, 1).unwrap().total, big(2));
        let r = best_bound(2.0, 4).unwrap();
        for m in 1..=4 {
            assert!(total_bound(2.0, 4, m).unwrap().total <= r.total);
        }
        assert!(best_bound(2.0, MAX_EXHAUSTIVE_N + 1).is_err());
        assert!(best_bound_in(2.0, 10, 0..=3).is_err());
        assert!(best_bound_in(2.0, 10, 4..=11).is_err());
    }

    #[test]
    fn best_bound_ties_prefer_small_m() {
        for &(p, n) in &[(1.0, 6u64), (2.0, 9), (3.0, 12), (2.5, 7)] {
            let r = best_bound(p, n).unwrap();
            for m in 1..r.m_star {
                assert!(total_bound(p, n, m).unwrap().total < r.total);
            }
            for m in r.m_star..=n {
                assert!(total_bound(p, n, m).unwrap().total <= r.total);
            }
        }
    }

    #[test]
    fn hamming_ball_examples() {
        assert_eq!(hamming_ball_size(2.0, 8).unwrap(), big(9));
        assert_eq!(hamming_ball_size(3.0, 8).unwrap(), big(1));
        assert_eq!(hamming_ball_size(1.0, 4).unwrap(), big(1 + 4));
    }

    #[test]
    fn large_p_examples() {
        let r = large_p_bound(3.0, 8, false).unwrap();
        assert_eq!(r.levels, vec![8, 1]);
        assert_eq!(r.per_shell[0].gv_term, big(256));
        assert_eq!(r.per_shell[1].gv_term, big(16));
        assert_eq!(r.total, big(272));
        assert_eq!(r.method, BoundMethod::HammingLargeP);

        let r = large_p_bound(2.0, 8, false).unwrap();
        assert_eq!(r.per_shell[0].gv_term, big(29));

        // B = 1 has log2 B = 0, clamped to a factor of one
        let jv = large_p_bound(3.0, 8, true).unwrap();
        assert_eq!(jv.jv_factor, Some(1));
        assert_eq!(jv.total, big(272));
        assert!(jv.note.as_deref().unwrap().contains(UP_TO_CONSTANT));

        // B = 9: factor floor(log2 9) = 3, ceil(256 * 3 / 9) = 86
        let jv = large_p_bound(2.0, 8, true).unwrap();
        assert_eq!(jv.jv_factor, Some(3));
        assert_eq!(jv.per_shell[0].gv_term, big(86));
    }

    #[test]
    fn euclidean_comparison_at_two() {
        let c = euclidean_comparison(2.0, 100).unwrap();
        assert!((c.theta - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
        let prefactor = (1.5f64).sqrt().ln();
        assert!(prefactor > 0.0);
        let direct = prefactor.log2()
            + 100f64.log2()
            + 0.5 * (200.0 * std::f64::consts::PI).log2()
            + 0.5f64.log2()
            + 99.0 * (2.0 / 3f64.sqrt()).log2();
        assert!((c.value_log2 - direct).abs() < 1e-9);
        assert!(c.asymptotic_factor_dropped);
        assert!(euclidean_comparison(1.0, 10).is_err());
        assert!(euclidean_comparison(2.5, 10).is_err());
        assert!(euclidean_comparison(1.5, 1).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let r = large_p_bound(2.0, 8, true).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: BoundReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
