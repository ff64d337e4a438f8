//! Growth exponents (bits per dimension) of the per-shell Gilbert-Varshamov
//! terms as `n -> infinity`.
//!
//! For a shell with support fraction `sigma`, the exponent is
//! `g_p(sigma) = min_y f_p(sigma, y)` over `0 <= y <= min(sigma/2, 1 - sigma)`,
//! where
//!
//! ```text
//! f_p(s, y) = (s - y) (1 - H((s - 2y) / (2^p (s - y))))
//!           + H(s) - s H(y / s) - (1 - s) H(y / (1 - s))
//! ```
//!
//! and `H` is the binary entropy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, KissError, Result};
use crate::optimize::{bisect, golden_section_min, grid_then_golden_min};
use crate::shellsys::entropy_clamped as h;

/// Intervals of the coarse `y` grid in the inner minimization.
pub const INNER_GRID: usize = 1000;
/// Argument tolerance of the inner golden-section refinement.
pub const INNER_TOL: f64 = 1e-10;
/// Spacing of the coarse `sigma` grid in the outer maximization.
pub const OUTER_STEP: f64 = 1e-3;
/// Argument tolerance of the outer refinement.
pub const OUTER_TOL: f64 = 1e-7;
/// Shell series are truncated after this many terms.
pub const MAX_SHELLS: usize = 12;
/// Shell series stop once the support fraction drops below this.
pub const SIGMA_FLOOR: f64 = 1e-6;
/// Bisection tolerance in `p` for the crossover search.
pub const CROSSOVER_TOL: f64 = 1e-4;

const EDGE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerMin {
    pub y_star: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentResult {
    pub p: f64,
    pub sigma_star: f64,
    pub y_star: f64,
    pub g_value: f64,
    /// `g_p(sigma* / 2^{p(i-1)})` for `i = 1, 2, ...`.
    pub shell_exponents: Vec<f64>,
    /// Largest `sigma* 2^{pk} < 1`: starting the series there puts `k`
    /// extra shells in front of the maximal one.
    pub series_start: f64,
    pub series_exponents: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub sigma: f64,
    pub g: f64,
}

fn y_upper(sigma: f64) -> f64 {
    (sigma / 2.0).min(1.0 - sigma)
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return domain(format!("sigma must lie in (0, 1), got {sigma}"));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !p.is_finite() || p < 1.0 {
        return domain(format!("p must be a finite real >= 1, got {p}"));
    }
    Ok(())
}

fn f_unchecked(two_pow_p: f64, sigma: f64, y: f64) -> f64 {
    let rest = sigma - y;
    let inner = (sigma - 2.0 * y) / (two_pow_p * rest);
    rest * (1.0 - h(inner)) + h(sigma) - sigma * h(y / sigma) - (1.0 - sigma) * h(y / (1.0 - sigma))
}

/// `f_p(sigma, y)`.
pub fn f(p: f64, sigma: f64, y: f64) -> Result<f64> {
    check_p(p)?;
    check_sigma(sigma)?;
    let hi = y_upper(sigma);
    if !(0.0..=hi * (1.0 + 1e-12)).contains(&y) {
        return domain(format!(
            "y must lie in [0, {hi}] for sigma={sigma}, got {y}"
        ));
    }
    Ok(f_unchecked(2f64.powf(p), sigma, y.min(hi)))
}

/// `g_p(sigma)`, the minimum of `f_p(sigma, .)` over the admissible `y`.
pub fn g(p: f64, sigma: f64) -> Result<InnerMin> {
    g_with_grid(p, sigma, INNER_GRID)
}

/// [`g`] with an explicit number of coarse grid intervals.
pub fn g_with_grid(p: f64, sigma: f64, intervals: usize) -> Result<InnerMin> {
    check_p(p)?;
    check_sigma(sigma)?;
    Ok(g_unchecked(2f64.powf(p), sigma, intervals.max(2)))
}

fn g_unchecked(two_pow_p: f64, sigma: f64, intervals: usize) -> InnerMin {
    let e = grid_then_golden_min(
        |y| f_unchecked(two_pow_p, sigma, y),
        0.0,
        y_upper(sigma),
        intervals,
        INNER_TOL,
    );
    InnerMin {
        y_star: e.arg,
        value: e.value,
    }
}

/// Maximizes `g_p` over `sigma` in `(0, 1)` and expands the shell series at
/// the maximizer.
pub fn max_g(p: f64) -> Result<ExponentResult> {
    check_p(p)?;
    let two_pow_p = 2f64.powf(p);
    let steps = (1.0 / OUTER_STEP).round() as usize;
    let values: Vec<f64> = (1..steps)
        .into_par_iter()
        .map(|k| g_unchecked(two_pow_p, k as f64 * OUTER_STEP, INNER_GRID).value)
        .collect();
    let mut best_k = 1;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best_k - 1] {
            best_k = i + 1;
        }
    }
    let lo = ((best_k - 1) as f64 * OUTER_STEP).max(EDGE);
    let hi = ((best_k + 1) as f64 * OUTER_STEP).min(1.0 - EDGE);
    let refined = golden_section_min(
        |s| -g_unchecked(two_pow_p, s, INNER_GRID).value,
        lo,
        hi,
        OUTER_TOL,
    );
    let grid_sigma = best_k as f64 * OUTER_STEP;
    let sigma_star = if -refined.value >= values[best_k - 1] {
        refined.arg
    } else {
        grid_sigma
    };
    let inner = g_unchecked(two_pow_p, sigma_star, INNER_GRID);
    let series_start = lift_start(two_pow_p, sigma_star);
    Ok(ExponentResult {
        p,
        sigma_star,
        y_star: inner.y_star,
        g_value: inner.value,
        shell_exponents: series(two_pow_p, sigma_star),
        series_start,
        series_exponents: series(two_pow_p, series_start),
    })
}

fn lift_start(two_pow_p: f64, sigma: f64) -> f64 {
    let mut s = sigma;
    while s * two_pow_p < 1.0 {
        s *= two_pow_p;
    }
    s
}

fn series(two_pow_p: f64, sigma: f64) -> Vec<f64> {
    std::iter::successors(Some(sigma), |s| Some(s / two_pow_p))
        .take_while(|&s| s >= SIGMA_FLOOR)
        .take(MAX_SHELLS)
        .map(|s| g_unchecked(two_pow_p, s, INNER_GRID).value)
        .collect()
}

/// `[g_p(sigma), g_p(sigma / 2^p), g_p(sigma / 2^{2p}), ...]`, truncated at
/// [`MAX_SHELLS`] terms or once the argument falls below [`SIGMA_FLOOR`].
pub fn shell_exponents(p: f64, sigma: f64) -> Result<Vec<f64>> {
    check_p(p)?;
    check_sigma(sigma)?;
    Ok(series(2f64.powf(p), sigma))
}

/// Exponents of the `m = n` construction: `1 - H(2^-p)` for the binary first
/// shell, then `g_p(2^{-p(i-1)})` for `i >= 2`.
pub fn large_p_exponents(p: f64) -> Result<Vec<f64>> {
    check_p(p)?;
    let two_pow_p = 2f64.powf(p);
    let lead = 1.0 - h(2f64.powf(-p));
    let mut out = vec![lead];
    out.extend(
        series(two_pow_p, 1.0 / two_pow_p)
            .into_iter()
            .take(MAX_SHELLS - 1),
    );
    Ok(out)
}

/// `-log2 sin(theta)` with `sin(theta/2) = 2^{-p/2}`, which simplifies to
/// `p/2 - 1 - log2(1 - 2^-p) / 2`.
pub fn euclid_exponent(p: f64) -> Result<f64> {
    if !(p > 1.0 && p <= 2.0) {
        return domain(format!("comparison exponent requires 1 < p <= 2, got {p}"));
    }
    Ok(p / 2.0 - 1.0 - 0.5 * (1.0 - (-p).exp2()).log2())
}

/// The `p` in `[p_lo, p_hi]` where the comparison exponent meets the best
/// multi-shell exponent.
pub fn crossover(p_lo: f64, p_hi: f64) -> Result<f64> {
    if !(p_lo > 1.0 && p_hi <= 2.0 && p_lo < p_hi) {
        return domain(format!(
            "crossover bracket must satisfy 1 < p_lo < p_hi <= 2, got [{p_lo}, {p_hi}]"
        ));
    }
    let gap = |p: f64| {
        let e = euclid_exponent(p).expect("bracket checked");
        let gv = max_g(p).expect("p checked").g_value;
        e - gv
    };
    bisect(gap, p_lo, p_hi, CROSSOVER_TOL).ok_or_else(|| KissError::NoSignChange {
        lo: p_lo,
        hi: p_hi,
        at_lo: gap(p_lo),
        at_hi: gap(p_hi),
    })
}

/// Smallest `p` in `[p_lo, p_hi]` (to [`CROSSOVER_TOL`]) whose maximizer
/// `sigma*` sits within `margin` of 1.
pub fn boundary_onset(p_lo: f64, p_hi: f64, margin: f64) -> Result<f64> {
    check_p(p_lo)?;
    if p_lo >= p_hi || p_hi.is_nan() || !(margin > 0.0 && margin < 1.0) {
        return domain(format!(
            "onset search needs p_lo < p_hi and 0 < margin < 1, got [{p_lo}, {p_hi}], {margin}"
        ));
    }
    let side = |p: f64| {
        if max_g(p).expect("p checked").sigma_star >= 1.0 - margin {
            1.0
        } else {
            -1.0
        }
    };
    bisect(side, p_lo, p_hi, CROSSOVER_TOL).ok_or_else(|| KissError::NoSignChange {
        lo: p_lo,
        hi: p_hi,
        at_lo: side(p_lo),
        at_hi: side(p_hi),
    })
}

/// `k * step` for `k = 1, 2, ...` strictly inside `(0, 1)`.
pub fn uniform_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step < 1.0) {
        return domain(format!("grid step must lie in (0, 1), got {step}"));
    }
    let count = ((1.0 / step) - 0.5).floor() as usize;
    Ok((1..=count)
        .map(|k| k as f64 * step)
        .filter(|&s| s < 1.0)
        .collect())
}

/// `g_p` sampled on `grid`, in grid order.
pub fn curve(p: f64, grid: &[f64]) -> Result<Vec<CurveSample>> {
    check_p(p)?;
    for &s in grid {
        check_sigma(s)?;
    }
    let two_pow_p = 2f64.powf(p);
    Ok(grid
        .par_iter()
        .map(|&sigma| CurveSample {
            sigma,
            g: g_unchecked(two_pow_p, sigma, INNER_GRID).value,
        })
        .collect())
}
