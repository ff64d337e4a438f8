//! Univariate search: a coarse grid followed by golden-section refinement
//! around the best grid point.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremum {
    pub arg: f64,
    pub value: f64,
}

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping when the
/// bracket is narrower than `tol`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Extremum {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    // 200 iterations shrink any finite bracket below f64 resolution
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        Extremum { arg: c, value: fc }
    } else {
        Extremum { arg: d, value: fd }
    }
}

/// Global minimum of `f` on `[lo, hi]`: evaluates `intervals + 1` evenly
/// spaced points (endpoints included), then refines between the neighbours of
/// the best one. The returned value is never worse than the best grid point.
pub fn grid_then_golden_min<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    intervals: usize,
    tol: f64,
) -> Extremum {
    if hi <= lo {
        return Extremum {
            arg: lo,
            value: f(lo),
        };
    }
    let step = (hi - lo) / intervals as f64;
    let at = |k: usize| {
        if k == intervals {
            hi
        } else {
            lo + step * k as f64
        }
    };
    let mut best = Extremum {
        arg: lo,
        value: f(lo),
    };
    let mut best_k = 0;
    for k in 1..=intervals {
        let x = at(k);
        let v = f(x);
        if v < best.value {
            best = Extremum { arg: x, value: v };
            best_k = k;
        }
    }
    let a = at(best_k.saturating_sub(1));
    let b = at((best_k + 1).min(intervals));
    let refined = golden_section_min(&f, a, b, tol);
    if refined.value < best.value {
        refined
    } else {
        best
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`; `None` when the
/// endpoint values share a sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
