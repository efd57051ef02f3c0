//! Regularized incomplete Beta function and its inverse.

use libm::{exp, lgamma, log, log1p};

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    lgamma(a) + lgamma(b) - lgamma(a + b)
}

/// Beta(a, b) density at `t ∈ (0, 1)`; `a, b > 0`.
pub fn beta_pdf(a: f64, b: f64, t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    exp((a - 1.0) * log(t) + (b - 1.0) * log1p(-t) - ln_beta(a, b))
}

/// Regularized incomplete Beta function `I_t(a, b)` for `a, b > 0`.
///
/// Continued fraction (modified Lentz), using the symmetry
/// `I_t(a, b) = 1 - I_{1-t}(b, a)` where the fraction converges slowly.
pub fn beta_cdf(a: f64, b: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let ln_front = a * log(t) + b * log1p(-t) - ln_beta(a, b);
    if t < (a + 1.0) / (a + b + 2.0) {
        exp(ln_front) * continued_fraction(a, b, t) / a
    } else {
        1.0 - exp(ln_front) * continued_fraction(b, a, 1.0 - t) / b
    }
}

fn continued_fraction(a: f64, b: f64, t: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * t / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * t / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * t / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Inverse of [`beta_cdf`] in `t`: Newton steps safeguarded by a bisection
/// bracket, to absolute tolerance `tol`. Near either end the tolerance
/// tightens to a relative one, so tiny quantiles stay ordered.
pub fn beta_quantile(a: f64, b: f64, p: f64, tol: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // start at the mean, clamped away from the ends
    let mut t = (a / (a + b)).clamp(1e-3, 1.0 - 1e-3);
    for _ in 0..2000 {
        let f = beta_cdf(a, b, t) - p;
        if f == 0.0 {
            return t;
        }
        if f > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let width = tol.min(1e-12 * hi.min(1.0 - lo)).max(f64::MIN_POSITIVE);
        if hi - lo <= width {
            break;
        }
        let slope = beta_pdf(a, b, t);
        let newton = t - f / slope;
        let step_ok = slope.is_finite() && slope > 0.0 && newton > lo && newton < hi;
        let next = if step_ok { newton } else { 0.5 * (lo + hi) };
        if next == t || next <= lo || next >= hi {
            break;
        }
        if step_ok && (next - t).abs() <= 0.01 * width {
            return next;
        }
        t = next;
    }
    0.5 * (lo + hi)
}
