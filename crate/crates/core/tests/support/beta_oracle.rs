//! Incomplete-beta oracle from adaptive Simpson quadrature and a
//! Stirling-series log-gamma, independent of the library's special functions.

#![allow(dead_code)]

pub fn ln_gamma(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut z = x;
    while z < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2) - 1.0 / (1680.0 * z * z2 * z2 * z2);
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

#[allow(clippy::too_many_arguments)]
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, 1e-14, 40)
}

/// `I_x(a, b)` by quadrature of the beta density. For `a ≤ 1` the
/// substitution `t = u^{1/a}` removes the `t^{a−1}` endpoint singularity. The upper half uses the reflection
/// `I_x(a, b) = 1 − I_{1−x}(b, a)` so the other endpoint is never touched.
pub fn inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    if x > 0.5 {
        return 1.0 - inc_beta(b, a, 1.0 - x);
    }
    let ln_b = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    if a <= 1.0 {
        let body = integrate(|u: f64| (1.0 - u.powf(1.0 / a)).powf(b - 1.0), 0.0, x.powf(a));
        return body / a * (-ln_b).exp();
    }
    integrate(|t: f64| ((a - 1.0) * t.ln() + (b - 1.0) * (-t).ln_1p() - ln_b).exp(), 0.0, x)
}

pub fn t_oracle(t: f64, nu: f64) -> f64 {
    let tail = 0.5 * inc_beta(nu / 2.0, 0.5, nu / (nu + t * t));
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

pub fn f_oracle(f: f64, d1: f64, d2: f64) -> f64 {
    inc_beta(d1 / 2.0, d2 / 2.0, d1 * f / (d1 * f + d2))
}
