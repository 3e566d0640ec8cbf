#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        assert!(delta.is_finite(), "non-finite integrand on [{a}, {b}]");
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Closed-form angular integral for N = 3 (sphere-slicing weight):
/// 2π / ((1+sp)ρ) [(1-ρ)^{-1-sp} - (1+ρ)^{-1-sp}].
pub fn phi_n3(rho: f64, sp: f64) -> f64 {
    if rho == 0.0 {
        return 4.0 * PI;
    }
    2.0 * PI / ((1.0 + sp) * rho) * ((1.0 - rho).powf(-1.0 - sp) - (1.0 + rho).powf(-1.0 - sp))
}

/// Radial kernel for N = 3: 8π² r r' / (1+sp) [|r-r'|^{-1-sp} - (r+r')^{-1-sp}].
pub fn kernel_n3(r: f64, rp: f64, sp: f64) -> f64 {
    8.0 * PI * PI * r * rp / (1.0 + sp) * ((r - rp).abs().powf(-1.0 - sp) - (r + rp).powf(-1.0 - sp))
}
