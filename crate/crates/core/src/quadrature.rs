//! Gauss rules used throughout the crate.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::special::ln_gamma;

/// Nodes and weights of a 1-D rule on its reference interval.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over [a, b] for a rule defined on [0, 1].
    pub fn integrate_unit<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = b - a;
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(a + h * x);
        }
        acc * h
    }
}

/// n-point Gauss–Legendre rule mapped to [0, 1].
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = 0.5 * (1.0 - z);
        nodes[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    Rule { nodes, weights }
}

/// n-point Gauss–Jacobi rule on [0, 1] for the weight x^e, e > -1.
///
/// Built from the Jacobi matrix of the weight (1-t)^0 (1+t)^e on [-1, 1]
/// (Golub–Welsch), then mapped by x = (1 + t)/2. The weight is *not* folded
/// into the returned weights: ∫₀¹ x^e g(x) dx ≈ Σ w_k g(x_k).
pub fn gauss_jacobi_left(n: usize, e: f64) -> Rule {
    assert!(n >= 1 && e > -1.0);
    let (a, b) = (0.0_f64, e);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let diag = if k == 0 { (b - a) / (a + b + 2.0) } else { (b * b - a * a) / (s * (s + 2.0)) };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let m = kf + 1.0;
            let s1 = 2.0 * m + a + b;
            let off = if m == 1.0 {
                (4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))).sqrt()
            } else {
                (4.0 * m * (m + a) * (m + b) * (m + a + b) / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0))).sqrt()
            };
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let mu0 = ((a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0)).exp();
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    // x = (1+t)/2, dx = dt/2, (1+t)^e = 2^e x^e  =>  scale by 2^{-e-1}.
    let scale = 2f64.powf(-e - 1.0);
    Rule { nodes: pairs.iter().map(|p| 0.5 * (1.0 + p.0)).collect(), weights: pairs.iter().map(|p| p.1 * scale).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre(6);
        for k in 0..12 {
            let v = r.integrate_unit(0.0, 1.0, |x| x.powi(k));
            assert!((v - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn jacobi_integrates_weighted_monomials() {
        for &e in &[-0.8, -0.5, 0.0, 0.3, 1.25] {
            let r = gauss_jacobi_left(7, e);
            for k in 0..14 {
                let v: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(k)).sum();
                let exact = 1.0 / (k as f64 + e + 1.0);
                assert!((v - exact).abs() < 1e-13 * exact.max(1.0), "e={e} k={k}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn jacobi_with_zero_exponent_is_legendre() {
        let a = gauss_jacobi_left(9, 0.0);
        let b = gauss_legendre(9);
        for k in 0..9 {
            assert!((a.nodes[k] - b.nodes[k]).abs() < 1e-14);
            assert!((a.weights[k] - b.weights[k]).abs() < 1e-14);
        }
    }
}
