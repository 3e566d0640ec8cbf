//! Energy minimization for the regularized, pure-singular, capacitary and
//! truncated problems.
//!
//! Every problem has the form J(U) = E(U)/p - Σ_i ω_i F_i(U_i) with E the
//! discrete Gagliardo energy and F_i a nodal reaction primitive; it is
//! minimized by damped Newton with a Levenberg shift and Armijo backtracking.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{RadialFunction, RadialGrid};
use crate::operator::{weak_residual, weight_a, KernelMatrix};
use crate::params::ProblemParams;

/// A(t) = ∫₀ᵗ a (τ₊ + 1/n)^{-γ} dτ.
pub fn a_primitive(a_val: f64, t: f64, n: u64, gamma: f64) -> f64 {
    let shift = 1.0 / n as f64;
    if t >= 0.0 {
        a_val * ((t + shift).powf(1.0 - gamma) - shift.powf(1.0 - gamma)) / (1.0 - gamma)
    } else {
        a_val * (n as f64).powf(gamma) * t
    }
}

/// f̄(r, t) = a(r) (m^{-γ} + κ m^r) with m = max(ū, t).
pub fn truncated_rhs(r: f64, t: f64, u_bar_val: f64, params: &ProblemParams, kappa: f64) -> Result<f64> {
    if !(u_bar_val > 0.0) {
        return Err(Error::domain(format!("truncation level {u_bar_val} must be positive")));
    }
    let m = u_bar_val.max(t);
    Ok(weight_a(r, params) * (m.powf(-params.gamma) + kappa * m.powf(params.r_exp)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-9, max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub label: String,
    pub iterations: usize,
    #[serde(serialize_with = "crate::analysis::sci")]
    pub final_energy: f64,
    /// max_i |∂J/∂U_i| / ω_i over free nodes: the pointwise Euler–Lagrange
    /// residual.
    #[serde(serialize_with = "crate::analysis::sci")]
    pub residual_norm: f64,
    pub line_search_failures: usize,
    pub converged: bool,
    /// Most negative nodal value (0 if none).
    #[serde(serialize_with = "crate::analysis::sci")]
    pub min_value: f64,
}

/// Nodal reaction primitive F_i(t) with first and second derivatives.
trait Reaction {
    fn value(&self, i: usize, t: f64) -> f64;
    fn slope(&self, i: usize, t: f64) -> f64;
    fn curvature(&self, i: usize, t: f64) -> f64;
}

struct Shifted<'a> {
    a: &'a [f64],
    n: u64,
    gamma: f64,
}

impl Reaction for Shifted<'_> {
    fn value(&self, i: usize, t: f64) -> f64 {
        a_primitive(self.a[i], t, self.n, self.gamma)
    }
    fn slope(&self, i: usize, t: f64) -> f64 {
        self.a[i] * (t.max(0.0) + 1.0 / self.n as f64).powf(-self.gamma)
    }
    fn curvature(&self, i: usize, t: f64) -> f64 {
        if t > 0.0 {
            -self.gamma * self.a[i] * (t + 1.0 / self.n as f64).powf(-self.gamma - 1.0)
        } else {
            0.0
        }
    }
}

/// The unshifted singular reaction a t^{-γ}; infinite objective for t ≤ 0.
struct Singular<'a> {
    a: &'a [f64],
    gamma: f64,
}

impl Reaction for Singular<'_> {
    fn value(&self, i: usize, t: f64) -> f64 {
        if t > 0.0 {
            self.a[i] * t.powf(1.0 - self.gamma) / (1.0 - self.gamma)
        } else if self.a[i] == 0.0 {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    }
    fn slope(&self, i: usize, t: f64) -> f64 {
        self.a[i] * t.powf(-self.gamma)
    }
    fn curvature(&self, i: usize, t: f64) -> f64 {
        -self.gamma * self.a[i] * t.powf(-self.gamma - 1.0)
    }
}

struct Truncated<'a> {
    a: &'a [f64],
    floor: &'a [f64],
    gamma: f64,
    r: f64,
    kappa: f64,
}

impl Truncated<'_> {
    fn below(&self, i: usize) -> f64 {
        let u = self.floor[i];
        self.a[i] * (u.powf(-self.gamma) + self.kappa * u.powf(self.r))
    }
}

impl Reaction for Truncated<'_> {
    fn value(&self, i: usize, t: f64) -> f64 {
        let u = self.floor[i];
        if t <= u {
            return t * self.below(i);
        }
        let g1 = 1.0 - self.gamma;
        let r1 = self.r + 1.0;
        u * self.below(i) + self.a[i] * ((t.powf(g1) - u.powf(g1)) / g1 + self.kappa * (t.powf(r1) - u.powf(r1)) / r1)
    }
    fn slope(&self, i: usize, t: f64) -> f64 {
        let m = t.max(self.floor[i]);
        self.a[i] * (m.powf(-self.gamma) + self.kappa * m.powf(self.r))
    }
    fn curvature(&self, i: usize, t: f64) -> f64 {
        if t < self.floor[i] {
            0.0
        } else {
            self.a[i] * (-self.gamma * t.powf(-self.gamma - 1.0) + self.kappa * self.r * t.powf(self.r - 1.0))
        }
    }
}

struct NoReaction;

impl Reaction for NoReaction {
    fn value(&self, _: usize, _: f64) -> f64 {
        0.0
    }
    fn slope(&self, _: usize, _: f64) -> f64 {
        0.0
    }
    fn curvature(&self, _: usize, _: f64) -> f64 {
        0.0
    }
}

struct Objective<'a, F: Reaction> {
    k: &'a KernelMatrix,
    params: &'a ProblemParams,
    grid: Arc<RadialGrid>,
    omega: Vec<f64>,
    reaction: F,
    free: Vec<usize>,
}

impl<F: Reaction> Objective<'_, F> {
    fn func(&self, values: &[f64]) -> Result<RadialFunction> {
        RadialFunction::new(self.grid.clone(), values.to_vec())
    }

    fn value(&self, values: &[f64]) -> f64 {
        let Ok(u) = self.func(values) else {
            return f64::INFINITY;
        };
        let e = self.k.energy_ext(&u.extended_values()) / self.params.p;
        let react: f64 = values.iter().enumerate().map(|(i, &t)| self.omega[i] * self.reaction.value(i, t)).sum();
        let j = e - react;
        if j.is_nan() {
            f64::INFINITY
        } else {
            j
        }
    }

    /// Full gradient ∂J/∂U (fixed entries included).
    fn gradient(&self, values: &[f64]) -> Result<Vec<f64>> {
        let u = self.func(values)?;
        let mut g = weak_residual(&u, self.k, self.params)?;
        for (i, gi) in g.iter_mut().enumerate() {
            *gi -= self.omega[i] * self.reaction.slope(i, values[i]);
        }
        Ok(g)
    }

    fn residual_norm(&self, g: &[f64]) -> f64 {
        self.free.iter().map(|&i| g[i].abs() / self.omega[i]).fold(0.0, f64::max)
    }

    fn hessian_free(&self, values: &[f64]) -> Result<DMatrix<f64>> {
        let u = self.func(values)?;
        let h = self.k.hessian(&u)?;
        let nf = self.free.len();
        let mut out = DMatrix::zeros(nf, nf);
        for (a, &i) in self.free.iter().enumerate() {
            for (b, &j) in self.free.iter().enumerate() {
                out[(a, b)] = h[(i, j)];
            }
            out[(a, a)] -= self.omega[i] * self.reaction.curvature(i, values[i]);
        }
        Ok(out)
    }
}

fn newton_direction(h: DMatrix<f64>, g: &DVector<f64>) -> Option<DVector<f64>> {
    let n = h.nrows();
    let max_diag = (0..n).map(|i| h[(i, i)].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut shift = 0.0;
    for _ in 0..16 {
        let mut hs = h.clone();
        for i in 0..n {
            hs[(i, i)] += shift;
        }
        if let Some(ch) = hs.cholesky() {
            return Some(-ch.solve(g));
        }
        shift = if shift == 0.0 { 1e-10 * max_diag } else { shift * 10.0 };
    }
    None
}

fn minimize<F: Reaction>(
    obj: &Objective<F>,
    init: Vec<f64>,
    opts: &SolverOptions,
    label: &str,
) -> Result<(RadialFunction, SolveReport)> {
    if !(opts.tol > 0.0) {
        return Err(Error::domain(format!("solver tol {} must be > 0", opts.tol)));
    }
    let mut x = init;
    let mut j = obj.value(&x);
    if !j.is_finite() {
        return Err(Error::domain(format!("{label}: initial guess has infinite energy")));
    }
    let mut g = obj.gradient(&x)?;
    let mut res = obj.residual_norm(&g);
    let mut iterations = 0;
    let mut failures = 0;
    let mut converged = res <= opts.tol;
    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let gf = DVector::from_iterator(obj.free.len(), obj.free.iter().map(|&i| g[i]));
        let h = obj.hessian_free(&x)?;
        let diag: Vec<f64> = (0..h.nrows()).map(|i| h[(i, i)].abs().max(f64::MIN_POSITIVE)).collect();
        let mut d = newton_direction(h, &gf).unwrap_or_else(|| DVector::from_fn(gf.len(), |i, _| -gf[i] / diag[i]));
        let mut slope = gf.dot(&d);
        if !(slope < 0.0) {
            d = DVector::from_fn(gf.len(), |i, _| -gf[i] / diag[i]);
            slope = gf.dot(&d);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial = x.clone();
            for (a, &i) in obj.free.iter().enumerate() {
                trial[i] += step * d[a];
            }
            let jt = obj.value(&trial);
            if jt.is_finite() && jt <= j + 1e-4 * step * slope {
                accepted = Some((trial, jt));
                break;
            }
            // Near the minimizer the energy change drops below round-off;
            // fall back to accepting steps that reduce the residual.
            if jt.is_finite() && (jt - j).abs() <= 1e-13 * j.abs().max(1e-300) {
                let gt = obj.gradient(&trial)?;
                if obj.residual_norm(&gt) < res {
                    accepted = Some((trial, jt));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, jt)) => {
                x = trial;
                j = jt;
                g = obj.gradient(&x)?;
                res = obj.residual_norm(&g);
                converged = res <= opts.tol;
            }
            None => {
                failures += 1;
                if failures > 3 {
                    break;
                }
            }
        }
    }
    let min_value = x.iter().fold(0.0, |m: f64, &v| m.min(v));
    let u = obj.func(&x)?;
    Ok((
        u,
        SolveReport {
            label: label.to_string(),
            iterations,
            final_energy: j,
            residual_norm: res,
            line_search_failures: failures,
            converged,
            min_value,
        },
    ))
}

fn nodal_a(grid: &RadialGrid, params: &ProblemParams) -> Vec<f64> {
    grid.nodes().iter().map(|&r| weight_a(r, params)).collect()
}

/// One shifted problem: operator data plus the shift index n ≥ 1.
#[derive(Debug, Clone)]
pub struct RegularizedProblem<'a> {
    pub params: &'a ProblemParams,
    pub n: u64,
    pub grid: Arc<RadialGrid>,
    pub k: &'a KernelMatrix,
}

impl<'a> RegularizedProblem<'a> {
    pub fn new(params: &'a ProblemParams, n: u64, grid: Arc<RadialGrid>, k: &'a KernelMatrix) -> Result<Self> {
        if n < 1 {
            return Err(Error::domain("shift index n must be >= 1"));
        }
        if grid.geometry_hash() != k.geometry_hash() {
            return Err(Error::usage("grid and kernel matrix do not match"));
        }
        Ok(RegularizedProblem { params, n, grid, k })
    }

    /// J_n(U) = E(U)/p - Σ ω_i A(a_i, U_i, n).
    pub fn energy(&self, u: &RadialFunction) -> f64 {
        let a = nodal_a(&self.grid, self.params);
        self.objective(&a).value(u.values())
    }

    /// ∂J_n/∂U.
    pub fn gradient(&self, u: &RadialFunction) -> Result<Vec<f64>> {
        let a = nodal_a(&self.grid, self.params);
        self.objective(&a).gradient(u.values())
    }

    fn objective<'b>(&'b self, a: &'b [f64]) -> Objective<'b, Shifted<'b>> {
        Objective {
            k: self.k,
            params: self.params,
            grid: self.grid.clone(),
            omega: self.grid.volume_weights(self.params.n),
            reaction: Shifted { a, n: self.n, gamma: self.params.gamma },
            free: (0..self.grid.len()).collect(),
        }
    }
}

/// Minimizes J_n from `init`. The minimizer is unique (J_n is convex).
pub fn minimize_jn(
    prob: &RegularizedProblem,
    init: &RadialFunction,
    opts: &SolverOptions,
) -> Result<(RadialFunction, SolveReport)> {
    let a = nodal_a(&prob.grid, prob.params);
    let obj = prob.objective(&a);
    minimize(&obj, init.values().to_vec(), opts, &format!("J_{}", prob.n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationReport {
    pub levels: Vec<SolveReport>,
    /// Shift indices of the levels, in order.
    pub schedule: Vec<u64>,
    /// Worst nodal decrease u_{n_k} - u_{n_{k+1}} along the schedule.
    pub worst_monotonicity_drop: f64,
    pub monotone: bool,
    /// Whether two consecutive levels agreed within tol.
    pub cauchy_reached: bool,
    /// The unshifted solve started from the last level.
    pub limit: SolveReport,
    pub converged: bool,
}

/// The default schedule 1, 2, 4, ..., 2^k.
pub fn doubling_schedule(k: u32) -> Vec<u64> {
    (0..=k).map(|i| 1u64 << i).collect()
}

/// Continuation along `schedule`; ū is the solution of the unshifted
/// problem, warm-started from the last level. Returns the level solutions
/// as well.
pub fn solve_pure_singular(
    params: &ProblemParams,
    grid: Arc<RadialGrid>,
    k: &KernelMatrix,
    schedule: &[u64],
    opts: &SolverOptions,
) -> Result<(RadialFunction, Vec<RadialFunction>, ContinuationReport)> {
    if schedule.first() != Some(&1) || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::usage("schedule must be strictly increasing and start at 1"));
    }
    let mut levels = Vec::new();
    let mut reports = Vec::new();
    // Positive start: at U ≡ 0 the p > 2 Hessian of E vanishes identically.
    let beta = params.beta_star();
    let mut current = RadialFunction::from_fn(grid.clone(), |r| (1.0 + r).powf(-beta))?;
    let mut worst_drop: f64 = f64::NEG_INFINITY;
    let mut cauchy = false;
    for &n in schedule {
        let prob = RegularizedProblem::new(params, n, grid.clone(), k)?;
        let (u, rep) = minimize_jn(&prob, &current, opts)?;
        if let Some(prev) = levels.last() {
            let prev: &RadialFunction = prev;
            let drop = prev.values().iter().zip(u.values()).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
            worst_drop = worst_drop.max(drop);
            if prev.sup_distance(&u) <= opts.tol {
                cauchy = true;
            }
        }
        current = u.clone();
        levels.push(u);
        reports.push(rep);
        if cauchy {
            break;
        }
    }
    let a = nodal_a(&grid, params);
    let obj = Objective {
        k,
        params,
        grid: grid.clone(),
        omega: grid.volume_weights(params.n),
        reaction: Singular { a: &a, gamma: params.gamma },
        free: (0..grid.len()).collect(),
    };
    let (u_bar, limit) = if current.values().iter().all(|&v| v > 0.0) {
        minimize(&obj, current.values().to_vec(), opts, "J_inf")?
    } else {
        return Err(Error::Convergence {
            what: "pure-singular continuation (nonpositive level solution)".into(),
            best: current.values().iter().fold(f64::INFINITY, |m, &v| m.min(v)),
            err_est: f64::NAN,
        });
    };
    let worst_drop = if levels.len() > 1 { worst_drop } else { 0.0 };
    let scale = u_bar.sup_norm().max(1.0);
    let report = ContinuationReport {
        converged: limit.converged && reports.iter().all(|r| r.converged),
        schedule: schedule[..levels.len()].to_vec(),
        levels: reports,
        worst_monotonicity_drop: worst_drop,
        monotone: worst_drop <= 1e-8 * scale,
        cauchy_reached: cauchy,
        limit,
    };
    Ok((u_bar, levels, report))
}

/// u_R: minimizes E subject to U = 1 on nodes with r ≤ R.
pub fn solve_capacitary(
    r_cap: f64,
    params: &ProblemParams,
    grid: Arc<RadialGrid>,
    k: &KernelMatrix,
    opts: &SolverOptions,
) -> Result<(RadialFunction, SolveReport)> {
    if !(r_cap > 0.0 && r_cap < grid.r_max() / 4.0) {
        return Err(Error::domain(format!("capacitary radius {r_cap} must lie in (0, R_max/4)")));
    }
    let idx = grid
        .node_index(r_cap)
        .ok_or_else(|| Error::usage(format!("grid has no node at R = {r_cap}; regenerate the grid with anchor {r_cap}")))?;
    if grid.geometry_hash() != k.geometry_hash() {
        return Err(Error::usage("grid and kernel matrix do not match"));
    }
    let beta = params.beta_star();
    let init: Vec<f64> = grid.nodes().iter().map(|&r| if r <= r_cap { 1.0 } else { (r_cap / r).powf(beta) }).collect();
    let obj = Objective {
        k,
        params,
        grid: grid.clone(),
        omega: grid.volume_weights(params.n),
        reaction: NoReaction,
        free: ((idx + 1)..grid.len()).collect(),
    };
    minimize(&obj, init, opts, "capacitary")
}

/// Minimizes J̄ built from [`truncated_rhs`], starting at ū.
pub fn solve_full(
    params: &ProblemParams,
    k: &KernelMatrix,
    u_bar: &RadialFunction,
    kappa: f64,
    opts: &SolverOptions,
) -> Result<(RadialFunction, SolveReport)> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::domain(format!("kappa = {kappa} outside [0, 1]")));
    }
    if let Some(i) = u_bar.values().iter().position(|&v| !(v > 0.0)) {
        return Err(Error::domain(format!("truncation level must be positive; node {i} is {}", u_bar.values()[i])));
    }
    let grid = u_bar.grid().clone();
    let a = nodal_a(&grid, params);
    let obj = Objective {
        k,
        params,
        grid: grid.clone(),
        omega: grid.volume_weights(params.n),
        reaction: Truncated { a: &a, floor: u_bar.values(), gamma: params.gamma, r: params.r_exp, kappa },
        free: (0..grid.len()).collect(),
    };
    minimize(&obj, u_bar.values().to_vec(), opts, &format!("J_bar(kappa={kappa})"))
}

/// Euler–Lagrange residual of the unshifted singular equation at each node,
/// divided by the nodal volume.
pub fn singular_residual(params: &ProblemParams, k: &KernelMatrix, u: &RadialFunction) -> Result<Vec<f64>> {
    let r = weak_residual(u, k, params)?;
    let omega = u.grid().volume_weights(params.n);
    Ok(u.grid()
        .nodes()
        .iter()
        .zip(u.values())
        .zip(r.iter().zip(&omega))
        .map(|((&x, &v), (&ri, &om))| (ri - om * weight_a(x, params) * v.powf(-params.gamma)) / om)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_primitive_values() {
        assert_eq!(a_primitive(1.0, 0.0, 3, 0.5), 0.0);
        assert!((a_primitive(2.0, -1.5, 4, 0.5) - 2.0 * 2.0 * -1.5).abs() < 1e-15);
        let v = a_primitive(1.0, 1.0, 1, 0.5);
        assert!((v - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn truncated_rhs_values() {
        let pr = ProblemParams::new(3, 0.5, 2.5, 0.5, 1.5, 1.0, 2.0).unwrap();
        // a(1) = 2/2 = 1.
        let v = truncated_rhs(1.0, 2.0, 1.0, &pr, 1.0).unwrap();
        assert!((v - (0.5f64.sqrt() + 2.0 * 2f64.sqrt())).abs() < 1e-14);
        let below = truncated_rhs(1.0, 0.3, 1.0, &pr, 1.0).unwrap();
        assert_eq!(below, truncated_rhs(1.0, -4.0, 1.0, &pr, 1.0).unwrap());
        assert!(truncated_rhs(1.0, 1.0, 0.0, &pr, 1.0).is_err());
    }

    #[test]
    fn schedule_doubles() {
        assert_eq!(doubling_schedule(3), vec![1, 2, 4, 8]);
    }
}
