//! Angular reduction of the kernel |x - y|^{-(N+sp)} and the power-law
//! constant C(β).
//!
//! For radial arguments the double integral over R^N × R^N collapses to a
//! double integral over radii, with the angular part captured by
//!
//! ```text
//! Φ(ρ) = |S^{N-2}| ∫_{-1}^{1} (1 - t²)^{w} (1 - 2tρ + ρ²)^{-(N+sp)/2} dt,   0 ≤ ρ < 1.
//! ```
//!
//! The exponent `w` is selectable through [`AngularWeight`]. All integrals are
//! evaluated with composite Gauss rules on panels graded toward the points
//! where the integrands lose smoothness, so nothing here relies on blind
//! bisection.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::quadrature::{gauss_jacobi_left, gauss_legendre, Rule};
use crate::special::{gamma, unit_sphere_area};

/// Exponent of (1 - t²) in the angular integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AngularWeight {
    /// (N - 2)/2.
    #[default]
    Alternate,
    /// (N - 3)/2, the sphere-slicing weight.
    Standard,
}

impl AngularWeight {
    pub fn exponent(self, n: u32) -> f64 {
        match self {
            AngularWeight::Alternate => 0.5 * (n as f64 - 2.0),
            AngularWeight::Standard => 0.5 * (n as f64 - 3.0),
        }
    }

    /// Power of sin θ after t = cos θ: 2w + 1, always a nonnegative integer.
    fn sine_power(self, n: u32) -> i32 {
        match self {
            AngularWeight::Alternate => n as i32 - 1,
            AngularWeight::Standard => n as i32 - 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss nodes per panel on the first pass; doubled on each refinement.
    pub nodes: usize,
    /// Exponent e of the weight u^e used on the panel touching a power-type
    /// endpoint singularity.
    pub endpoint_exponent: f64,
    pub tol: f64,
    pub max_refinements: usize,
    pub angular: AngularWeight,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { nodes: 12, endpoint_exponent: 0.0, tol: 1e-10, max_refinements: 4, angular: AngularWeight::Alternate }
    }
}

impl QuadratureSpec {
    /// Defaults with the endpoint exponent p - 1 - sp of the C(β) integrand.
    pub fn for_params(params: &ProblemParams) -> Self {
        QuadratureSpec { endpoint_exponent: params.p - 1.0 - params.sp(), ..Default::default() }
    }

    pub fn with_angular(mut self, angular: AngularWeight) -> Self {
        self.angular = angular;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::domain(format!("quadrature nodes = {} < 2", self.nodes)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::domain(format!("quadrature tol = {} must be > 0", self.tol)));
        }
        if !(self.endpoint_exponent > -1.0) {
            return Err(Error::domain(format!("endpoint exponent {} must exceed -1", self.endpoint_exponent)));
        }
        Ok(())
    }
}

/// A quadrature result with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadValue {
    pub value: f64,
    pub abs_err: f64,
    /// Nodes per panel used for the reported value.
    pub nodes: usize,
}

impl QuadValue {
    pub fn rel_err(&self) -> f64 {
        if self.value == 0.0 {
            self.abs_err
        } else {
            self.abs_err / self.value.abs()
        }
    }
}

/// Surface measure of the unit (N-2)-sphere, 2π^{(N-1)/2} / Γ((N-1)/2).
pub fn sphere_measure(n: u32) -> Result<f64> {
    if n < 3 {
        return Err(Error::domain(format!("sphere_measure needs N >= 3, got {n}")));
    }
    Ok(unit_sphere_area(n - 2))
}

/// Φ(ρ) on a fixed composite rule. `u` must equal 1 - ρ; it is passed
/// separately so the near-diagonal regime keeps full relative precision.
pub(crate) fn phi_fixed(rho: f64, u: f64, n: u32, sp: f64, angular: AngularWeight, rule: &Rule) -> f64 {
    let b = 0.5 * (n as f64 + sp);
    let k = angular.sine_power(n);
    let f = |theta: f64| {
        let h = (0.5 * theta).sin();
        theta.sin().powi(k) * (u * u + 4.0 * rho * h * h).powf(-b)
    };
    let mut acc = 0.0;
    if u >= 0.5 {
        acc += rule.integrate_unit(0.0, 0.5 * PI, f);
        acc += rule.integrate_unit(0.5 * PI, PI, f);
    } else {
        // Peak of width ~u at θ = 0; panels double in length away from it.
        let mut lo = 0.0;
        let mut hi = u;
        while lo < PI {
            let top = hi.min(PI);
            acc += rule.integrate_unit(lo, top, f);
            lo = top;
            hi = 2.0 * top;
        }
    }
    unit_sphere_area(n - 2) * acc
}

/// Φ(ρ) to relative tolerance `quad.tol`, with the achieved error estimate.
pub fn phi(rho: f64, params: &ProblemParams, quad: &QuadratureSpec) -> Result<QuadValue> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::domain(format!("phi needs 0 <= rho < 1, got {rho}")));
    }
    phi_with_gap(rho, 1.0 - rho, params, quad)
}

/// Φ at ρ = 1 - u, given u > 0 directly.
pub fn phi_with_gap(rho: f64, u: f64, params: &ProblemParams, quad: &QuadratureSpec) -> Result<QuadValue> {
    quad.validate()?;
    if !(u > 0.0) || !(rho >= 0.0) {
        return Err(Error::domain(format!("phi needs 0 <= rho < 1, got rho={rho}, 1-rho={u}")));
    }
    let (n, sp) = (params.n, params.sp());
    refine(quad, "phi", |nodes| {
        let rule = gauss_legendre(nodes);
        (phi_fixed(rho, u, n, sp, quad.angular, &rule), None)
    })
}

/// Runs `eval` at nodes n, 2n, 4n, ... until successive values agree within
/// tol relative to the scale returned by `eval` (or the value itself).
fn refine<F>(quad: &QuadratureSpec, what: &str, mut eval: F) -> Result<QuadValue>
where
    F: FnMut(usize) -> (f64, Option<f64>),
{
    let mut nodes = quad.nodes;
    let (mut prev, _) = eval(nodes);
    let mut last_err = f64::INFINITY;
    for _ in 0..=quad.max_refinements {
        let next_nodes = 2 * nodes;
        let (cur, scale) = eval(next_nodes);
        let err = (cur - prev).abs();
        let scale = scale.unwrap_or(cur.abs());
        if err <= quad.tol * scale || err == 0.0 {
            return Ok(QuadValue { value: cur, abs_err: err, nodes: next_nodes });
        }
        prev = cur;
        nodes = next_nodes;
        last_err = err;
    }
    Err(Error::Convergence { what: what.to_string(), best: prev, err_est: last_err })
}

fn check_beta(beta: f64, params: &ProblemParams) -> Result<()> {
    let (lo, hi) = params.beta_window();
    if !(beta > lo && beta < hi) {
        return Err(Error::domain(format!("beta = {beta} outside the open interval ((N-sp)/p, N/(p-1)) = ({lo}, {hi})")));
    }
    Ok(())
}

/// Pieces of the C(β) integrand; `ln_rho` and `u = 1 - ρ` are both supplied
/// so that neither endpoint suffers cancellation.
struct CbetaIntegrand {
    n: u32,
    sp: f64,
    p: f64,
    beta: f64,
    d: f64,
    angular: AngularWeight,
}

impl CbetaIntegrand {
    fn eval(&self, rho: f64, u: f64, ln_rho: f64, rule: &Rule) -> f64 {
        let bracket = -(self.d * ln_rho).exp_m1();
        if bracket == 0.0 {
            return 0.0;
        }
        let gap = -(self.beta * ln_rho).exp_m1();
        let weight = ((self.sp - 1.0) * ln_rho).exp();
        weight * bracket * gap.powf(self.p - 1.0) * phi_fixed(rho, u, self.n, self.sp, self.angular, rule)
    }
}

/// Ratio between consecutive panel endpoints on graded panels.
const GRADING: f64 = 0.25;
const RHO_FLOOR: f64 = 1e-16;
const GAP_FLOOR: f64 = 1e-10;

fn c_beta_fixed(f: &CbetaIntegrand, endpoint_exponent: f64, nodes: usize) -> (f64, f64) {
    let rule = gauss_legendre(nodes);
    let mut value = 0.0;
    let mut l1 = 0.0;
    // ρ ∈ [ρ_floor, 1/2], panels [qρ, ρ].
    let mut hi = 0.5;
    while hi > RHO_FLOOR {
        let lo = (hi * GRADING).max(RHO_FLOOR);
        let h = hi - lo;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let rho = lo + h * x;
            let v = w * h * f.eval(rho, 1.0 - rho, rho.ln(), &rule);
            value += v;
            l1 += v.abs();
        }
        hi = lo;
    }
    // [0, ρ_floor]: Φ ≈ Φ(0), (1 - ρ^β) ≈ 1, integrate the two powers exactly.
    let phi0 = phi_fixed(0.0, 1.0, f.n, f.sp, f.angular, &rule);
    let e1 = f.sp;
    let e2 = f.sp + f.d;
    let rem = phi0 * (RHO_FLOOR.powf(e1) / e1 - RHO_FLOOR.powf(e2) / e2);
    value += rem;
    l1 += rem.abs();
    // u = 1 - ρ ∈ [u_floor, 1/2].
    let mut hi = 0.5;
    while hi > GAP_FLOOR {
        let lo = (hi * GRADING).max(GAP_FLOOR);
        let h = hi - lo;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let u = lo + h * x;
            let v = w * h * f.eval(1.0 - u, u, (-u).ln_1p(), &rule);
            value += v;
            l1 += v.abs();
        }
        hi = lo;
    }
    // [0, u_floor] with the weight u^e folded into a Gauss–Jacobi rule.
    let gj = gauss_jacobi_left(nodes, endpoint_exponent);
    for (x, w) in gj.nodes.iter().zip(&gj.weights) {
        let u = GAP_FLOOR * x;
        let g = f.eval(1.0 - u, u, (-u).ln_1p(), &rule) / u.powf(endpoint_exponent);
        let v = w * GAP_FLOOR.powf(endpoint_exponent + 1.0) * g;
        value += v;
        l1 += v.abs();
    }
    (2.0 * value, 2.0 * l1)
}

/// C(β) = 2 ∫₀¹ ρ^{sp-1} [1 - ρ^{N-sp-β(p-1)}] |1 - ρ^β|^{p-1} Φ(ρ) dρ.
///
/// Error is measured relative to ∫|integrand|, which stays meaningful at the
/// zero crossing.
pub fn c_beta(beta: f64, params: &ProblemParams, quad: &QuadratureSpec) -> Result<QuadValue> {
    quad.validate()?;
    check_beta(beta, params)?;
    let f = CbetaIntegrand {
        n: params.n,
        sp: params.sp(),
        p: params.p,
        beta,
        d: params.nf() - params.sp() - beta * (params.p - 1.0),
        angular: quad.angular,
    };
    refine(quad, "c_beta", |nodes| {
        let (v, l1) = c_beta_fixed(&f, quad.endpoint_exponent, nodes);
        (v, Some(l1))
    })
}

/// λ(β) = 2^{2s} Γ((β+2s)/2) Γ((N-β)/2) / (Γ(β/2) Γ((N-β-2s)/2)): the
/// classical multiplier in (-Δ)^s |x|^{-β} = λ(β) |x|^{-β-2s} for the
/// normalized fractional Laplacian.
pub fn riesz_constant_p2(beta: f64, n: u32, s: f64) -> Result<f64> {
    let nf = n as f64;
    if !(beta > 0.0 && beta < nf) {
        return Err(Error::domain(format!("riesz constant needs 0 < beta < N, got {beta}")));
    }
    let den_arg = 0.5 * (nf - beta - 2.0 * s);
    if den_arg <= 0.0 && den_arg == den_arg.floor() {
        return Ok(0.0);
    }
    let num1 = 0.5 * (beta + 2.0 * s);
    let num2 = 0.5 * (nf - beta);
    for a in [num1, num2] {
        if a <= 0.0 && a == a.floor() {
            return Err(Error::domain(format!("beta = {beta} hits a Gamma pole")));
        }
    }
    Ok(4f64.powf(s) * gamma(num1) * gamma(num2) / (gamma(0.5 * beta) * gamma(den_arg)))
}

/// C_{N,s} = s 4^s Γ((N+2s)/2) / (π^{N/2} Γ(1-s)), the normalization of the
/// pointwise fractional Laplacian.
pub fn fractional_laplacian_constant(n: u32, s: f64) -> f64 {
    let nf = n as f64;
    s * 4f64.powf(s) * gamma(0.5 * nf + s) / (PI.powf(0.5 * nf) * gamma(1.0 - s))
}

/// Outcome of comparing C(β) at p = 2 against the closed form λ(β).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszCrossCheck {
    pub angular: AngularWeight,
    /// C(β)/λ(β) at the first ladder point.
    pub calibration: f64,
    /// max over the ladder of ||C(β)| - |cal λ(β)|| / |cal λ(β)|.
    pub max_rel_mismatch: f64,
    /// (β, C(β), λ(β)) on the ladder inside ((N-2s)/2, N-2s).
    pub ladder: Vec<(f64, f64, f64)>,
    /// (β, C(β), λ(β)) above the zero, on (N-2s, N).
    pub above_zero: Vec<(f64, f64, f64)>,
    /// Whether C and λ share their sign at every point above the zero.
    pub signs_agree_above_zero: bool,
}

/// Runs the p = 2 cross-check for dimension `n` and order `s` with the given
/// angular weight; `points` ≥ 2 ladder points.
pub fn riesz_cross_check(n: u32, s: f64, angular: AngularWeight, points: usize) -> Result<RieszCrossCheck> {
    let params = ProblemParams::operator(n, s, 2.0)?;
    let quad = QuadratureSpec::for_params(&params).with_angular(angular);
    let nf = n as f64;
    let zero = nf - 2.0 * s;
    let lo = 0.5 * zero;
    let eval = |beta: f64| -> Result<(f64, f64, f64)> {
        Ok((beta, c_beta(beta, &params, &quad)?.value, riesz_constant_p2(beta, n, s)?))
    };
    let ladder = (1..=points.max(2))
        .map(|i| eval(lo + (zero - lo) * i as f64 / (points.max(2) + 1) as f64))
        .collect::<Result<Vec<_>>>()?;
    let calibration = ladder[0].1 / ladder[0].2;
    let max_rel_mismatch =
        ladder.iter().map(|&(_, c, l)| (c.abs() - (calibration * l).abs()).abs() / (calibration * l).abs()).fold(0.0, f64::max);
    let above_zero = [0.25, 0.5, 0.75].iter().map(|t| eval(zero + (nf - zero) * t)).collect::<Result<Vec<_>>>()?;
    let signs_agree_above_zero = above_zero.iter().all(|&(_, c, l)| c.signum() == (calibration * l).signum());
    Ok(RieszCrossCheck { angular, calibration, max_rel_mismatch, ladder, above_zero, signs_agree_above_zero })
}

/// Runs the cross-check for both angular weights and returns the one whose
/// mismatch is smaller, together with both outcomes.
pub fn select_angular_weight(n: u32, s: f64) -> Result<(AngularWeight, [RieszCrossCheck; 2])> {
    let alternate = riesz_cross_check(n, s, AngularWeight::Alternate, 5)?;
    let standard = riesz_cross_check(n, s, AngularWeight::Standard, 5)?;
    let pick =
        if standard.max_rel_mismatch < alternate.max_rel_mismatch { AngularWeight::Standard } else { AngularWeight::Alternate };
    Ok((pick, [alternate, standard]))
}

/// Fast evaluator of G(u) = u^{1+sp} Φ(1 - u), u ∈ (0, 1].
///
/// Piecewise Chebyshev interpolants on dyadic panels [2^{-k-1}, 2^{-k}] plus
/// two panels on [1/2, 1]; each panel is analytic away from u = 0 so degree 15
/// reaches about 1e-12 relative accuracy.
#[derive(Debug, Clone)]
pub struct PhiTable {
    sp: f64,
    panels: Vec<ChebPanel>,
    g_floor: f64,
}

#[derive(Debug, Clone)]
struct ChebPanel {
    lo: f64,
    hi: f64,
    coef: Vec<f64>,
}

const TABLE_DEGREE: usize = 16;
const TABLE_DYADIC: i32 = 52;

impl ChebPanel {
    fn eval(&self, u: f64) -> f64 {
        let x = (2.0 * u - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (0.0, 0.0);
        for c in self.coef.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coef[0]
    }
}

impl PhiTable {
    pub fn new(params: &ProblemParams, angular: AngularWeight) -> Self {
        let (n, sp) = (params.n, params.sp());
        let rule = gauss_legendre(24);
        let g = |u: f64| u.powf(1.0 + sp) * phi_fixed(1.0 - u, u, n, sp, angular, &rule);
        let mut bounds = vec![(0.75, 1.0), (0.5, 0.75)];
        for k in 1..=TABLE_DYADIC {
            let hi = 0.5f64.powi(k);
            bounds.push((0.5 * hi, hi));
        }
        let panels: Vec<ChebPanel> = bounds
            .into_iter()
            .map(|(lo, hi)| {
                let m = TABLE_DEGREE;
                let vals: Vec<f64> = (0..m)
                    .map(|j| {
                        let x = (PI * (j as f64 + 0.5) / m as f64).cos();
                        g(0.5 * (lo + hi) + 0.5 * (hi - lo) * x)
                    })
                    .collect();
                let coef = (0..m)
                    .map(|k| {
                        let s: f64 =
                            vals.iter().enumerate().map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / m as f64).cos()).sum();
                        if k == 0 {
                            s / m as f64
                        } else {
                            2.0 * s / m as f64
                        }
                    })
                    .collect();
                ChebPanel { lo, hi, coef }
            })
            .collect();
        let g_floor = panels.last().map(|p| p.eval(p.lo)).unwrap_or(0.0);
        PhiTable { sp, panels, g_floor }
    }

    /// G(u) = u^{1+sp} Φ(1 - u).
    #[inline]
    pub fn g(&self, u: f64) -> f64 {
        if u >= 0.5 {
            let p = if u >= 0.75 { &self.panels[0] } else { &self.panels[1] };
            return p.eval(u.min(1.0));
        }
        if u <= 0.0 {
            return self.g_floor;
        }
        // u ∈ [2^{-k-1}, 2^{-k}) ⇒ panel index k + 1.
        let k = (-u.log2()).floor() as i32;
        if k > TABLE_DYADIC {
            return self.g_floor;
        }
        let k = k.max(1);
        self.panels[(k + 1) as usize].eval(u)
    }

    /// Φ(ρ) at ρ = 1 - u.
    pub fn phi(&self, u: f64) -> f64 {
        self.g(u) / u.powf(1.0 + self.sp)
    }
}

/// One row of a C(β) sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CbetaRow {
    pub beta: f64,
    pub c_beta: f64,
    pub rel_err: f64,
    pub quad_nodes: usize,
}

/// C(β) on `steps` equally spaced points of [beta_min, beta_max]; output
/// order follows the input order regardless of worker count.
pub fn cbeta_sweep(
    params: &ProblemParams,
    quad: &QuadratureSpec,
    beta_min: f64,
    beta_max: f64,
    steps: usize,
) -> Result<Vec<CbetaRow>> {
    if steps < 2 || !(beta_max > beta_min) {
        return Err(Error::usage("beta sweep needs steps >= 2 and beta_max > beta_min"));
    }
    let betas: Vec<f64> = (0..steps).map(|i| beta_min + (beta_max - beta_min) * i as f64 / (steps - 1) as f64).collect();
    betas
        .par_iter()
        .map(|&beta| {
            let q = c_beta(beta, params, quad)?;
            Ok(CbetaRow { beta, c_beta: q.value, rel_err: q.rel_err(), quad_nodes: q.nodes })
        })
        .collect()
}

pub fn cbeta_filename(params: &ProblemParams) -> String {
    format!("cbeta_N{}_s{}_p{}.csv", params.n, params.s, params.p)
}

/// Writes the sweep; the optional comment line ahead of the header records
/// the angular weight and the p = 2 calibration constant.
pub fn write_cbeta_csv(dir: &Path, params: &ProblemParams, rows: &[CbetaRow], meta: Option<&str>) -> Result<PathBuf> {
    let path = dir.join(cbeta_filename(params));
    let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
    if let Some(m) = meta {
        writeln!(f, "# {m}")?;
    }
    writeln!(f, "beta,c_beta,rel_err,quad_nodes")?;
    for r in rows {
        writeln!(f, "{:.15e},{:.15e},{:.6e},{}", r.beta, r.c_beta, r.rel_err, r.quad_nodes)?;
    }
    f.flush()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, s: f64, p: f64) -> ProblemParams {
        ProblemParams::operator(n, s, p).unwrap()
    }

    #[test]
    fn sphere_measure_values() {
        assert!((sphere_measure(3).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_measure(4).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_measure(5).unwrap() - 2.0 * PI * PI).abs() < 1e-13);
        assert!(matches!(sphere_measure(2), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_at_origin_alternate_weight() {
        let q = QuadratureSpec::default();
        let v3 = phi(0.0, &params(3, 0.5, 2.0), &q).unwrap();
        assert!((v3.value - PI * PI).abs() < 1e-12);
        let v4 = phi(0.0, &params(4, 0.3, 2.5), &q).unwrap();
        assert!((v4.value - 16.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn phi_at_origin_standard_weight_is_sphere_area() {
        let q = QuadratureSpec::default().with_angular(AngularWeight::Standard);
        for n in 3..6 {
            let v = phi(0.0, &params(n, 0.4, 2.0), &q).unwrap();
            assert!((v.value - unit_sphere_area(n - 1)).abs() < 1e-12 * v.value);
        }
    }

    #[test]
    fn phi_rejects_rho_at_one() {
        let q = QuadratureSpec::default();
        assert!(matches!(phi(1.0, &params(3, 0.5, 2.0), &q), Err(Error::Domain(_))));
        assert!(matches!(phi(-0.1, &params(3, 0.5, 2.0), &q), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_reports_convergence_failure() {
        let q = QuadratureSpec { nodes: 2, tol: 1e-300, max_refinements: 1, ..Default::default() };
        match phi(0.99, &params(3, 0.5, 2.0), &q) {
            Err(Error::Convergence { best, .. }) => assert!(best > 0.0),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn riesz_values() {
        let v = riesz_constant_p2(1.0, 3, 0.5).unwrap();
        assert!((v - 2.0 / PI).abs() < 1e-14);
        assert_eq!(riesz_constant_p2(2.0, 3, 0.5).unwrap(), 0.0);
        assert!(riesz_constant_p2(1.99, 3, 0.5).unwrap() > 0.0);
        assert!(riesz_constant_p2(2.01, 3, 0.5).unwrap() < 0.0);
        assert!(riesz_constant_p2(3.0, 3, 0.5).is_err());
    }

    #[test]
    fn c_beta_rejects_closed_endpoints() {
        let pr = params(3, 0.5, 2.0);
        let q = QuadratureSpec::for_params(&pr);
        let (lo, hi) = pr.beta_window();
        assert!(c_beta(lo, &pr, &q).is_err());
        assert!(c_beta(hi, &pr, &q).is_err());
    }

    #[test]
    fn table_matches_direct_phi() {
        let pr = params(3, 0.5, 2.5);
        let table = PhiTable::new(&pr, AngularWeight::Standard);
        let q = QuadratureSpec { tol: 1e-13, ..QuadratureSpec::default().with_angular(AngularWeight::Standard) };
        for &u in &[1.0, 0.9, 0.61, 0.5, 0.3, 0.07, 1e-3, 3.3e-6, 1e-9, 2e-13] {
            let direct = phi_with_gap(1.0 - u, u, &pr, &q).unwrap().value;
            let fast = table.phi(u);
            assert!((fast - direct).abs() < 1e-11 * direct, "u={u}: {fast} vs {direct}");
        }
    }
}
