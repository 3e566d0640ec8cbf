//! Measurements on computed solutions: decay fits, envelope constants,
//! power-law residuals, comparison and Harnack checks, and the JSON report.

use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::{RadialFunction, RadialGrid};
use crate::kernel::{c_beta, AngularWeight, QuadratureSpec};
use crate::operator::{energy_seminorm, weak_residual, KernelMatrix};
use crate::params::ProblemParams;
use crate::quadrature::gauss_legendre;
use crate::solver::SolveReport;
use crate::special::{unit_ball_volume, unit_sphere_area};

/// Serializes a float in scientific notation with 15 significant digits;
/// non-finite values become null.
pub fn sci<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        let raw = serde_json::value::RawValue::from_string(format!("{x:.14e}")).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    } else {
        s.serialize_none()
    }
}

fn sci_pair<S: Serializer>(x: &(f64, f64), s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    struct W(f64);
    impl Serialize for W {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            sci(&self.0, s)
        }
    }
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&W(x.0))?;
    t.serialize_element(&W(x.1))?;
    t.end()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// β̂ with U ≈ amplitude · r^{-β̂}.
    #[serde(serialize_with = "sci")]
    pub exponent: f64,
    #[serde(serialize_with = "sci")]
    pub amplitude: f64,
    #[serde(serialize_with = "sci_pair")]
    pub window: (f64, f64),
    #[serde(serialize_with = "sci")]
    pub rms_residual: f64,
    pub points: usize,
}

fn window_nodes(grid: &RadialGrid, window: (f64, f64)) -> Result<Vec<usize>> {
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi && hi <= grid.r_max()) {
        return Err(Error::usage(format!("window ({lo}, {hi}) must satisfy 0 < lo < hi <= R_max = {}", grid.r_max())));
    }
    let idx: Vec<usize> = (0..grid.len()).filter(|&i| grid.nodes()[i] >= lo && grid.nodes()[i] <= hi).collect();
    if idx.is_empty() {
        return Err(Error::usage(format!("window ({lo}, {hi}) contains no grid nodes")));
    }
    Ok(idx)
}

/// Least squares of log U against log r over the window.
pub fn fit_decay(u: &RadialFunction, window: (f64, f64)) -> Result<DecayFit> {
    let idx = window_nodes(u.grid(), window)?;
    if idx.len() < 2 {
        return Err(Error::usage("decay fit needs at least two nodes in the window"));
    }
    let mut pts = Vec::with_capacity(idx.len());
    for &i in &idx {
        let v = u.values()[i];
        if !(v > 0.0) {
            return Err(Error::domain(format!("nonpositive value {v} at node {i} inside the fit window")));
        }
        pts.push((u.grid().nodes()[i].ln(), v.ln()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let rms = (pts.iter().map(|p| (p.1 - icept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(DecayFit { exponent: -slope, amplitude: icept.exp(), window, rms_residual: rms, points: idx.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    #[serde(serialize_with = "sci")]
    pub measured: f64,
    #[serde(serialize_with = "sci")]
    pub target: f64,
    #[serde(serialize_with = "sci")]
    pub tolerance: f64,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, pass: bool, measured: f64, target: f64, tolerance: f64) -> Self {
        CheckRecord { name: name.into(), pass, measured, target, tolerance }
    }

    /// Passes when measured ≤ target + tolerance.
    pub fn at_most(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        Self::new(name, measured <= target + tolerance, measured, target, tolerance)
    }

    /// Passes when |measured - target| ≤ tolerance · |target|.
    pub fn relative(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        Self::new(name, (measured - target).abs() <= tolerance * target.abs(), measured, target, tolerance)
    }
}

/// Envelope constants c̃ = min U r^{β*} and D = max U r^{β_def} on a window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sandwich {
    #[serde(serialize_with = "sci")]
    pub lower_constant: f64,
    #[serde(serialize_with = "sci")]
    pub upper_constant: f64,
    #[serde(serialize_with = "sci")]
    pub lower_exponent: f64,
    #[serde(serialize_with = "sci")]
    pub upper_exponent: f64,
    /// Fitted exponent on the same window.
    #[serde(serialize_with = "sci")]
    pub fitted_exponent: f64,
    /// Which candidate exponent the fit lies closest to: "lower" (β*),
    /// "upper" (β_def) or "upper_alt" ((N+α-γβ*+sp)/(p-1)).
    pub binding: &'static str,
    pub checks: Vec<CheckRecord>,
}

pub fn check_decay_sandwich(u: &RadialFunction, params: &ProblemParams, window: (f64, f64)) -> Result<Sandwich> {
    let idx = window_nodes(u.grid(), window)?;
    let (bs, bd) = (params.beta_star(), params.beta_def());
    let alt = (params.nf() + params.alpha - params.gamma * bs + params.sp()) / (params.p - 1.0);
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    for &i in &idx {
        let (r, v) = (u.grid().nodes()[i], u.values()[i]);
        if !(v > 0.0) {
            return Err(Error::domain(format!("nonpositive value {v} at node {i} inside the window")));
        }
        lower = lower.min(v * r.powf(bs));
        upper = upper.max(v * r.powf(bd));
    }
    let fitted = if idx.len() >= 2 { fit_decay(u, window)?.exponent } else { f64::NAN };
    let cands = [("lower", bs), ("upper", bd), ("upper_alt", alt)];
    let binding =
        cands.iter().min_by(|a, b| (a.1 - fitted).abs().total_cmp(&(b.1 - fitted).abs())).map(|c| c.0).unwrap_or("lower");
    let ok = |x: f64| x.is_finite() && x > 0.0;
    let checks = vec![
        CheckRecord::new("sandwich_lower_constant", ok(lower), lower, 0.0, 0.0),
        CheckRecord::new("sandwich_upper_constant", ok(upper), upper, 0.0, 0.0),
    ];
    Ok(Sandwich {
        lower_constant: lower,
        upper_constant: upper,
        lower_exponent: bs,
        upper_exponent: bd,
        fitted_exponent: fitted,
        binding,
        checks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FundamentalResidual {
    #[serde(serialize_with = "sci")]
    pub beta: f64,
    #[serde(serialize_with = "sci")]
    pub c_beta: f64,
    /// sup_i |R_i - λ^{p-1} C(β) m_i| / (scale · m_i) over tested nodes.
    #[serde(serialize_with = "sci")]
    pub normalized: f64,
    /// sup_i |R_i - λ^{p-1} C(β) m_i| before normalization.
    #[serde(serialize_with = "sci")]
    pub raw: f64,
    #[serde(serialize_with = "sci")]
    pub worst_radius: f64,
    pub tested_nodes: usize,
}

/// Residual of v_β = r^{-β} (held at its r_1 value on [0, r_1]) against
/// C(β) r^{-β(p-1)-sp}, tested on nodes with 2 ≤ r ≤ R_max/2.
pub fn fundamental_residual(
    beta: f64,
    params: &ProblemParams,
    grid: &RadialGrid,
    k: &KernelMatrix,
) -> Result<FundamentalResidual> {
    fundamental_residual_scaled(beta, 1.0, params, grid, k)
}

/// As [`fundamental_residual`] for λ v_β. The normalization scale is
/// λ^{p-1} max(|C(β)|, |C(β_ref)|) with β_ref = min(1.1β*, midpoint of
/// (β*, N/(p-1))), so v_{β*} is measured against a nearby nonzero constant.
pub fn fundamental_residual_scaled(
    beta: f64,
    lambda: f64,
    params: &ProblemParams,
    grid: &RadialGrid,
    k: &KernelMatrix,
) -> Result<FundamentalResidual> {
    let quad = QuadratureSpec::for_params(params).with_angular(AngularWeight::Standard);
    let cb = c_beta(beta, params, &quad)?.value;
    let bs = params.beta_star();
    let beta_ref = (1.1 * bs).min(0.5 * (bs + params.beta_window().1));
    let c_ref = c_beta(beta_ref, params, &quad)?.value;
    let lp = lambda.abs().powf(params.p - 1.0);
    let scale = lp * cb.abs().max(c_ref.abs());

    let g = Arc::new(grid.with_tail_exponent(beta)?);
    let r1 = g.nodes()[1];
    let v = RadialFunction::from_fn(g.clone(), |r| lambda * r.max(r1).powf(-beta))?;
    let res = weak_residual(&v, k, params)?;
    let nodes = g.nodes();
    let rule = gauss_legendre(8);
    let e = params.nf() - 1.0 - beta * (params.p - 1.0) - params.sp();
    let area = unit_sphere_area(params.n - 1);
    let (lo, hi) = (2.0, 0.5 * g.r_max());
    let mut worst = 0.0;
    let mut raw = 0.0;
    let mut at = f64::NAN;
    let mut tested = 0;
    for i in 1..g.cells() {
        let r = nodes[i];
        if r < lo || r > hi {
            continue;
        }
        tested += 1;
        let mut mi = 0.0;
        for (a, b, rising) in [(nodes[i - 1], r, true), (r, nodes[i + 1], false)] {
            for (z, w) in rule.nodes.iter().zip(&rule.weights) {
                let x = a + (b - a) * z;
                let phi = if rising { *z } else { 1.0 - z };
                mi += w * (b - a) * phi * x.powf(e);
            }
        }
        mi *= area;
        let d = (res[i] - lp * cb * mi).abs();
        raw = f64::max(raw, d);
        let nd = d / (scale * mi);
        if nd > worst {
            worst = nd;
            at = r;
        }
    }
    if tested == 0 {
        return Err(Error::usage("no grid nodes in 2 <= r <= R_max/2"));
    }
    Ok(FundamentalResidual { beta, c_beta: cb, normalized: worst, raw, worst_radius: at, tested_nodes: tested })
}

/// Node selection for comparison checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    All,
    /// r > R.
    Outside(f64),
    /// lo ≤ r ≤ hi.
    Annulus(f64, f64),
}

impl Region {
    pub fn contains(&self, r: f64) -> bool {
        match *self {
            Region::All => true,
            Region::Outside(big_r) => r > big_r,
            Region::Annulus(lo, hi) => r >= lo && r <= hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonOutcome {
    /// u ≤ v + tol on nodes outside the region.
    pub exterior_ordered: bool,
    /// R(u) ≤ R(v) + tol·ω on region nodes.
    pub residuals_ordered: bool,
    /// u ≤ v + tol on region nodes.
    pub conclusion: bool,
    /// All three hold.
    pub pass: bool,
    /// First node at which any of the three fails.
    pub violating_node: Option<usize>,
    #[serde(serialize_with = "sci")]
    pub worst_gap: f64,
}

/// Checks an ordered pair against the comparison principle: the pair passes
/// only when its hypotheses and its conclusion all hold, so a pair violating
/// u ≤ v anywhere is reported with the offending node.
pub fn comparison_check(
    u: &RadialFunction,
    v: &RadialFunction,
    region: Region,
    k: &KernelMatrix,
    params: &ProblemParams,
    tol: f64,
) -> Result<ComparisonOutcome> {
    if u.grid().geometry_hash() != v.grid().geometry_hash() {
        return Err(Error::usage("comparison pair lives on different grids"));
    }
    let ru = weak_residual(u, k, params)?;
    let rv = weak_residual(v, k, params)?;
    let omega = k.volume_weights();
    let mut out = ComparisonOutcome {
        exterior_ordered: true,
        residuals_ordered: true,
        conclusion: true,
        pass: true,
        violating_node: None,
        worst_gap: f64::NEG_INFINITY,
    };
    for (i, &r) in u.grid().nodes().iter().enumerate() {
        let gap = u.values()[i] - v.values()[i];
        let mut bad = false;
        if region.contains(r) {
            out.worst_gap = out.worst_gap.max(gap);
            if (ru[i] - rv[i]) / omega[i] > tol {
                out.residuals_ordered = false;
                bad = true;
            }
            if gap > tol {
                out.conclusion = false;
                bad = true;
            }
        } else if gap > tol {
            out.exterior_ordered = false;
            bad = true;
        }
        if bad && out.violating_node.is_none() {
            out.violating_node = Some(i);
        }
    }
    out.pass = out.exterior_ordered && out.residuals_ordered && out.conclusion;
    Ok(out)
}

/// inf_{B_{R/4}} u / (⨍_{B_R \ B_{R/2}} u^{p-1})^{1/(p-1)}, with the mean
/// taken over exact dual-cell ∩ annulus volumes.
pub fn harnack_ratio(u: &RadialFunction, big_r: f64, params: &ProblemParams) -> Result<f64> {
    let grid = u.grid();
    if !(big_r > 0.0 && big_r <= 0.5 * grid.r_max()) {
        return Err(Error::usage(format!("Harnack radius {big_r} must lie in (0, R_max/2 = {}]", 0.5 * grid.r_max())));
    }
    let nodes = grid.nodes();
    let vals = u.values();
    if let Some(i) = vals.iter().position(|&v| v < 0.0) {
        return Err(Error::domain(format!("Harnack ratio needs u >= 0; node {i} is {}", vals[i])));
    }
    let inf = nodes.iter().zip(vals).filter(|(r, _)| **r <= 0.25 * big_r).map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let vb = unit_ball_volume(params.n);
    let nn = params.n as i32;
    let (alo, ahi) = (0.5 * big_r, big_r);
    let m = grid.cells();
    let mut num = 0.0;
    let mut vol = 0.0;
    for i in 0..=m {
        let lo = if i == 0 { 0.0 } else { 0.5 * (nodes[i - 1] + nodes[i]) };
        let hi = if i == m { nodes[m] } else { 0.5 * (nodes[i] + nodes[i + 1]) };
        let (a, b) = (lo.max(alo), hi.min(ahi));
        if b > a {
            let w = vb * (b.powi(nn) - a.powi(nn));
            num += w * vals[i].powf(params.p - 1.0);
            vol += w;
        }
    }
    let mean = (num / vol).powf(1.0 / (params.p - 1.0));
    Ok(inf / mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarnackRecord {
    /// Largest σ ∈ (0, 1] with inf ≥ σ · mean: min(1, ratio).
    #[serde(serialize_with = "sci")]
    pub sigma_effective: f64,
    #[serde(serialize_with = "sci")]
    pub ratio: f64,
    #[serde(rename = "R", serialize_with = "sci")]
    pub radius: f64,
}

impl HarnackRecord {
    pub fn measure(u: &RadialFunction, big_r: f64, params: &ProblemParams) -> Result<Self> {
        let ratio = harnack_ratio(u, big_r, params)?;
        Ok(HarnackRecord { sigma_effective: ratio.min(1.0), ratio, radius: big_r })
    }
}

/// Bounded energies along a continuation: max/median of [u_n]_{s,p} ≤ 2.
pub fn uniform_bound_check(solutions: &[RadialFunction], k: &KernelMatrix, params: &ProblemParams) -> Result<CheckRecord> {
    if solutions.is_empty() {
        return Err(Error::usage("uniform bound check needs at least one solution"));
    }
    let mut norms =
        solutions.iter().map(|u| energy_seminorm(u, k, params).map(|e| e.powf(1.0 / params.p))).collect::<Result<Vec<f64>>>()?;
    norms.sort_by(f64::total_cmp);
    let max = *norms.last().unwrap_or(&0.0);
    let n = norms.len();
    let median = if n % 2 == 1 { norms[n / 2] } else { 0.5 * (norms[n / 2 - 1] + norms[n / 2]) };
    let ratio = if median > 0.0 {
        max / median
    } else if max == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    Ok(CheckRecord::new("uniform_bound_max_over_median", ratio.is_finite() && ratio <= 2.0, ratio, 2.0, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsEcho {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(serialize_with = "sci")]
    pub s: f64,
    #[serde(serialize_with = "sci")]
    pub p: f64,
    #[serde(serialize_with = "sci")]
    pub gamma: f64,
    #[serde(serialize_with = "sci")]
    pub r_exp: f64,
    #[serde(serialize_with = "sci")]
    pub alpha: f64,
    #[serde(serialize_with = "sci")]
    pub c_a: f64,
    #[serde(serialize_with = "sci")]
    pub beta_star: f64,
    #[serde(serialize_with = "sci")]
    pub beta_def: f64,
    #[serde(serialize_with = "sci")]
    pub p_star: f64,
}

impl From<&ProblemParams> for ParamsEcho {
    fn from(p: &ProblemParams) -> Self {
        ParamsEcho {
            n: p.n,
            s: p.s,
            p: p.p,
            gamma: p.gamma,
            r_exp: p.r_exp,
            alpha: p.alpha,
            c_a: p.c_a,
            beta_star: p.beta_star(),
            beta_def: p.beta_def(),
            p_star: p.p_star(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedFit {
    pub name: String,
    #[serde(flatten)]
    pub fit: DecayFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub params: ParamsEcho,
    pub checks: Vec<CheckRecord>,
    pub decay_fits: Vec<NamedFit>,
    pub harnack: Option<HarnackRecord>,
    pub notes: Vec<String>,
    pub solves: Vec<SolveReport>,
}

impl VerificationReport {
    pub fn new(params: &ProblemParams) -> Self {
        VerificationReport {
            params: params.into(),
            checks: Vec::new(),
            decay_fits: Vec::new(),
            harnack: None,
            notes: Vec::new(),
            solves: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grading;

    fn grid() -> Arc<RadialGrid> {
        Arc::new(RadialGrid::graded(64.0, 64, Grading::Stretch(20.0), Some(1.0), 1.5).unwrap())
    }

    #[test]
    fn exact_power_law_fit() {
        let u = RadialFunction::from_fn(grid(), |r| 3.0 * r.max(1e-3).powf(-2.0)).unwrap();
        let f = fit_decay(&u, (8.0, 32.0)).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12);
        assert!((f.amplitude - 3.0).abs() < 1e-11);
        assert!(f.rms_residual < 1e-12);
    }

    #[test]
    fn fit_rejects_nonpositive_and_empty() {
        let u = RadialFunction::from_fn(grid(), |r| 1.0 - r / 16.0).unwrap();
        assert!(matches!(fit_decay(&u, (8.0, 32.0)), Err(Error::Domain(_))));
        assert!(matches!(fit_decay(&u, (20.0, 10.0)), Err(Error::Usage(_))));
    }

    #[test]
    fn sandwich_on_exact_power() {
        let params = ProblemParams::new(3, 0.5, 2.5, 0.5, 1.2, 1.2, 1.0).unwrap();
        let bs = params.beta_star();
        let u = RadialFunction::from_fn(grid(), |r| 2.0 * r.max(1e-3).powf(-bs)).unwrap();
        let s = check_decay_sandwich(&u, &params, (8.0, 32.0)).unwrap();
        assert!((s.lower_constant - 2.0).abs() < 1e-12);
        assert_eq!(s.binding, "lower");
        assert!(s.checks.iter().all(|c| c.pass));
    }

    #[test]
    fn harnack_constant_is_one() {
        let params = ProblemParams::operator(3, 0.5, 2.5).unwrap();
        let u = RadialFunction::from_fn(grid(), |_| 0.7).unwrap();
        let h = harnack_ratio(&u, 4.0, &params).unwrap();
        assert!((h - 1.0).abs() < 1e-14);
        assert!(harnack_ratio(&u, 40.0, &params).is_err());
    }

    #[test]
    fn sci_format_has_many_digits() {
        let c = CheckRecord::new("x", true, 0.5, 1.0 / 3.0, f64::NAN);
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("5.00000000000000e-1"), "{s}");
        assert!(s.contains("3.33333333333333e-1"), "{s}");
        assert!(s.contains("\"tolerance\":null"), "{s}");
    }
}
