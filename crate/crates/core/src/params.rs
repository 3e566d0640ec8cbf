//! Problem exponents and constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents and constants of the model problem
/// `(-Δ_p)^s u = a(x)(u^{-γ} + κ u^r)` on R^N with `a = c_a / (1 + |x|^{N+α})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub n: u32,
    pub s: f64,
    pub p: f64,
    pub gamma: f64,
    pub r_exp: f64,
    pub alpha: f64,
    pub c_a: f64,
}

/// A violated growth/weight hypothesis, with the key that carries it.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub key: &'static str,
    pub message: String,
}

impl ProblemParams {
    /// Validates the structural constraints every module relies on:
    /// N ≥ 3, 0 < s < 1, 2 ≤ p < N/s, 0 < γ < 1, α > 0, c_a ≥ 0.
    ///
    /// The reaction-growth window for `r_exp` and the weight window for
    /// `alpha` are checked separately by [`ProblemParams::hypotheses`], since
    /// operator-level work (kernel tables, p = 2 cross-checks) is meaningful
    /// without them.
    pub fn new(n: u32, s: f64, p: f64, gamma: f64, r_exp: f64, alpha: f64, c_a: f64) -> Result<Self> {
        let params = ProblemParams { n, s, p, gamma, r_exp, alpha, c_a };
        params.check_structure()?;
        Ok(params)
    }

    /// Operator-only parameters (reaction exponents set to harmless defaults).
    pub fn operator(n: u32, s: f64, p: f64) -> Result<Self> {
        let beta_star = (n as f64 - s * p) / (p - 1.0);
        let gamma = 0.5;
        let alpha = gamma * beta_star + 0.5 * s * p;
        Self::new(n, s, p, gamma, 0.5 * (1.0 + (p - 1.0).max(1.0)), alpha, 1.0)
    }

    pub fn check_structure(&self) -> Result<()> {
        let nf = self.n as f64;
        let finite = [self.s, self.p, self.gamma, self.r_exp, self.alpha, self.c_a].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::domain("all parameters must be finite"));
        }
        if self.n < 3 {
            return Err(Error::domain(format!("N = {} but N >= 3 is required", self.n)));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return Err(Error::domain(format!("s = {} outside (0, 1)", self.s)));
        }
        if !(self.p >= 2.0 && self.p < nf / self.s) {
            return Err(Error::domain(format!("p = {} outside [2, N/s) = [2, {})", self.p, nf / self.s)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::domain(format!("gamma = {} outside (0, 1)", self.gamma)));
        }
        if self.alpha <= 0.0 {
            return Err(Error::domain(format!("alpha = {} must be positive", self.alpha)));
        }
        if self.c_a < 0.0 {
            return Err(Error::domain(format!("c_a = {} must be nonnegative", self.c_a)));
        }
        Ok(())
    }

    /// Violations of the reaction-growth and weight hypotheses.
    pub fn hypotheses(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.gamma > 0.0 && self.gamma < 1.0 && self.r_exp > 1.0 && self.r_exp < self.p - 1.0) {
            let window =
                if self.p - 1.0 <= 1.0 { format!(" (empty for p = {}: raise p above 2)", self.p) } else { String::new() };
            out.push(Violation {
                key: "r_exp",
                message: format!(
                    "violates the reaction hypothesis 0 < gamma < 1 < r_exp < p - 1: got gamma = {}, r_exp = {}, p - 1 = {}{}",
                    self.gamma,
                    self.r_exp,
                    self.p - 1.0,
                    window
                ),
            });
        }
        let (lo, hi) = self.alpha_window();
        if !(self.alpha > lo && self.alpha < hi) {
            out.push(Violation {
                key: "alpha",
                message: format!(
                    "violates the weight hypothesis: alpha = {} outside (gamma*beta_star, gamma*beta_star + s*p) = ({lo}, {hi})",
                    self.alpha
                ),
            });
        }
        if self.c_a <= 0.0 {
            out.push(Violation {
                key: "c_a",
                message: format!("violates the weight hypothesis: c_a = {} must be positive", self.c_a),
            });
        }
        out
    }

    pub fn require_hypotheses(&self) -> Result<()> {
        match self.hypotheses().into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::config(v.key, v.message)),
        }
    }

    pub fn sp(&self) -> f64 {
        self.s * self.p
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Critical Sobolev exponent N p / (N - s p).
    pub fn p_star(&self) -> f64 {
        self.nf() * self.p / (self.nf() - self.sp())
    }

    /// Decay exponent of the fundamental solution, (N - s p)/(p - 1).
    pub fn beta_star(&self) -> f64 {
        (self.nf() - self.sp()) / (self.p - 1.0)
    }

    /// Exponent β with β(p-1) + sp = N + α - γ β*.
    pub fn beta_def(&self) -> f64 {
        (self.nf() + self.alpha - self.gamma * self.beta_star() - self.sp()) / (self.p - 1.0)
    }

    /// Open interval of admissible β for the power-law identity: ((N-sp)/p, N/(p-1)).
    pub fn beta_window(&self) -> (f64, f64) {
        ((self.nf() - self.sp()) / self.p, self.nf() / (self.p - 1.0))
    }

    pub fn alpha_window(&self) -> (f64, f64) {
        let lo = self.gamma * self.beta_star();
        (lo, lo + self.sp())
    }
}
