//! Flat `key = value` run configuration with dotted section keys.
//!
//! ```text
//! # comment
//! problem.N = 3
//! problem.s = 0.5
//! grid.nodes = 256
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grading;
use crate::kernel::{AngularWeight, QuadratureSpec};
use crate::params::ProblemParams;
use crate::solver::SolverOptions;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridConfig {
    pub r_max: f64,
    /// Number of cells M.
    pub nodes: usize,
    pub grading: Grading,
    /// Radius that must be a grid node (capacitary radius).
    pub anchor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub schedule_max_n: u64,
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        SolverOptions { tol: self.tol, max_iter: self.max_iter }
    }

    /// 1, 2, 4, ..., schedule_max_n.
    pub fn schedule(&self) -> Vec<u64> {
        let mut s = vec![1u64];
        while *s.last().unwrap_or(&1) < self.schedule_max_n {
            let next = s.last().unwrap_or(&1) * 2;
            s.push(next);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: ProblemParams,
    pub grid: GridConfig,
    pub quad: QuadratureSpec,
    /// `None`: pick the angular weight by the p = 2 closed-form cross-check.
    pub angular: Option<AngularWeight>,
    pub solver: SolverConfig,
    pub kappa: f64,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Keys that were absent and took their default value.
    pub defaulted: Vec<String>,
}

const REQUIRED: [&str; 6] = ["problem.N", "problem.s", "problem.p", "problem.gamma", "problem.r_exp", "problem.alpha"];

const OPTIONAL: [(&str, &str); 16] = [
    ("problem.c_a", "1"),
    ("grid.r_max", "64"),
    ("grid.nodes", "256"),
    ("grid.stretch", "50"),
    ("grid.ratio", ""),
    ("grid.anchor", "1"),
    ("quad.nodes", "12"),
    ("quad.tol", "1e-10"),
    ("quad.max_refinements", "4"),
    ("quad.angular", "auto"),
    ("solver.tol", "1e-9"),
    ("solver.max_iter", "200"),
    ("solver.schedule_max_n", "128"),
    ("kappa", "0.5"),
    ("output_dir", "out"),
    ("seed", "0"),
];

fn num<T: std::str::FromStr>(map: &BTreeMap<String, (usize, String)>, key: &str, default: &str) -> Result<T> {
    let raw = map.get(key).map(|(_, v)| v.as_str()).unwrap_or(default);
    raw.parse::<T>().map_err(|_| Error::config(key, format!("cannot parse `{raw}` as a number")))
}

/// Parses and validates a configuration, including the reaction and weight
/// hypotheses on the problem parameters.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}", idx + 1), format!("expected `key = value`, got `{line}`")))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if !REQUIRED.contains(&k.as_str()) && !OPTIONAL.iter().any(|(o, _)| *o == k) {
            return Err(Error::config(k, "unknown key"));
        }
        if map.insert(k.clone(), (idx + 1, v)).is_some() {
            return Err(Error::config(k, "duplicate key"));
        }
    }
    let missing: Vec<&str> = REQUIRED.iter().copied().filter(|k| !map.contains_key(*k)).collect();
    let defaulted: Vec<String> =
        OPTIONAL.iter().filter(|(k, d)| !map.contains_key(*k) && !d.is_empty()).map(|(k, d)| format!("{k} = {d}")).collect();
    if !missing.is_empty() {
        return Err(Error::config(
            missing.join(", "),
            format!(
                "missing required key(s); required: [{}]; defaults available for: [{}]",
                REQUIRED.join(", "),
                defaulted.join(", ")
            ),
        ));
    }

    let n: u32 = num(&map, "problem.N", "")?;
    let s: f64 = num(&map, "problem.s", "")?;
    let p: f64 = num(&map, "problem.p", "")?;
    let gamma: f64 = num(&map, "problem.gamma", "")?;
    let r_exp: f64 = num(&map, "problem.r_exp", "")?;
    let alpha: f64 = num(&map, "problem.alpha", "")?;
    let c_a: f64 = num(&map, "problem.c_a", "1")?;
    let params = ProblemParams::new(n, s, p, gamma, r_exp, alpha, c_a).map_err(|e| Error::config("problem", e.to_string()))?;
    let violations = params.hypotheses();
    if !violations.is_empty() {
        let key = violations.iter().map(|v| format!("problem.{}", v.key)).collect::<Vec<_>>().join(", ");
        let msg = violations.iter().map(|v| v.message.as_str()).collect::<Vec<_>>().join("; ");
        return Err(Error::config(key, msg));
    }

    let r_max: f64 = num(&map, "grid.r_max", "64")?;
    let nodes: usize = num(&map, "grid.nodes", "256")?;
    let anchor: f64 = num(&map, "grid.anchor", "1")?;
    let grading = match (map.contains_key("grid.stretch"), map.contains_key("grid.ratio")) {
        (true, true) => return Err(Error::config("grid.ratio", "give either grid.stretch or grid.ratio, not both")),
        (_, true) => Grading::Ratio(num(&map, "grid.ratio", "")?),
        _ => Grading::Stretch(num(&map, "grid.stretch", "50")?),
    };
    match grading {
        Grading::Stretch(x) | Grading::Ratio(x) if !(x >= 1.0) || !x.is_finite() => {
            return Err(Error::config("grid", format!("grading {x} must be finite and >= 1")));
        }
        _ => {}
    }
    if nodes < 16 {
        return Err(Error::config("grid.nodes", format!("{nodes} < 16 cells")));
    }
    if !(r_max >= 8.0) {
        return Err(Error::config("grid.r_max", format!("{r_max} < 8")));
    }
    if !(anchor > 0.0 && anchor < r_max / 4.0) {
        return Err(Error::config("grid.anchor", format!("{anchor} outside (0, r_max/4)")));
    }

    let mut quad = QuadratureSpec::for_params(&params);
    quad.nodes = num(&map, "quad.nodes", "12")?;
    quad.tol = num(&map, "quad.tol", "1e-10")?;
    quad.max_refinements = num(&map, "quad.max_refinements", "4")?;
    quad.validate().map_err(|e| Error::config("quad", e.to_string()))?;
    let angular = match map.get("quad.angular").map(|(_, v)| v.as_str()).unwrap_or("auto") {
        "auto" => None,
        "alternate" => Some(AngularWeight::Alternate),
        "standard" => Some(AngularWeight::Standard),
        other => return Err(Error::config("quad.angular", format!("`{other}` is not one of auto, alternate, standard"))),
    };
    if let Some(w) = angular {
        quad.angular = w;
    }

    let solver = SolverConfig {
        tol: num(&map, "solver.tol", "1e-9")?,
        max_iter: num(&map, "solver.max_iter", "200")?,
        schedule_max_n: num(&map, "solver.schedule_max_n", "128")?,
    };
    if !(solver.tol > 0.0) {
        return Err(Error::config("solver.tol", "must be > 0"));
    }
    if solver.schedule_max_n < 1 {
        return Err(Error::config("solver.schedule_max_n", "must be >= 1"));
    }
    let kappa: f64 = num(&map, "kappa", "0.5")?;
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::config("kappa", format!("{kappa} outside [0, 1]")));
    }
    let output_dir = PathBuf::from(map.get("output_dir").map(|(_, v)| v.as_str()).unwrap_or("out"));
    let seed: u64 = num(&map, "seed", "0")?;

    Ok(RunConfig {
        params,
        grid: GridConfig { r_max, nodes, grading, anchor },
        quad,
        angular,
        solver,
        kappa,
        output_dir,
        seed,
        defaulted,
    })
}

/// Built-in configuration: N = 3, s = 1/2, p = 5/2, γ = 1/2, r = 1.2, α at
/// the midpoint of its admissible interval, c_a = 1.
pub const GOLDEN_CONFIG: &str = include_str!("../configs/golden.cfg");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_config_parses() {
        let c = parse_config(GOLDEN_CONFIG).unwrap();
        assert_eq!(c.params.n, 3);
        assert_eq!(c.grid.nodes, 256);
        let (lo, hi) = c.params.alpha_window();
        assert!((c.params.alpha - 0.5 * (lo + hi)).abs() < 1e-12);
    }

    #[test]
    fn p_two_rejected_with_reaction_hypothesis() {
        let text =
            "problem.N = 3\nproblem.s = 0.5\nproblem.p = 2\nproblem.gamma = 0.5\nproblem.r_exp = 1.0\nproblem.alpha = 1.25\n";
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("problem.r_exp"), "{err}");
        assert!(err.contains("0 < gamma < 1 < r_exp < p - 1"), "{err}");
        assert!(err.contains("raise p"), "{err}");
    }

    #[test]
    fn alpha_at_left_endpoint_rejected() {
        let p = ProblemParams::new(3, 0.5, 2.5, 0.5, 1.2, 1.0, 1.0).unwrap();
        let lo = p.alpha_window().0;
        let text = format!(
            "problem.N = 3\nproblem.s = 0.5\nproblem.p = 2.5\nproblem.gamma = 0.5\nproblem.r_exp = 1.2\nproblem.alpha = {lo:.17e}\n"
        );
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("problem.alpha") && err.contains("weight hypothesis"), "{err}");
    }

    #[test]
    fn unknown_and_missing_keys() {
        let err = parse_config("problem.N = 3\nproblem.bogus = 1\n").unwrap_err().to_string();
        assert!(err.contains("problem.bogus") && err.contains("unknown"), "{err}");
        let err = parse_config("problem.N = 3\n").unwrap_err().to_string();
        assert!(err.contains("problem.s") && err.contains("defaults available"), "{err}");
    }
}
