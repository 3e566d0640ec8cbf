//! Orchestration behind the command-line tool: grid/kernel setup, solution
//! files, plot data.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::analysis::{check_decay_sandwich, fit_decay, CheckRecord};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::grid::{RadialFunction, RadialGrid};
use crate::kernel::{cbeta_sweep, select_angular_weight, write_cbeta_csv, QuadratureSpec};
use crate::operator::{weak_residual, weight_a, KernelMatrix};
use crate::params::ProblemParams;
use crate::solver::{solve_full, solve_pure_singular, truncated_rhs, SolveReport};

pub const UBAR_FILE: &str = "ubar.csv";
pub const SOLUTION_HEADER: &str = "r,u,a,rhs,residual";

/// Grid and kernel matrix for a configuration.
pub struct Setup {
    pub grid: Arc<RadialGrid>,
    pub k: KernelMatrix,
}

impl Setup {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let grid = Arc::new(RadialGrid::graded(
            cfg.grid.r_max,
            cfg.grid.nodes,
            cfg.grid.grading,
            Some(cfg.grid.anchor),
            cfg.params.beta_star(),
        )?);
        let k = KernelMatrix::assemble(&grid, &cfg.params)?;
        Ok(Setup { grid, k })
    }
}

/// Fit window [R_max/8, R_max/2].
pub fn default_window(grid: &RadialGrid) -> (f64, f64) {
    (grid.r_max() / 8.0, grid.r_max() / 2.0)
}

/// Writes the β-sweep of C(β); returns the file path.
pub fn kernel_table(cfg: &RunConfig, beta_min: f64, beta_max: f64, steps: usize, out: &Path) -> Result<PathBuf> {
    if steps < 2 {
        return Err(Error::usage("kernel-table needs at least 2 steps"));
    }
    let (pick, checks) = select_angular_weight(cfg.params.n, cfg.params.s)?;
    let angular = cfg.angular.unwrap_or(pick);
    let quad = QuadratureSpec { angular, ..cfg.quad };
    let rows = cbeta_sweep(&cfg.params, &quad, beta_min, beta_max, steps)?;
    let chosen = if angular == checks[0].angular { &checks[0] } else { &checks[1] };
    let meta = format!(
        "angular={angular:?} p2_calibration={:.14e} p2_mismatch={:.3e} beta_star={:.14e}",
        chosen.calibration,
        chosen.max_rel_mismatch,
        cfg.params.beta_star()
    );
    fs::create_dir_all(out)?;
    write_cbeta_csv(out, &cfg.params, &rows, Some(&meta))
}

/// Kind of solution stored in a solution file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolutionKind {
    Capacitary { radius: f64 },
    PureSingular,
    Full { kappa: f64 },
}

impl SolutionKind {
    fn tag(&self) -> String {
        match self {
            SolutionKind::Capacitary { radius } => format!("capacitary R={radius}"),
            SolutionKind::PureSingular => "pure_singular".into(),
            SolutionKind::Full { kappa } => format!("full kappa={kappa}"),
        }
    }
}

/// Writes a solution with columns `r,u,a,rhs,residual`. `rhs` is the nodal
/// reaction and `residual` the nodal Euler–Lagrange defect (operator minus
/// reaction, per unit volume). `floor` is ū for truncated solutions.
pub fn write_solution(
    path: &Path,
    kind: SolutionKind,
    u: &RadialFunction,
    floor: Option<&RadialFunction>,
    params: &ProblemParams,
    k: &KernelMatrix,
    report: &SolveReport,
) -> Result<()> {
    let grid = u.grid();
    let res = weak_residual(u, k, params)?;
    let omega = grid.volume_weights(params.n);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# kind={} converged={} residual_norm={:.6e} iterations={}",
        kind.tag(),
        report.converged,
        report.residual_norm,
        report.iterations
    );
    let _ = writeln!(
        s,
        "# N={} s={} p={} gamma={} r_exp={} alpha={} c_a={} beta_star={:.14e} beta_def={:.14e}",
        params.n,
        params.s,
        params.p,
        params.gamma,
        params.r_exp,
        params.alpha,
        params.c_a,
        params.beta_star(),
        params.beta_def()
    );
    let _ = writeln!(
        s,
        "# grid_hash={:016x} tail_exponent={:.14e} tail_amplitude={:.14e}",
        grid.geometry_hash(),
        grid.tail_exponent(),
        u.tail_amplitude()
    );
    let _ = writeln!(s, "{SOLUTION_HEADER}");
    for (i, (&r, &v)) in grid.nodes().iter().zip(u.values()).enumerate() {
        let a = weight_a(r, params);
        let rhs = match kind {
            SolutionKind::Capacitary { .. } => 0.0,
            SolutionKind::PureSingular => a * v.powf(-params.gamma),
            SolutionKind::Full { kappa } => {
                let fl = floor.ok_or_else(|| Error::usage("truncated solution needs its floor"))?;
                truncated_rhs(r, v, fl.values()[i], params, kappa)?
            }
        };
        let defect = res[i] / omega[i] - rhs;
        let _ = writeln!(s, "{r:.17e},{v:.17e},{a:.17e},{rhs:.17e},{defect:.17e}");
    }
    fs::write(path, s)?;
    Ok(())
}

/// Reads the `u` column of a solution file written on `grid`. Fails with a
/// usage error when the stored grid hash differs.
pub fn read_solution(path: &Path, grid: Arc<RadialGrid>) -> Result<RadialFunction> {
    let (hash, nodes, values) = read_solution_columns(path)?;
    if hash != Some(grid.geometry_hash()) {
        return Err(Error::usage(format!("{} was computed on a different grid", path.display())));
    }
    if nodes.len() != grid.len() {
        return Err(Error::usage(format!("{} has {} rows, grid has {} nodes", path.display(), nodes.len(), grid.len())));
    }
    RadialFunction::new(grid, values)
}

/// (stored grid hash, r column, u column) of a solution file.
fn read_solution_columns(path: &Path) -> Result<(Option<u64>, Vec<f64>, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    let perr = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let mut hash = None;
    let mut r = Vec::new();
    let mut u = Vec::new();
    let mut header = false;
    for (idx, line) in text.lines().enumerate() {
        if let Some(meta) = line.strip_prefix('#') {
            for tok in meta.split_whitespace() {
                if let Some(h) = tok.strip_prefix("grid_hash=") {
                    hash = Some(u64::from_str_radix(h, 16).map_err(|e| perr(idx + 1, e.to_string()))?);
                }
            }
            continue;
        }
        if !header {
            if line.trim() != SOLUTION_HEADER {
                return Err(perr(idx + 1, format!("expected header `{SOLUTION_HEADER}`")));
            }
            header = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(perr(idx + 1, format!("expected 5 columns, got {}", cols.len())));
        }
        let parse = |c: &str| c.trim().parse::<f64>().map_err(|e| perr(idx + 1, e.to_string()));
        r.push(parse(cols[0])?);
        u.push(parse(cols[1])?);
    }
    if !header {
        return Err(perr(0, "missing header".into()));
    }
    Ok((hash, r, u))
}

/// Solution of the pure-singular problem, written to `ubar.csv`.
pub fn run_singular(cfg: &RunConfig, setup: &Setup, out: &Path) -> Result<(RadialFunction, Vec<SolveReport>)> {
    let opts = cfg.solver.options();
    let (u_bar, _, report) = solve_pure_singular(&cfg.params, setup.grid.clone(), &setup.k, &cfg.solver.schedule(), &opts)?;
    fs::create_dir_all(out)?;
    write_solution(&out.join(UBAR_FILE), SolutionKind::PureSingular, &u_bar, None, &cfg.params, &setup.k, &report.limit)?;
    let mut reports = report.levels.clone();
    reports.push(report.limit.clone());
    Ok((u_bar, reports))
}

/// ū from `out/ubar.csv` when present and computed on this grid; otherwise
/// solved afresh (and written).
pub fn load_or_solve_singular(cfg: &RunConfig, setup: &Setup, out: &Path) -> Result<(RadialFunction, Vec<SolveReport>)> {
    let path = out.join(UBAR_FILE);
    if path.exists() {
        if let Ok(u) = read_solution(&path, setup.grid.clone()) {
            return Ok((u, Vec::new()));
        }
    }
    run_singular(cfg, setup, out)
}

pub fn full_filename(kappa: f64) -> String {
    format!("utilde_kappa{kappa}.csv")
}

/// ũ for `kappa`, written next to ū, with the ordering check ũ ≥ ū.
pub fn run_full(
    cfg: &RunConfig,
    setup: &Setup,
    u_bar: &RadialFunction,
    kappa: f64,
    out: &Path,
) -> Result<(RadialFunction, SolveReport, CheckRecord)> {
    let opts = cfg.solver.options();
    let (u, rep) = solve_full(&cfg.params, &setup.k, u_bar, kappa, &opts)?;
    fs::create_dir_all(out)?;
    write_solution(&out.join(full_filename(kappa)), SolutionKind::Full { kappa }, &u, Some(u_bar), &cfg.params, &setup.k, &rep)?;
    let drop = u_bar.values().iter().zip(u.values()).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
    let check = CheckRecord::at_most(format!("u_bar_minus_u_tilde_kappa{kappa}"), drop, 0.0, 1e-8 * u_bar.sup_norm().max(1.0));
    Ok((u, rep, check))
}

/// Writes `loglog.csv` (log r, log ū over the fit window) and `profiles.csv`
/// (r, ū, ũ, fitted lower and upper envelopes) from the solution files in
/// `dir`. ũ is taken from the file for `kappa` when present, else from the
/// first `utilde_kappa*.csv` in name order.
pub fn emit_plotdata(dir: &Path, params: &ProblemParams, kappa: f64, window: Option<(f64, f64)>) -> Result<(PathBuf, PathBuf)> {
    let ubar_path = dir.join(UBAR_FILE);
    if !ubar_path.exists() {
        return Err(Error::usage(format!("missing input {}", ubar_path.display())));
    }
    let (_, nodes, ubar_vals) = read_solution_columns(&ubar_path)?;
    let mut full: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name().and_then(|n| n.to_str()).map(|n| n.starts_with("utilde_kappa") && n.ends_with(".csv")).unwrap_or(false)
        })
        .collect();
    full.sort();
    let preferred = dir.join(full_filename(kappa));
    let utilde_path = full
        .iter()
        .find(|p| **p == preferred)
        .or(full.first())
        .ok_or_else(|| Error::usage(format!("missing input: no utilde_kappa*.csv in {}", dir.display())))?;
    let (_, nodes_t, utilde_vals) = read_solution_columns(utilde_path)?;
    if nodes_t != nodes {
        return Err(Error::usage("ubar and utilde files were computed on different grids"));
    }
    let grid = Arc::new(RadialGrid::from_nodes(nodes.clone(), params.beta_star())?);
    let u_bar = RadialFunction::new(grid.clone(), ubar_vals)?;
    let window = window.unwrap_or_else(|| default_window(&grid));
    let in_window: Vec<usize> =
        (0..nodes.len()).filter(|&i| nodes[i] >= window.0 && nodes[i] <= window.1 && u_bar.values()[i] > 0.0).collect();
    if in_window.is_empty() {
        return Err(Error::usage(format!("fit window [{}, {}] contains no usable nodes", window.0, window.1)));
    }
    let fit = fit_decay(&u_bar, window)?;
    let sw = check_decay_sandwich(&u_bar, params, window)?;

    let mut loglog = String::from("# log-log profile of u_bar over the fit window\n");
    let _ = writeln!(loglog, "# fitted_exponent={:.14e} amplitude={:.14e}", fit.exponent, fit.amplitude);
    loglog.push_str("log_r,log_u\n");
    for &i in &in_window {
        let _ = writeln!(loglog, "{:.17e},{:.17e}", nodes[i].ln(), u_bar.values()[i].ln());
    }
    let mut prof = String::new();
    let _ = writeln!(
        prof,
        "# lower=c*r^-{:.14e} c={:.14e}; upper=D*r^-{:.14e} D={:.14e}; utilde from {}",
        sw.lower_exponent,
        sw.lower_constant,
        sw.upper_exponent,
        sw.upper_constant,
        utilde_path.file_name().and_then(|n| n.to_str()).unwrap_or("")
    );
    prof.push_str("r,u_bar,u_tilde,lower_envelope,upper_envelope\n");
    for (i, &r) in nodes.iter().enumerate() {
        let (lo, hi) = if r > 0.0 {
            (sw.lower_constant * r.powf(-sw.lower_exponent), sw.upper_constant * r.powf(-sw.upper_exponent))
        } else {
            (f64::NAN, f64::NAN)
        };
        let _ = writeln!(prof, "{r:.17e},{:.17e},{:.17e},{lo:.17e},{hi:.17e}", u_bar.values()[i], utilde_vals[i]);
    }
    let lp = dir.join("loglog.csv");
    let pp = dir.join("profiles.csv");
    fs::write(&lp, loglog)?;
    fs::write(&pp, prof)?;
    Ok((lp, pp))
}
