use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use fracp::analysis::{sci, CheckRecord, NamedFit};
use fracp::config::{parse_config, RunConfig, GOLDEN_CONFIG};
use fracp::pipeline::{self, Setup, SolutionKind};
use fracp::solver::{solve_capacitary, SolveReport};
use fracp::verify::{capacitary_checks, run_all};
use fracp::Error;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(name = "fracp", version, about = "Radial solver and verifier for singular fractional p-Laplacian problems")]
struct Cli {
    /// Flat key = value configuration; the built-in golden configuration when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate C(beta) over a beta range.
    KernelTable {
        #[arg(long)]
        beta_min: Option<f64>,
        #[arg(long)]
        beta_max: Option<f64>,
        #[arg(long, default_value_t = 41)]
        steps: usize,
    },
    /// Solve the capacitary problem for the ball of radius R and check its decay.
    Capacitary {
        #[arg(long = "R", default_value_t = 1.0)]
        radius: f64,
    },
    /// Continuation for the pure-singular problem; writes ubar.csv.
    SolveSingular,
    /// Truncated full problem; writes utilde_kappa<k>.csv.
    SolveFull {
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Run the full verification suite; writes verification_report.json.
    Verify,
    /// loglog.csv and profiles.csv from the solution files in the output directory.
    Plotdata {
        #[arg(long)]
        window_lo: Option<f64>,
        #[arg(long)]
        window_hi: Option<f64>,
    },
}

/// Outcome of a subcommand that did not error.
enum Outcome {
    Pass,
    ChecksFailed,
    NotConverged,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Convergence { .. } | Error::Assembly { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_USAGE,
    }
}

#[derive(Serialize)]
struct StageReport<'a> {
    stage: &'a str,
    checks: Vec<CheckRecord>,
    decay_fits: Vec<NamedFit>,
    solves: Vec<SolveReport>,
    #[serde(serialize_with = "sci")]
    beta_star: f64,
}

fn write_json(path: &Path, value: &impl Serialize) -> fracp::Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn outcome(checks: &[CheckRecord], solves: &[SolveReport]) -> Outcome {
    if solves.iter().any(|s| !s.converged) {
        Outcome::NotConverged
    } else if checks.iter().all(|c| c.pass) {
        Outcome::Pass
    } else {
        Outcome::ChecksFailed
    }
}

fn print_checks(checks: &[CheckRecord]) {
    for c in checks {
        println!(
            "{:<4} {} measured={:.6e} target={:.6e} tol={:.3e}",
            if c.pass { "ok" } else { "FAIL" },
            c.name,
            c.measured,
            c.target,
            c.tolerance
        );
    }
}

fn load(cli: &Cli) -> fracp::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| Error::usage(format!("cannot read config {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => parse_config(GOLDEN_CONFIG)?,
    };
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> fracp::Result<Outcome> {
    let mut cfg = load(cli)?;
    let out = cfg.output_dir.clone();
    std::fs::create_dir_all(&out)?;
    let params = cfg.params;
    match &cli.command {
        Command::KernelTable { beta_min, beta_max, steps } => {
            let (lo, hi) = params.beta_window();
            let pad = 0.02 * (hi - lo);
            let path = pipeline::kernel_table(&cfg, beta_min.unwrap_or(lo + pad), beta_max.unwrap_or(hi - pad), *steps, &out)?;
            println!("{}", path.display());
            Ok(Outcome::Pass)
        }
        Command::Capacitary { radius } => {
            cfg.grid.anchor = *radius;
            let setup = Setup::new(&cfg)?;
            let (u, rep) = solve_capacitary(*radius, &params, setup.grid.clone(), &setup.k, &cfg.solver.options())?;
            let path = out.join(format!("capacitary_R{radius}.csv"));
            pipeline::write_solution(&path, SolutionKind::Capacitary { radius: *radius }, &u, None, &params, &setup.k, &rep)?;
            let (checks, fit) =
                capacitary_checks(&u, &rep, *radius, &params, pipeline::default_window(&setup.grid), cfg.solver.tol)?;
            print_checks(&checks);
            let verdict = outcome(&checks, std::slice::from_ref(&rep));
            let report = StageReport {
                stage: "capacitary",
                checks,
                decay_fits: vec![NamedFit { name: "capacitary".into(), fit }],
                solves: vec![rep],
                beta_star: params.beta_star(),
            };
            write_json(&out.join("capacitary_report.json"), &report)?;
            println!("{}", path.display());
            Ok(verdict)
        }
        Command::SolveSingular => {
            let setup = Setup::new(&cfg)?;
            let (u_bar, solves) = pipeline::run_singular(&cfg, &setup, &out)?;
            let min = u_bar.values().iter().copied().fold(f64::INFINITY, f64::min);
            let checks = vec![CheckRecord::new("u_bar_min", min > 0.0, min, 0.0, 0.0)];
            print_checks(&checks);
            let verdict = outcome(&checks, &solves);
            let report =
                StageReport { stage: "solve-singular", checks, decay_fits: Vec::new(), solves, beta_star: params.beta_star() };
            write_json(&out.join("solve_singular_report.json"), &report)?;
            println!("{}", out.join(pipeline::UBAR_FILE).display());
            Ok(verdict)
        }
        Command::SolveFull { kappa } => {
            let kappa = kappa.unwrap_or(cfg.kappa);
            let setup = Setup::new(&cfg)?;
            let (u_bar, mut solves) = pipeline::load_or_solve_singular(&cfg, &setup, &out)?;
            let (_, rep, check) = pipeline::run_full(&cfg, &setup, &u_bar, kappa, &out)?;
            solves.push(rep);
            let checks = vec![check];
            print_checks(&checks);
            let verdict = outcome(&checks, &solves);
            let report =
                StageReport { stage: "solve-full", checks, decay_fits: Vec::new(), solves, beta_star: params.beta_star() };
            write_json(&out.join(format!("solve_full_kappa{kappa}_report.json")), &report)?;
            println!("{}", out.join(pipeline::full_filename(kappa)).display());
            Ok(verdict)
        }
        Command::Verify => {
            let (report, crits) = run_all(&cfg)?;
            for c in &crits {
                println!("{}", c.summary());
            }
            let path = out.join("verification_report.json");
            std::fs::write(&path, report.to_json()? + "\n")?;
            println!("{}", path.display());
            Ok(if report.all_pass() { Outcome::Pass } else { Outcome::ChecksFailed })
        }
        Command::Plotdata { window_lo, window_hi } => {
            let window = match (window_lo, window_hi) {
                (None, None) => None,
                (Some(a), Some(b)) => Some((*a, *b)),
                _ => return Err(Error::usage("give both --window-lo and --window-hi, or neither")),
            };
            let (a, b) = pipeline::emit_plotdata(&out, &params, cfg.kappa, window)?;
            println!("{}\n{}", a.display(), b.display());
            Ok(Outcome::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("FRACP_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("fracp: cannot size the worker pool: {e}");
                }
            }
            _ => {
                eprintln!("fracp: FRACP_THREADS must be a positive integer, got `{v}`");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(EXIT_CHECK_FAILED),
        Ok(Outcome::NotConverged) => {
            eprintln!("fracp: a solve did not reach its tolerance");
            ExitCode::from(EXIT_NO_CONVERGENCE)
        }
        Err(e) => {
            let stage = match &cli.command {
                Command::KernelTable { .. } => "kernel-table",
                Command::Capacitary { .. } => "capacitary",
                Command::SolveSingular => "solve-singular",
                Command::SolveFull { .. } => "solve-full",
                Command::Verify => "verify",
                Command::Plotdata { .. } => "plotdata",
            };
            eprintln!("fracp {stage}: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
