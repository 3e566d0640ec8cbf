//! The eleven acceptance criteria on the golden configuration. Every
//! measurement is recomputed here from the public API; tolerances are literal.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};

use fracp::analysis::{check_decay_sandwich, comparison_check, fit_decay, fundamental_residual, harnack_ratio, Region};
use fracp::config::{parse_config, GOLDEN_CONFIG};
use fracp::grid::{Grading, RadialFunction, RadialGrid};
use fracp::kernel::{c_beta, riesz_constant_p2, AngularWeight, QuadratureSpec};
use fracp::operator::{energy_seminorm, weak_residual, KernelMatrix};
use fracp::solver::RegularizedProblem;
use fracp::verify::PipelineRun;
use fracp::ProblemParams;

struct Line {
    id: u8,
    pass: bool,
    detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn quad(p: &ProblemParams) -> QuadratureSpec {
    QuadratureSpec::for_params(p).with_angular(AngularWeight::Standard)
}

fn setup(p: &ProblemParams, m: usize) -> (Arc<RadialGrid>, KernelMatrix) {
    let grid = Arc::new(RadialGrid::graded(64.0, m, Grading::Stretch(50.0), Some(1.0), p.beta_star()).unwrap());
    let k = KernelMatrix::assemble(&grid, p).unwrap();
    (grid, k)
}

fn profile(grid: &Arc<RadialGrid>, beta: f64, rng: &mut impl Rng) -> RadialFunction {
    let v = grid.nodes().iter().map(|r| (1.0 + r).powf(-beta) * rng.gen_range(0.5..1.5)).collect();
    RadialFunction::new(grid.clone(), v).unwrap()
}

fn zero_of_c_beta() -> Line {
    let mut worst: f64 = 0.0;
    for (n, s, p) in [(3, 0.5, 2.0), (3, 0.5, 2.5), (4, 0.4, 2.0)] {
        let params = ProblemParams::operator(n, s, p).unwrap();
        let q = quad(&params);
        let bs = params.beta_star();
        let at = c_beta(bs, &params, &q).unwrap().value.abs();
        let below = c_beta(0.9 * bs, &params, &q).unwrap().value.abs();
        worst = worst.max(at / below);
    }
    Line { id: 1, pass: worst <= 1e-8, detail: format!("max |C(b*)|/|C(0.9 b*)| = {worst:.3e} (<= 1e-8)") }
}

fn closed_form_cross_check() -> Line {
    let (n, s) = (3u32, 0.5);
    let params = ProblemParams::operator(n, s, 2.0).unwrap();
    let q = quad(&params);
    let bs = params.beta_star();
    let lo = (n as f64 - 2.0 * s) / 2.0 * 2.0 / params.p;
    let ladder: Vec<(f64, f64)> = (1..=5)
        .map(|i| {
            let b = lo + (bs - lo) * i as f64 / 6.0;
            (c_beta(b, &params, &q).unwrap().value, riesz_constant_p2(b, n, s).unwrap())
        })
        .collect();
    let cal = ladder[0].0 / ladder[0].1;
    let mismatch = ladder.iter().map(|&(c, l)| rel(c.abs(), (cal * l).abs())).fold(0.0, f64::max);
    let hi = n as f64 / (params.p - 1.0);
    let signs: Vec<(f64, f64)> = [0.25, 0.5, 0.75]
        .iter()
        .map(|t| {
            let b = bs + (hi - bs) * t;
            (c_beta(b, &params, &q).unwrap().value, cal * riesz_constant_p2(b, n, s).unwrap())
        })
        .collect();
    let agree = signs.iter().all(|(c, l)| c.signum() == l.signum());
    let negative = signs.iter().all(|(c, _)| *c < 0.0);
    Line {
        id: 2,
        pass: mismatch <= 1e-4,
        detail: format!(
            "ladder mismatch = {mismatch:.3e} (<= 1e-4); sign above b*: {} (oracle agrees: {agree}) [flagged: positive sign is assumed in the decay argument]",
            if negative { "negative" } else { "not uniformly negative" }
        ),
    }
}

fn operator_sanity() -> Line {
    let params = parse_config(GOLDEN_CONFIG).unwrap().params;
    let (grid, k) = setup(&params, 128);
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let c = 0.75;
    let w = vec![c; k.extended_len()];
    let g = k.pair_gradient_ext(&w);
    let row_max = (0..k.extended_len()).map(|a| (0..k.extended_len()).map(|b| k.weight(a, b)).sum::<f64>()).fold(0.0, f64::max);
    let constant = g.iter().fold(0.0, |m: f64, x| m.max(x.abs())) / (row_max * c.powf(params.p - 1.0));

    let u = profile(&grid, params.beta_star(), &mut rng);
    let lam = 2.3;
    let r1 = weak_residual(&u, &k, &params).unwrap();
    let r2 = weak_residual(&u.scaled(lam), &k, &params).unwrap();
    let hom_r = r1.iter().zip(&r2).map(|(a, b)| rel(lam.powf(params.p - 1.0) * a, *b)).fold(0.0, f64::max);
    let e1 = energy_seminorm(&u, &k, &params).unwrap();
    let e2 = energy_seminorm(&u.scaled(lam), &k, &params).unwrap();
    let hom_e = rel(lam.powf(params.p) * e1, e2);

    let p2 = ProblemParams::operator(3, 0.5, 2.0).unwrap();
    let (g2, k2) = setup(&p2, 128);
    let u = profile(&g2, p2.beta_star(), &mut rng);
    let v = profile(&g2, p2.beta_star(), &mut rng);
    let ru = weak_residual(&u, &k2, &p2).unwrap();
    let rv = weak_residual(&v, &k2, &p2).unwrap();
    let pairing: f64 = (0..g2.len()).map(|i| (ru[i] - rv[i]) * (u.values()[i] - v.values()[i])).sum();
    let d = RadialFunction::new(g2.clone(), u.values().iter().zip(v.values()).map(|(a, b)| a - b).collect()).unwrap();
    let ident = rel(pairing, energy_seminorm(&d, &k2, &p2).unwrap());
    let pass = constant <= 1e-10 && hom_r <= 1e-10 && hom_e <= 1e-10 && ident <= 1e-10;
    Line {
        id: 3,
        pass,
        detail: format!(
            "constant {constant:.2e}, residual homogeneity {hom_r:.2e}, energy homogeneity {hom_e:.2e}, p=2 identity {ident:.2e} (all <= 1e-10)"
        ),
    }
}

fn gradient_check() -> Line {
    let params = parse_config(GOLDEN_CONFIG).unwrap().params;
    let (grid, k) = setup(&params, 64);
    let mut rng = rand::rngs::StdRng::seed_from_u64(23);
    let mut worst: f64 = 0.0;
    for n in [1u64, 8] {
        let prob = RegularizedProblem::new(&params, n, grid.clone(), &k).unwrap();
        for _ in 0..10 {
            let u = profile(&grid, params.beta_star(), &mut rng);
            let d: Vec<f64> = u.values().iter().map(|v| rng.gen_range(-1.0..1.0) * 0.1 * v).collect();
            let g = prob.gradient(&u).unwrap();
            let exact: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            let j = |t: f64| {
                let v = u.values().iter().zip(&d).map(|(a, b)| a + t * b).collect();
                prob.energy(&RadialFunction::new(grid.clone(), v).unwrap())
            };
            let fd = |h: f64| (j(h) - j(-h)) / (2.0 * h);
            let h = 1e-3;
            worst = worst.max(rel(exact, (4.0 * fd(h / 2.0) - fd(h)) / 3.0));
        }
    }
    Line { id: 4, pass: worst <= 1e-6, detail: format!("20 directions, max relative error {worst:.3e} (<= 1e-6)") }
}

fn fundamental_solution() -> Line {
    let params = parse_config(GOLDEN_CONFIG).unwrap().params;
    let (g1, k1) = setup(&params, 256);
    let (g2, k2) = setup(&params, 512);
    let r1 = fundamental_residual(params.beta_star(), &params, &g1, &k1).unwrap().normalized;
    let r2 = fundamental_residual(params.beta_star(), &params, &g2, &k2).unwrap().normalized;
    Line {
        id: 5,
        pass: r1 <= 0.02 && r1 / r2 >= 1.6,
        detail: format!("M=256: {r1:.3e} (<= 2e-2), M=512: {r2:.3e}, reduction {:.3} (>= 1.6)", r1 / r2),
    }
}

fn window(run: &PipelineRun) -> (f64, f64) {
    (run.grid.r_max() / 8.0, run.grid.r_max() / 2.0)
}

fn capacitary(run: &PipelineRun) -> Line {
    let (u, _) = &run.capacitary;
    let p = &run.params;
    let bs = p.beta_star();
    let fit = fit_decay(u, window(run)).unwrap().exponent;
    let plateau = run
        .grid
        .nodes()
        .iter()
        .zip(u.values())
        .filter(|(r, _)| **r >= 2.0 && **r <= run.grid.r_max() / 2.0)
        .map(|(r, v)| v * r.powf(bs))
        .fold(0.0, f64::max);
    let bound = 1.05 * p.p.powf(1.0 / (p.p - 1.0));
    let rise = u.values().windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    Line {
        id: 6,
        pass: rel(fit, bs) <= 0.05 && plateau <= bound && rise <= 1e-8,
        detail: format!(
            "exponent {fit:.5} vs {bs:.5} (rel {:.2e} <= 5e-2), plateau {plateau:.4} <= {bound:.4}, max rise {rise:.1e} (<= 1e-8)",
            rel(fit, bs)
        ),
    }
}

fn continuation(run: &PipelineRun) -> Line {
    let scale = run.u_bar.sup_norm().max(1.0);
    let drop = run
        .levels
        .windows(2)
        .flat_map(|w| w[0].values().iter().zip(w[1].values()).map(|(a, b)| a - b).collect::<Vec<_>>())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut e: Vec<f64> =
        run.levels.iter().map(|u| energy_seminorm(u, &run.k, &run.params).unwrap().powf(1.0 / run.params.p)).collect();
    let max = e.iter().copied().fold(0.0, f64::max);
    e.sort_by(|a, b| a.total_cmp(b));
    let median = if e.len() % 2 == 1 { e[e.len() / 2] } else { 0.5 * (e[e.len() / 2 - 1] + e[e.len() / 2]) };
    let schedule_ok = run.continuation.schedule.last() == Some(&128);
    Line {
        id: 7,
        pass: drop <= 1e-8 * scale && max / median <= 2.0 && schedule_ok,
        detail: format!(
            "schedule {:?}, worst drop {drop:.2e} (<= {:.1e}), energy max/median {:.4} (<= 2)",
            run.continuation.schedule,
            1e-8 * scale,
            max / median
        ),
    }
}

fn pure_singular_decay(run: &PipelineRun) -> Line {
    let min = run.u_bar.values().iter().copied().fold(f64::INFINITY, f64::min);
    let bs = run.params.beta_star();
    let fit = fit_decay(&run.u_bar, window(run)).unwrap().exponent;
    let sw = check_decay_sandwich(&run.u_bar, &run.params, window(run)).unwrap();
    let finite = |x: f64| x.is_finite() && x > 0.0;
    Line {
        id: 8,
        pass: min > 0.0 && rel(fit, bs) <= 0.10 && finite(sw.lower_constant) && finite(sw.upper_constant),
        detail: format!(
            "min {min:.3e} > 0, exponent {fit:.5} vs {bs:.5} (rel {:.2e} <= 1e-1), c = {:.4e}, D = {:.4e}, binding: {}",
            rel(fit, bs),
            sw.lower_constant,
            sw.upper_constant,
            sw.binding
        ),
    }
}

fn truncation(run: &PipelineRun) -> Line {
    let scale = run.u_bar.sup_norm().max(1.0);
    let mut pass = true;
    let mut parts = Vec::new();
    for (kappa, u, _) in &run.full {
        let drop = run.u_bar.values().iter().zip(u.values()).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
        let exp = fit_decay(u, window(run)).unwrap().exponent;
        pass &= drop <= 1e-8 * scale && exp > 0.0;
        parts.push(format!("k={kappa}: drop {drop:.1e}, exponent {exp:.4}"));
        if *kappa == 0.0 {
            let d = u.sup_distance(&run.u_bar);
            pass &= d <= 10.0 * run.tol;
            parts.push(format!("k=0 sup diff {d:.1e} (<= {:.0e})", 10.0 * run.tol));
        }
    }
    assert_eq!(run.full.iter().map(|f| f.0).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
    Line { id: 9, pass, detail: parts.join("; ") }
}

fn harnack(run: &PipelineRun) -> Line {
    let ratio = harnack_ratio(&run.u_bar, 4.0, &run.params).unwrap();
    let scaled = harnack_ratio(&run.u_bar.scaled(0.37), 4.0, &run.params).unwrap();
    let sigma = ratio.min(1.0);
    let inv = rel(ratio, scaled);
    Line {
        id: 10,
        pass: sigma > 0.0 && sigma <= 1.0 && inv <= 1e-10,
        detail: format!("sigma_eff = {sigma:.4} (raw ratio {ratio:.4}), invariance {inv:.1e} (<= 1e-10)"),
    }
}

fn comparison(run: &PipelineRun) -> Line {
    let ub = &run.u_bar;
    let tol = 1e-8;
    let mut admissible = Vec::new();
    for lam in [0.25, 0.5, 0.75] {
        admissible.push((ub.scaled(lam), ub.clone()));
    }
    let c = run.grid.nodes().iter().zip(ub.values()).filter(|(r, _)| **r <= 1.0).map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    admissible.push((run.capacitary.0.scaled(c), ub.clone()));
    let ok = admissible.iter().all(|(u, v)| comparison_check(u, v, Region::Outside(1.0), &run.k, &run.params, tol).unwrap().pass);
    let u = ub.scaled(0.5);
    let mut v = ub.clone();
    let node = run.grid.nodes().iter().position(|&r| r >= 4.0).unwrap();
    v.values_mut()[node] = 0.3 * ub.values()[node];
    let bad = comparison_check(&u, &v, Region::Outside(1.0), &run.k, &run.params, tol).unwrap();
    let caught = !bad.pass && bad.violating_node.is_some();
    Line {
        id: 11,
        pass: ok && caught,
        detail: format!(
            "{} admissible pairs pass: {ok}; corrupted pair (node {node}) reported: {caught} at node {:?}",
            admissible.len(),
            bad.violating_node
        ),
    }
}

#[test]
fn acceptance_criteria() {
    let cfg = parse_config(GOLDEN_CONFIG).unwrap();
    assert_eq!(cfg.grid.nodes, 256);
    assert_eq!(cfg.solver.schedule().last(), Some(&128));
    let mut lines =
        vec![zero_of_c_beta(), closed_form_cross_check(), operator_sanity(), gradient_check(), fundamental_solution()];
    let run = PipelineRun::run(&cfg).unwrap();
    lines.extend([
        capacitary(&run),
        continuation(&run),
        pure_singular_decay(&run),
        truncation(&run),
        harnack(&run),
        comparison(&run),
    ]);
    // Written to the stdout handle directly so the summary is visible without --nocapture.
    let mut out = std::io::stdout().lock();
    for l in &lines {
        writeln!(out, "criterion {:>2}: {} | {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.detail).unwrap();
    }
    drop(out);
    let failed: Vec<u8> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
