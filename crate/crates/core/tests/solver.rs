//! Continuation and minimization behaviour on a small grid.

use std::sync::Arc;

use fracp::grid::{Grading, RadialFunction, RadialGrid};
use fracp::operator::KernelMatrix;
use fracp::solver::{minimize_jn, singular_residual, solve_full, solve_pure_singular, RegularizedProblem, SolverOptions};
use fracp::ProblemParams;

fn setup() -> (ProblemParams, Arc<RadialGrid>, KernelMatrix) {
    let params = ProblemParams::new(3, 0.5, 2.5, 0.5, 1.2, 1.2, 1.0).unwrap();
    assert!(params.hypotheses().is_empty());
    let grid = Arc::new(RadialGrid::graded(32.0, 32, Grading::Stretch(20.0), Some(1.0), params.beta_star()).unwrap());
    let k = KernelMatrix::assemble(&grid, &params).unwrap();
    (params, grid, k)
}

#[test]
fn warm_start_does_not_change_the_limit() {
    let (params, grid, k) = setup();
    let opts = SolverOptions::default();
    let (a, _, ra) = solve_pure_singular(&params, grid.clone(), &k, &[1, 2, 4, 8, 16], &opts).unwrap();
    let (b, _, rb) = solve_pure_singular(&params, grid.clone(), &k, &[1, 16], &opts).unwrap();
    assert!(ra.converged && rb.converged);
    let d = a.sup_distance(&b);
    assert!(d <= 5.0 * opts.tol, "sup distance {d}");
}

#[test]
fn level_minimizers_are_positive_and_increasing_near_the_origin() {
    let (params, grid, k) = setup();
    let (_, levels, rep) =
        solve_pure_singular(&params, grid.clone(), &k, &[1, 2, 4, 8, 16, 32], &SolverOptions::default()).unwrap();
    assert!(rep.monotone, "worst drop {}", rep.worst_monotonicity_drop);
    let inner: Vec<f64> = levels
        .iter()
        .map(|u| grid.nodes().iter().zip(u.values()).filter(|(r, _)| **r <= 1.0).map(|(_, v)| *v).fold(f64::INFINITY, f64::min))
        .collect();
    assert!(inner.iter().all(|&m| m > 0.0), "{inner:?}");
    assert!(inner.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{inner:?}");
}

#[test]
fn minimizer_lies_below_the_zero_level() {
    let (params, grid, k) = setup();
    for n in [1, 8, 64] {
        let prob = RegularizedProblem::new(&params, n, grid.clone(), &k).unwrap();
        let init = RadialFunction::from_fn(grid.clone(), |r| (1.0 + r).powf(-1.0)).unwrap();
        let (u, rep) = minimize_jn(&prob, &init, &SolverOptions::default()).unwrap();
        assert!(rep.converged);
        assert!(prob.energy(&u) <= 0.0);
        assert!(prob.energy(&u) <= prob.energy(&RadialFunction::zeros(grid.clone())));
        assert!(rep.residual_norm <= SolverOptions::default().tol);
    }
}

#[test]
fn limit_solves_the_singular_equation_and_bounds_the_full_problem() {
    let (params, grid, k) = setup();
    let opts = SolverOptions::default();
    let (u_bar, _, rep) = solve_pure_singular(&params, grid.clone(), &k, &[1, 2, 4, 8, 16, 32, 64, 128], &opts).unwrap();
    assert!(rep.limit.converged);
    let res = singular_residual(&params, &k, &u_bar).unwrap();
    assert!(res.iter().all(|r| r.abs() <= opts.tol), "{res:?}");
    let (same, _) = solve_full(&params, &k, &u_bar, 0.0, &opts).unwrap();
    assert!(same.sup_distance(&u_bar) <= 1e-8);
    for kappa in [0.5, 1.0] {
        let (u, r) = solve_full(&params, &k, &u_bar, kappa, &opts).unwrap();
        assert!(r.converged);
        let drop = u_bar.values().iter().zip(u.values()).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
        assert!(drop <= 1e-8, "kappa {kappa}: drop {drop}");
    }
}

#[test]
fn invalid_requests_are_rejected() {
    let (params, grid, k) = setup();
    assert!(RegularizedProblem::new(&params, 0, grid.clone(), &k).is_err());
    assert!(solve_pure_singular(&params, grid.clone(), &k, &[2, 4], &SolverOptions::default()).is_err());
    assert!(solve_pure_singular(&params, grid.clone(), &k, &[1, 4, 2], &SolverOptions::default()).is_err());
    let u = RadialFunction::from_fn(grid.clone(), |_| 1.0).unwrap();
    assert!(solve_full(&params, &k, &u, 1.5, &SolverOptions::default()).is_err());
    assert!(solve_full(&params, &k, &RadialFunction::zeros(grid), 0.5, &SolverOptions::default()).is_err());
}
