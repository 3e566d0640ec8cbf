use std::ffi::{CStr, CString};
use std::ptr;

use fracp_ffi::*;

struct Setup {
    params: *mut FracpParams,
    grid: *mut FracpGrid,
    kernel: *mut FracpKernel,
}

impl Drop for Setup {
    fn drop(&mut self) {
        unsafe {
            fracp_kernel_free(self.kernel);
            fracp_grid_free(self.grid);
            fracp_params_free(self.params);
        }
    }
}

fn setup() -> Setup {
    let mut s = Setup { params: ptr::null_mut(), grid: ptr::null_mut(), kernel: ptr::null_mut() };
    unsafe {
        assert_eq!(fracp_params_new(3, 0.5, 2.5, 0.5, 1.2, 1.2, 1.0, &mut s.params), FracpStatus::Ok);
        let mut beta_star = 0.0;
        assert_eq!(fracp_params_beta_star(s.params, &mut beta_star), FracpStatus::Ok);
        assert_eq!(fracp_grid_new(32.0, 32, 20.0, 1.0, beta_star, &mut s.grid), FracpStatus::Ok);
        assert_eq!(fracp_kernel_assemble(s.grid, s.params, &mut s.kernel), FracpStatus::Ok);
    }
    s
}

fn last_error() -> String {
    let p = fracp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn rejected_parameters_report_a_domain_error() {
    let mut params = ptr::null_mut();
    let st = unsafe { fracp_params_new(2, 0.5, 2.5, 0.5, 1.2, 1.2, 1.0, &mut params) };
    assert_eq!(st, FracpStatus::Domain);
    assert!(params.is_null());
    assert!(last_error().contains("N >= 3"));
    unsafe {
        assert_eq!(fracp_params_new(3, 0.5, 2.0, 0.5, 1.2, 1.0, 1.0, &mut params), FracpStatus::Ok);
        assert_eq!(fracp_params_check_hypotheses(params), FracpStatus::Config);
        assert!(last_error().contains("reaction hypothesis"));
        fracp_params_free(params);
    }
}

#[test]
fn null_pointers_are_reported() {
    let mut v = 0.0;
    assert_eq!(unsafe { fracp_params_beta_star(ptr::null(), &mut v) }, FracpStatus::NullPointer);
    assert!(last_error().contains("params"));
    assert_eq!(unsafe { fracp_grid_len(ptr::null()) }, 0);
    unsafe {
        fracp_params_free(ptr::null_mut());
        fracp_string_free(ptr::null_mut());
    }
}

#[test]
fn power_law_constant_vanishes_at_the_decay_exponent() {
    let s = setup();
    let mut bs = 0.0;
    let (mut at, mut below, mut err) = (1.0, 0.0, 0.0);
    unsafe {
        fracp_params_beta_star(s.params, &mut bs);
        assert_eq!(fracp_c_beta(s.params, bs, FracpAngular::Standard, &mut at, &mut err), FracpStatus::Ok);
        assert_eq!(fracp_c_beta(s.params, 0.9 * bs, FracpAngular::Standard, &mut below, ptr::null_mut()), FracpStatus::Ok);
        assert_eq!(fracp_c_beta(s.params, 10.0, FracpAngular::Standard, &mut below, ptr::null_mut()), FracpStatus::Domain);
    }
    assert!(at.abs() <= 1e-8 * below.abs());
    assert!(err.is_finite());
}

#[test]
fn energy_and_residual_through_handles() {
    let s = setup();
    unsafe {
        let n = fracp_grid_len(s.grid);
        let mut nodes = vec![0.0; n];
        assert_eq!(fracp_grid_nodes(s.grid, nodes.as_mut_ptr(), n), FracpStatus::Ok);
        assert_eq!(fracp_grid_nodes(s.grid, nodes.as_mut_ptr(), n - 1), FracpStatus::Usage);
        let vals: Vec<f64> = nodes.iter().map(|r| (1.0 + r).powf(-1.0)).collect();
        let mut f = ptr::null_mut();
        assert_eq!(fracp_function_new(s.grid, vals.as_ptr(), n, &mut f), FracpStatus::Ok);
        assert_eq!(fracp_function_len(f), n);
        let mut e = 0.0;
        assert_eq!(fracp_energy(s.kernel, s.params, f, &mut e), FracpStatus::Ok);
        let mut r = vec![0.0; n];
        assert_eq!(fracp_weak_residual(s.kernel, s.params, f, r.as_mut_ptr(), n), FracpStatus::Ok);
        // E(2u) = 2^p E(u).
        let doubled: Vec<f64> = vals.iter().map(|v| 2.0 * v).collect();
        let mut g = ptr::null_mut();
        fracp_function_new(s.grid, doubled.as_ptr(), n, &mut g);
        let mut e2 = 0.0;
        fracp_energy(s.kernel, s.params, g, &mut e2);
        assert!((e2 / e - 2f64.powf(2.5)).abs() < 1e-10);
        assert!(r.iter().all(|v| v.is_finite()));
        let mut bad = ptr::null_mut();
        assert_eq!(fracp_function_new(s.grid, vals.as_ptr(), n - 1, &mut bad), FracpStatus::Usage);
        fracp_function_free(f);
        fracp_function_free(g);
    }
}

#[test]
fn solves_and_diagnostics() {
    let s = setup();
    unsafe {
        let mut u = ptr::null_mut();
        let mut conv = false;
        assert_eq!(fracp_solve_pure_singular(s.params, s.grid, s.kernel, 4, 1e-9, 200, &mut u, &mut conv), FracpStatus::Ok);
        assert!(conv);
        let n = fracp_function_len(u);
        let mut vals = vec![0.0; n];
        fracp_function_values(u, vals.as_mut_ptr(), n);
        assert!(vals.iter().all(|&v| v > 0.0));
        let mut sigma = 0.0;
        assert_eq!(fracp_harnack_ratio(u, 4.0, s.params, &mut sigma), FracpStatus::Ok);
        assert!(sigma > 0.0);
        fracp_function_free(u);

        let mut cap = ptr::null_mut();
        assert_eq!(fracp_solve_capacitary(s.params, s.grid, s.kernel, 1.0, 1e-9, 200, &mut cap, &mut conv), FracpStatus::Ok);
        assert!(conv);
        let (mut beta, mut amp, mut rms) = (0.0, 0.0, 0.0);
        assert_eq!(fracp_fit_decay(cap, 2.0, 8.0, &mut beta, &mut amp, &mut rms), FracpStatus::Ok);
        assert!(beta > 0.5 && beta < 2.0, "{beta}");
        assert_eq!(fracp_fit_decay(cap, 8.0, 2.0, &mut beta, ptr::null_mut(), ptr::null_mut()), FracpStatus::Usage);
        assert_eq!(fracp_solve_capacitary(s.params, s.grid, s.kernel, 1.37, 1e-9, 200, &mut u, &mut conv), FracpStatus::Usage);
        fracp_function_free(cap);
    }
}

#[test]
fn verify_rejects_a_bad_configuration() {
    let cfg = CString::new("problem.N = 3\nproblem.s = 0.5\n").unwrap();
    let mut pass = true;
    let st = unsafe { fracp_verify(cfg.as_ptr(), &mut pass, ptr::null_mut()) };
    assert_eq!(st, FracpStatus::Config);
    assert!(last_error().contains("problem.p"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/fracp.h")).unwrap();
    for name in [
        "fracp_last_error_message",
        "fracp_params_new",
        "fracp_params_free",
        "fracp_grid_new",
        "fracp_kernel_assemble",
        "fracp_function_new",
        "fracp_energy",
        "fracp_weak_residual",
        "fracp_solve_pure_singular",
        "fracp_solve_capacitary",
        "fracp_fit_decay",
        "fracp_harnack_ratio",
        "fracp_verify",
        "fracp_string_free",
        "FRACP_STATUS_NULL_POINTER",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    // The header must compile as C when a compiler is around.
    if let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include/fracp.h"))
        .status()
    {
        assert!(status.success());
    }
}
