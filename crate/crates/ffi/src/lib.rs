//! C ABI over the `fracp` solver.
//!
//! Objects are opaque heap handles created by `*_new`/solver calls and
//! released by the matching `*_free`. Every fallible call returns a
//! [`FracpStatus`]; on failure the message is available from
//! [`fracp_last_error_message`] on the same thread. Panics never cross the
//! boundary: they are reported as [`FracpStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use fracp::analysis::{fit_decay, harnack_ratio};
use fracp::config::{parse_config, GOLDEN_CONFIG};
use fracp::grid::{Grading, RadialFunction, RadialGrid};
use fracp::kernel::{c_beta, AngularWeight, QuadratureSpec};
use fracp::operator::{energy_seminorm, weak_residual, KernelMatrix};
use fracp::solver::{doubling_schedule, solve_capacitary, solve_pure_singular, SolverOptions};
use fracp::{Error, ProblemParams};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracpStatus {
    Ok = 0,
    /// Argument outside the domain of the quantity.
    Domain = 1,
    /// Quadrature or iteration did not reach its target.
    Convergence = 2,
    /// Kernel assembly failed.
    Assembly = 3,
    /// Caller misuse: mismatched handles, bad windows, short buffers.
    Usage = 4,
    /// Rejected configuration or violated problem hypothesis.
    Config = 5,
    Parse = 6,
    Io = 7,
    Json = 8,
    NullPointer = 9,
    Panic = 10,
}

/// Angular weight in the radial reduction of the kernel.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracpAngular {
    /// sin^{N-2}: the weight that reproduces the classical p = 2 constant.
    Standard = 0,
    /// sin^{N-1}.
    Alternate = 1,
}

/// Problem exponents and constants.
pub struct FracpParams(ProblemParams);
/// Radial grid.
pub struct FracpGrid(Arc<RadialGrid>);
/// Assembled interaction weights for one grid and exponent.
pub struct FracpKernel(KernelMatrix);
/// Nodal values on a grid.
pub struct FracpFunction(RadialFunction);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> FracpStatus {
    match err {
        Error::Domain(_) => FracpStatus::Domain,
        Error::Convergence { .. } => FracpStatus::Convergence,
        Error::Assembly { .. } => FracpStatus::Assembly,
        Error::Usage(_) => FracpStatus::Usage,
        Error::Config { .. } => FracpStatus::Config,
        Error::Parse { .. } => FracpStatus::Parse,
        Error::Io(_) => FracpStatus::Io,
        Error::Json(_) => FracpStatus::Json,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> FracpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FracpStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer passed for `{what}`"));
            FracpStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            FracpStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> std::result::Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> std::result::Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn fill(dst: *mut f64, len: usize, src: &[f64]) -> Outcome {
    if dst.is_null() {
        return Err(Failure::Null("buffer"));
    }
    if len < src.len() {
        return Err(Error::usage(format!("buffer holds {len} values, {} needed", src.len())).into());
    }
    std::slice::from_raw_parts_mut(dst, src.len()).copy_from_slice(src);
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn fracp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Validates the structural constraints and creates a parameter handle.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fracp_params_new(
    n: u32,
    s: f64,
    p: f64,
    gamma: f64,
    r_exp: f64,
    alpha: f64,
    c_a: f64,
    out_params: *mut *mut FracpParams,
) -> FracpStatus {
    guard(|| {
        let slot = out(out_params, "out_params")?;
        *slot = boxed(FracpParams(ProblemParams::new(n, s, p, gamma, r_exp, alpha, c_a)?));
        Ok(())
    })
}

/// # Safety
/// `params` must come from [`fracp_params_new`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fracp_params_free(params: *mut FracpParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Checks the reaction-growth and weight hypotheses; the error message
/// names the violated one.
///
/// # Safety
/// `params` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn fracp_params_check_hypotheses(params: *const FracpParams) -> FracpStatus {
    guard(|| Ok(deref(params, "params")?.0.require_hypotheses()?))
}

/// Decay exponent (N - sp)/(p - 1).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fracp_params_beta_star(params: *const FracpParams, out_value: *mut f64) -> FracpStatus {
    guard(|| {
        *out(out_value, "out_value")? = deref(params, "params")?.0.beta_star();
        Ok(())
    })
}

/// The constant C(β) of the power law (-Δ_p)^s r^{-β} = C(β) r^{-β(p-1)-sp}.
///
/// # Safety
/// Pointers must be valid; `out_rel_err` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn fracp_c_beta(
    params: *const FracpParams,
    beta: f64,
    angular: FracpAngular,
    out_value: *mut f64,
    out_rel_err: *mut f64,
) -> FracpStatus {
    guard(|| {
        let params = &deref(params, "params")?.0;
        let angular = match angular {
            FracpAngular::Standard => AngularWeight::Standard,
            FracpAngular::Alternate => AngularWeight::Alternate,
        };
        let q = c_beta(beta, params, &QuadratureSpec::for_params(params).with_angular(angular))?;
        *out(out_value, "out_value")? = q.value;
        if let Some(e) = out_rel_err.as_mut() {
            *e = q.rel_err();
        }
        Ok(())
    })
}

/// Grid with `cells` cells on [0, r_max], geometrically stretched so the last
/// cell is `stretch` times the first; `anchor > 0` forces a node there.
///
/// # Safety
/// `out_grid` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fracp_grid_new(
    r_max: f64,
    cells: usize,
    stretch: f64,
    anchor: f64,
    tail_exponent: f64,
    out_grid: *mut *mut FracpGrid,
) -> FracpStatus {
    guard(|| {
        let slot = out(out_grid, "out_grid")?;
        let anchor = (anchor > 0.0).then_some(anchor);
        let g = RadialGrid::graded(r_max, cells, Grading::Stretch(stretch), anchor, tail_exponent)?;
        *slot = boxed(FracpGrid(Arc::new(g)));
        Ok(())
    })
}

/// # Safety
/// `grid` must come from [`fracp_grid_new`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fracp_grid_free(grid: *mut FracpGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of nodes (cells + 1); 0 for a NULL handle.
///
/// # Safety
/// `grid` must be a valid handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fracp_grid_len(grid: *const FracpGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// Copies the node radii into `buf` (capacity `len`).
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fracp_grid_nodes(grid: *const FracpGrid, buf: *mut f64, len: usize) -> FracpStatus {
    guard(|| fill(buf, len, deref(grid, "grid")?.0.nodes()))
}

/// Assembles the interaction weights for `grid` and the exponents in `params`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fracp_kernel_assemble(
    grid: *const FracpGrid,
    params: *const FracpParams,
    out_kernel: *mut *mut FracpKernel,
) -> FracpStatus {
    guard(|| {
        let slot = out(out_kernel, "out_kernel")?;
        let k = KernelMatrix::assemble(&deref(grid, "grid")?.0, &deref(params, "params")?.0)?;
        *slot = boxed(FracpKernel(k));
        Ok(())
    })
}

/// # Safety
/// `kernel` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fracp_kernel_free(kernel: *mut FracpKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// Function with the given nodal values; `len` must equal the grid length.
///
/// # Safety
/// `values` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fracp_function_new(
    grid: *const FracpGrid,
    values: *const f64,
    len: usize,
    out_function: *mut *mut FracpFunction,
) -> FracpStatus {
    guard(|| {
        let slot = out(out_function, "out_function")?;
        let grid = deref(grid, "grid")?;
        if values.is_null() {
            return Err(Failure::Null("values"));
        }
        let v = std::slice::from_raw_parts(values, len).to_vec();
        *slot = boxed(FracpFunction(RadialFunction::new(grid.0.clone(), v)?));
        Ok(())
    })
}

/// # Safety
/// `function` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fracp_function_free(function: *mut FracpFunction) {
    if !function.is_null() {
        drop(Box::from_raw(function));
    }
}

/// Number of nodal values; 0 for a NULL handle.
///
/// # Safety
/// `function` must be a valid handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fracp_function_len(function: *const FracpFunction) -> usize {
    function.as_ref().map_or(0, |f| f.0.values().len())
}

/// Copies the nodal values into `buf` (capacity `len`).
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fracp_function_values(function: *const FracpFunction, buf: *mut f64, len: usize) -> FracpStatus {
    guard(|| fill(buf, len, deref(function, "function")?.0.values()))
}

/// Discrete Gagliardo energy [u]^p.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fracp_energy(
    kernel: *const FracpKernel,
    params: *const FracpParams,
    function: *const FracpFunction,
    out_value: *mut f64,
) -> FracpStatus {
    guard(|| {
        let e = energy_seminorm(&deref(function, "function")?.0, &deref(kernel, "kernel")?.0, &deref(params, "params")?.0)?;
        *out(out_value, "out_value")? = e;
        Ok(())
    })
}

/// Weak residual ⟨(-Δ_p)^s u, φ_i⟩ at every node, into `buf` (capacity `len`).
///
/// # Safety
/// `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fracp_weak_residual(
    kernel: *const FracpKernel,
    params: *const FracpParams,
    function: *const FracpFunction,
    buf: *mut f64,
    len: usize,
) -> FracpStatus {
    guard(|| {
        let r = weak_residual(&deref(function, "function")?.0, &deref(kernel, "kernel")?.0, &deref(params, "params")?.0)?;
        fill(buf, len, &r)
    })
}

/// Solution of the pure-singular problem by continuation over shifts
/// 1, 2, 4, ..., 2^levels. `out_converged` may be NULL.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fracp_solve_pure_singular(
    params: *const FracpParams,
    grid: *const FracpGrid,
    kernel: *const FracpKernel,
    levels: u32,
    tol: f64,
    max_iter: usize,
    out_function: *mut *mut FracpFunction,
    out_converged: *mut bool,
) -> FracpStatus {
    guard(|| {
        let slot = out(out_function, "out_function")?;
        let params = &deref(params, "params")?.0;
        params.require_hypotheses()?;
        let opts = SolverOptions { tol, max_iter };
        let schedule = doubling_schedule(levels);
        let (u, _, rep) =
            solve_pure_singular(params, deref(grid, "grid")?.0.clone(), &deref(kernel, "kernel")?.0, &schedule, &opts)?;
        if let Some(c) = out_converged.as_mut() {
            *c = rep.converged;
        }
        *slot = boxed(FracpFunction(u));
        Ok(())
    })
}

/// Capacitary potential of the ball of radius `radius` (a grid node).
/// `out_converged` may be NULL.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fracp_solve_capacitary(
    params: *const FracpParams,
    grid: *const FracpGrid,
    kernel: *const FracpKernel,
    radius: f64,
    tol: f64,
    max_iter: usize,
    out_function: *mut *mut FracpFunction,
    out_converged: *mut bool,
) -> FracpStatus {
    guard(|| {
        let slot = out(out_function, "out_function")?;
        let opts = SolverOptions { tol, max_iter };
        let (u, rep) = solve_capacitary(
            radius,
            &deref(params, "params")?.0,
            deref(grid, "grid")?.0.clone(),
            &deref(kernel, "kernel")?.0,
            &opts,
        )?;
        if let Some(c) = out_converged.as_mut() {
            *c = rep.converged;
        }
        *slot = boxed(FracpFunction(u));
        Ok(())
    })
}

/// Least-squares power-law fit u ≈ amplitude · r^{-exponent} on [lo, hi].
/// `out_amplitude` and `out_rms` may be NULL.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fracp_fit_decay(
    function: *const FracpFunction,
    lo: f64,
    hi: f64,
    out_exponent: *mut f64,
    out_amplitude: *mut f64,
    out_rms: *mut f64,
) -> FracpStatus {
    guard(|| {
        let fit = fit_decay(&deref(function, "function")?.0, (lo, hi))?;
        *out(out_exponent, "out_exponent")? = fit.exponent;
        if let Some(a) = out_amplitude.as_mut() {
            *a = fit.amplitude;
        }
        if let Some(r) = out_rms.as_mut() {
            *r = fit.rms_residual;
        }
        Ok(())
    })
}

/// Ratio of the infimum on B_{R/4} to the (p-1)-mean on B_R \ B_{R/2}.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fracp_harnack_ratio(
    function: *const FracpFunction,
    radius: f64,
    params: *const FracpParams,
    out_value: *mut f64,
) -> FracpStatus {
    guard(|| {
        let v = harnack_ratio(&deref(function, "function")?.0, radius, &deref(params, "params")?.0)?;
        *out(out_value, "out_value")? = v;
        Ok(())
    })
}

/// Runs the full verification suite on a `key = value` configuration (NULL:
/// the built-in reference configuration). Sets `out_all_pass`; when
/// `out_report_json` is non-NULL it receives a JSON report to be released
/// with [`fracp_string_free`].
///
/// # Safety
/// `config` must be NULL or a NUL-terminated string; out pointers valid.
#[no_mangle]
pub unsafe extern "C" fn fracp_verify(
    config: *const c_char,
    out_all_pass: *mut bool,
    out_report_json: *mut *mut c_char,
) -> FracpStatus {
    guard(|| {
        let pass = out(out_all_pass, "out_all_pass")?;
        let text = if config.is_null() {
            GOLDEN_CONFIG.to_string()
        } else {
            CStr::from_ptr(config).to_str().map_err(|_| Error::usage("configuration is not valid UTF-8"))?.to_string()
        };
        let cfg = parse_config(&text)?;
        let (report, _) = fracp::verify::run_all(&cfg)?;
        *pass = report.all_pass();
        if let Some(slot) = out_report_json.as_mut() {
            let json = report.to_json()?;
            *slot = CString::new(json).map_err(|_| Error::usage("report contains NUL"))?.into_raw();
        }
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fracp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
