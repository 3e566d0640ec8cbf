/* Generated by cbindgen from src/lib.rs; do not edit. */

#ifndef FRACP_H
#define FRACP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Angular weight in the radial reduction of the kernel.
typedef enum FracpAngular {
  // sin^{N-2}: the weight that reproduces the classical p = 2 constant.
  FRACP_ANGULAR_STANDARD = 0,
  // sin^{N-1}.
  FRACP_ANGULAR_ALTERNATE = 1,
} FracpAngular;

// Result of every fallible call.
typedef enum FracpStatus {
  FRACP_STATUS_OK = 0,
  // Argument outside the domain of the quantity.
  FRACP_STATUS_DOMAIN = 1,
  // Quadrature or iteration did not reach its target.
  FRACP_STATUS_CONVERGENCE = 2,
  // Kernel assembly failed.
  FRACP_STATUS_ASSEMBLY = 3,
  // Caller misuse: mismatched handles, bad windows, short buffers.
  FRACP_STATUS_USAGE = 4,
  // Rejected configuration or violated problem hypothesis.
  FRACP_STATUS_CONFIG = 5,
  FRACP_STATUS_PARSE = 6,
  FRACP_STATUS_IO = 7,
  FRACP_STATUS_JSON = 8,
  FRACP_STATUS_NULL_POINTER = 9,
  FRACP_STATUS_PANIC = 10,
} FracpStatus;

// Nodal values on a grid.
typedef struct FracpFunction FracpFunction;

// Radial grid.
typedef struct FracpGrid FracpGrid;

// Assembled interaction weights for one grid and exponent.
typedef struct FracpKernel FracpKernel;

// Problem exponents and constants.
typedef struct FracpParams FracpParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next call into this library on the same thread.
const char *fracp_last_error_message(void);

// Validates the structural constraints and creates a parameter handle.
//
// # Safety
// `out` must be a valid pointer.
enum FracpStatus fracp_params_new(uint32_t n,
                                  double s,
                                  double p,
                                  double gamma,
                                  double r_exp,
                                  double alpha,
                                  double c_a,
                                  struct FracpParams **out_params);

// # Safety
// `params` must come from [`fracp_params_new`] or be NULL.
void fracp_params_free(struct FracpParams *params);

// Checks the reaction-growth and weight hypotheses; the error message
// names the violated one.
//
// # Safety
// `params` must be a valid handle.
enum FracpStatus fracp_params_check_hypotheses(const struct FracpParams *params);

// Decay exponent (N - sp)/(p - 1).
//
// # Safety
// Pointers must be valid.
enum FracpStatus fracp_params_beta_star(const struct FracpParams *params, double *out_value);

// The constant C(β) of the power law (-Δ_p)^s r^{-β} = C(β) r^{-β(p-1)-sp}.
//
// # Safety
// Pointers must be valid; `out_rel_err` may be NULL.
enum FracpStatus fracp_c_beta(const struct FracpParams *params,
                              double beta,
                              enum FracpAngular angular,
                              double *out_value,
                              double *out_rel_err);

// Grid with `cells` cells on [0, r_max], geometrically stretched so the last
// cell is `stretch` times the first; `anchor > 0` forces a node there.
//
// # Safety
// `out_grid` must be a valid pointer.
enum FracpStatus fracp_grid_new(double r_max,
                                size_t cells,
                                double stretch,
                                double anchor,
                                double tail_exponent,
                                struct FracpGrid **out_grid);

// # Safety
// `grid` must come from [`fracp_grid_new`] or be NULL.
void fracp_grid_free(struct FracpGrid *grid);

// Number of nodes (cells + 1); 0 for a NULL handle.
//
// # Safety
// `grid` must be a valid handle or NULL.
size_t fracp_grid_len(const struct FracpGrid *grid);

// Copies the node radii into `buf` (capacity `len`).
//
// # Safety
// `buf` must hold `len` doubles.
enum FracpStatus fracp_grid_nodes(const struct FracpGrid *grid, double *buf, size_t len);

// Assembles the interaction weights for `grid` and the exponents in `params`.
//
// # Safety
// Pointers must be valid.
enum FracpStatus fracp_kernel_assemble(const struct FracpGrid *grid,
                                       const struct FracpParams *params,
                                       struct FracpKernel **out_kernel);

// # Safety
// `kernel` must come from this library or be NULL.
void fracp_kernel_free(struct FracpKernel *kernel);

// Function with the given nodal values; `len` must equal the grid length.
//
// # Safety
// `values` must hold `len` doubles.
enum FracpStatus fracp_function_new(const struct FracpGrid *grid,
                                    const double *values,
                                    size_t len,
                                    struct FracpFunction **out_function);

// # Safety
// `function` must come from this library or be NULL.
void fracp_function_free(struct FracpFunction *function);

// Number of nodal values; 0 for a NULL handle.
//
// # Safety
// `function` must be a valid handle or NULL.
size_t fracp_function_len(const struct FracpFunction *function);

// Copies the nodal values into `buf` (capacity `len`).
//
// # Safety
// `buf` must hold `len` doubles.
enum FracpStatus fracp_function_values(const struct FracpFunction *function,
                                       double *buf,
                                       size_t len);

// Discrete Gagliardo energy [u]^p.
//
// # Safety
// Pointers must be valid.
enum FracpStatus fracp_energy(const struct FracpKernel *kernel,
                              const struct FracpParams *params,
                              const struct FracpFunction *function,
                              double *out_value);

// Weak residual ⟨(-Δ_p)^s u, φ_i⟩ at every node, into `buf` (capacity `len`).
//
// # Safety
// `buf` must hold `len` doubles.
enum FracpStatus fracp_weak_residual(const struct FracpKernel *kernel,
                                     const struct FracpParams *params,
                                     const struct FracpFunction *function,
                                     double *buf,
                                     size_t len);

// Solution of the pure-singular problem by continuation over shifts
// 1, 2, 4, ..., 2^levels. `out_converged` may be NULL.
//
// # Safety
// Pointers must be valid.
enum FracpStatus fracp_solve_pure_singular(const struct FracpParams *params,
                                           const struct FracpGrid *grid,
                                           const struct FracpKernel *kernel,
                                           uint32_t levels,
                                           double tol,
                                           size_t max_iter,
                                           struct FracpFunction **out_function,
                                           bool *out_converged);

// Capacitary potential of the ball of radius `radius` (a grid node).
// `out_converged` may be NULL.
//
// # Safety
// Pointers must be valid.
enum FracpStatus fracp_solve_capacitary(const struct FracpParams *params,
                                        const struct FracpGrid *grid,
                                        const struct FracpKernel *kernel,
                                        double radius,
                                        double tol,
                                        size_t max_iter,
                                        struct FracpFunction **out_function,
                                        bool *out_converged);

// Least-squares power-law fit u ≈ amplitude · r^{-exponent} on [lo, hi].
// `out_amplitude` and `out_rms` may be NULL.
//
// # Safety
// Pointers must be valid.
enum FracpStatus fracp_fit_decay(const struct FracpFunction *function,
                                 double lo,
                                 double hi,
                                 double *out_exponent,
                                 double *out_amplitude,
                                 double *out_rms);

// Ratio of the infimum on B_{R/4} to the (p-1)-mean on B_R \ B_{R/2}.
//
// # Safety
// Pointers must be valid.
enum FracpStatus fracp_harnack_ratio(const struct FracpFunction *function,
                                     double radius,
                                     const struct FracpParams *params,
                                     double *out_value);

// Runs the full verification suite on a `key = value` configuration (NULL:
// the built-in reference configuration). Sets `out_all_pass`; when
// `out_report_json` is non-NULL it receives a JSON report to be released
// with [`fracp_string_free`].
//
// # Safety
// `config` must be NULL or a NUL-terminated string; out pointers valid.
enum FracpStatus fracp_verify(const char *config, bool *out_all_pass, char **out_report_json);

// # Safety
// `s` must come from this library or be NULL.
void fracp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACP_H */
