//! Discrete Gagliardo energy for radial piecewise-linear functions.
//!
//! For radial u the energy ∬ |u(x) - u(y)|^p |x - y|^{-N-sp} dx dy reduces to
//! ∫∫ |U(r) - U(r')|^p k(r, r') dr dr' with
//!
//! ```text
//! k(r, r') = |S^{N-1}| r_<^{N-1} (r_> - r_<)^{-1-sp} G((r_> - r_<)/r_>),
//! ```
//!
//! G as in [`PhiTable`]. Pair weights are the exact P1 stiffness of the
//! quadratic form with kernel |r - r'|^{p-2} k, rescaled by |r_i - r_j|^{2-p}:
//! exact for p = 2 and exact on locally linear profiles for every p.

use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{RadialFunction, RadialGrid};
use crate::kernel::{AngularWeight, PhiTable};
use crate::params::ProblemParams;
use crate::quadrature::{gauss_jacobi_left, gauss_legendre, Rule};
use crate::special::unit_sphere_area;

/// Nonlocal interaction weights on a grid's interior and ghost nodes.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    geometry_hash: u64,
    p: f64,
    n_free: usize,
    ext_nodes: Vec<f64>,
    /// Dense symmetric pair weights over the extended node set.
    weights: Vec<f64>,
    /// Gauss points of the interaction with the region beyond the far radius.
    exterior: Vec<ExteriorPoint>,
    volume_weights: Vec<f64>,
    clamped_pairs: usize,
}

/// Quadrature point of the exterior term: element `elem`, local coordinate
/// `z` ∈ (0, 1), weight 2 w h m(r).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorPoint {
    pub elem: usize,
    pub z: f64,
    pub weight: f64,
}

impl ExteriorPoint {
    #[inline]
    fn value(&self, w: &[f64]) -> f64 {
        (1.0 - self.z) * w[self.elem] + self.z * w[self.elem + 1]
    }
}

struct Integrator<'a> {
    table: &'a PhiTable,
    c: f64,
    n: i32,
    sp: f64,
    p: f64,
}

impl Integrator<'_> {
    /// κ = |r - r'|^{1+sp} k(r, r').
    #[inline]
    fn kappa(&self, lo: f64, hi: f64) -> f64 {
        self.c * lo.powi(self.n - 1) * self.table.g((hi - lo) / hi)
    }

    /// Modified kernel |r - r'|^{p-2} k(r, r').
    #[inline]
    fn ktilde(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let d = hi - lo;
        d.powf(self.p - 3.0 - self.sp) * self.kappa(lo, hi)
    }
}

/// Contributions (i, j, w) to the pair weights of the quadratic form.
type Contribs = Vec<(usize, usize, f64)>;

fn far_order(ratio: f64) -> usize {
    match ratio {
        x if x < 1.5 => 10,
        x if x < 3.0 => 8,
        x if x < 6.0 => 6,
        x if x < 12.0 => 5,
        x if x < 24.0 => 4,
        _ => 3,
    }
}

impl KernelMatrix {
    /// Assembles weights for `grid` under the operator parameters (N, s, p).
    /// Kernel geometry always uses the sphere-slicing angular weight.
    pub fn assemble(grid: &RadialGrid, params: &ProblemParams) -> Result<Self> {
        let table = PhiTable::new(params, AngularWeight::Standard);
        let sp = params.sp();
        let p = params.p;
        let it = Integrator { table: &table, c: unit_sphere_area(params.n - 1), n: params.n as i32, sp, p };
        let x = grid.extended_nodes();
        let ne = x.len();
        let n_el = ne - 1;

        let gl: Vec<Rule> = (0..=12).map(|n| if n == 0 { gauss_legendre(1) } else { gauss_legendre(n) }).collect();
        let inner = &gl[12];
        let gj_self = gauss_jacobi_left(12, p - 1.0 - sp);
        let gj_adj = gauss_jacobi_left(12, p - sp);

        let per_element: Vec<Contribs> = (0..n_el)
            .into_par_iter()
            .map(|k| {
                let mut out: Contribs = Vec::new();
                let (a, b) = (x[k], x[k + 1]);
                let h = b - a;
                // Same element: d = r' - r with weight d^{p-1-sp}.
                let e = p - 1.0 - sp;
                let mut acc = 0.0;
                for (t, wt) in gj_self.nodes.iter().zip(&gj_self.weights) {
                    let d = h * t;
                    let len = h - d;
                    let s: f64 = inner
                        .nodes
                        .iter()
                        .zip(&inner.weights)
                        .map(|(z, wz)| {
                            let r = a + len * z;
                            wz * it.kappa(r, r + d)
                        })
                        .sum();
                    acc += wt * len * s;
                }
                out.push((k, k + 1, 2.0 * h.powf(e - 1.0) * acc));

                // Adjacent element, Duffy-split at the shared node.
                if k + 2 < ne {
                    let c = x[k + 2];
                    let (h1, h2) = (h, c - b);
                    let q = p - 3.0 - sp;
                    let (mut w01, mut w02, mut w12) = (0.0, 0.0, 0.0);
                    for (t, wt) in gj_adj.nodes.iter().zip(&gj_adj.weights) {
                        for (w, ww) in inner.nodes.iter().zip(&inner.weights) {
                            // Triangle β ≤ α: α = t, β = t w.
                            let (r, rp) = (b - h1 * t, b + h2 * t * w);
                            let f = wt * ww * (h1 + h2 * w).powf(q) * it.kappa(r, rp);
                            w01 += f * (1.0 - w);
                            w02 += f * w;
                            w12 += f * w * (w - 1.0);
                            // Triangle α ≤ β: β = t, α = t w.
                            let (r, rp) = (b - h1 * t * w, b + h2 * t);
                            let f = wt * ww * (h1 * w + h2).powf(q) * it.kappa(r, rp);
                            w01 += f * w * (w - 1.0);
                            w02 += f * w;
                            w12 += f * (1.0 - w);
                        }
                    }
                    let s = 2.0 * h1 * h2;
                    out.push((k, k + 1, s * w01));
                    out.push((k, k + 2, s * w02));
                    out.push((k + 1, k + 2, s * w12));
                }

                // Separated elements l ≥ k + 2.
                for l in (k + 2)..n_el {
                    let (c, d) = (x[l], x[l + 1]);
                    let h2 = d - c;
                    let rule = &gl[far_order((c - b) / h.max(h2))];
                    let (mut m00, mut m01, mut m10, mut m11, mut self_k, mut self_l) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
                    for (s1, w1) in rule.nodes.iter().zip(&rule.weights) {
                        let r = a + h * s1;
                        for (s2, w2) in rule.nodes.iter().zip(&rule.weights) {
                            let rp = c + h2 * s2;
                            let f = w1 * w2 * it.ktilde(r, rp);
                            let (pk1, pk) = (*s1, 1.0 - s1);
                            let (pl1, pl) = (*s2, 1.0 - s2);
                            m00 += f * pk * pl;
                            m01 += f * pk * pl1;
                            m10 += f * pk1 * pl;
                            m11 += f * pk1 * pl1;
                            self_k += f * pk * pk1;
                            self_l += f * pl * pl1;
                        }
                    }
                    let s = 2.0 * h * h2;
                    out.push((k, l, s * m00));
                    out.push((k, l + 1, s * m01));
                    out.push((k + 1, l, s * m10));
                    out.push((k + 1, l + 1, s * m11));
                    out.push((k, k + 1, -s * self_k));
                    out.push((l, l + 1, -s * self_l));
                }
                out
            })
            .collect();

        let mut w = vec![0.0; ne * ne];
        for contribs in &per_element {
            for &(i, j, v) in contribs {
                if !v.is_finite() {
                    return Err(Error::Assembly { i, j, reason: format!("non-finite cell-pair integral {v}") });
                }
                w[i * ne + j] += v;
            }
        }
        let mut clamped_pairs = 0;
        let mut weights = vec![0.0; ne * ne];
        for i in 0..ne {
            for j in (i + 1)..ne {
                let v = w[i * ne + j] + w[j * ne + i];
                let mut kij = v * (x[j] - x[i]).powf(2.0 - p);
                if kij < 0.0 {
                    clamped_pairs += 1;
                    kij = 0.0;
                }
                weights[i * ne + j] = kij;
                weights[j * ne + i] = kij;
            }
        }

        let exterior = exterior_points(&x, &it, &gl[6]);
        Ok(KernelMatrix {
            geometry_hash: grid.geometry_hash(),
            p,
            n_free: grid.len(),
            ext_nodes: x,
            weights,
            exterior,
            volume_weights: grid.volume_weights(params.n),
            clamped_pairs,
        })
    }

    pub fn geometry_hash(&self) -> u64 {
        self.geometry_hash
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn free_len(&self) -> usize {
        self.n_free
    }

    pub fn extended_len(&self) -> usize {
        self.ext_nodes.len()
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.ext_nodes.len() + j]
    }

    pub fn exterior_points(&self) -> &[ExteriorPoint] {
        &self.exterior
    }

    pub fn volume_weights(&self) -> &[f64] {
        &self.volume_weights
    }

    /// Pairs whose rescaled weight came out negative and was set to zero.
    pub fn clamped_pairs(&self) -> usize {
        self.clamped_pairs
    }

    fn check(&self, u: &RadialFunction) -> Result<()> {
        if u.grid().geometry_hash() != self.geometry_hash || u.grid().len() != self.n_free {
            return Err(Error::usage("function and kernel matrix live on different grids"));
        }
        Ok(())
    }

    /// Σ_{a<b} K_ab |W_a - W_b|^p + Σ_q ω_q |W(r_q)|^p over extended values W.
    pub fn energy_ext(&self, w: &[f64]) -> f64 {
        let ne = self.ext_nodes.len();
        let p = self.p;
        let mut e = 0.0;
        for a in 0..ne {
            let row = &self.weights[a * ne..(a + 1) * ne];
            let wa = w[a];
            let mut s = 0.0;
            for b in (a + 1)..ne {
                let d = (wa - w[b]).abs();
                if d > 0.0 {
                    s += row[b] * d.powf(p);
                }
            }
            e += s;
        }
        e + self.exterior.iter().map(|q| q.weight * q.value(w).abs().powf(p)).sum::<f64>()
    }

    /// (1/p) ∂E/∂W over the extended nodes.
    pub fn gradient_ext(&self, w: &[f64]) -> Vec<f64> {
        let p = self.p;
        let mut g = self.pair_gradient_ext(w);
        for q in &self.exterior {
            let v = q.value(w);
            if v != 0.0 {
                let f = q.weight * v.abs().powf(p - 2.0) * v;
                g[q.elem] += f * (1.0 - q.z);
                g[q.elem + 1] += f * q.z;
            }
        }
        g
    }

    /// Pairwise part of [`gradient_ext`](Self::gradient_ext), without the
    /// exterior term (which is not invariant under adding constants).
    pub fn pair_gradient_ext(&self, w: &[f64]) -> Vec<f64> {
        let ne = self.ext_nodes.len();
        let p = self.p;
        (0..ne)
            .map(|a| {
                let row = &self.weights[a * ne..(a + 1) * ne];
                w.iter()
                    .enumerate()
                    .filter(|(_, &wb)| wb != w[a])
                    .map(|(b, &wb)| {
                        let d = w[a] - wb;
                        row[b] * d.abs().powf(p - 2.0) * d
                    })
                    .sum()
            })
            .collect()
    }

    /// Chain rule through the tail: ghost values are U_M τ_e.
    fn fold(&self, g_ext: &[f64], tau: &[f64]) -> Vec<f64> {
        let m = self.n_free - 1;
        let mut g = g_ext[..self.n_free].to_vec();
        g[m] += tau.iter().zip(&g_ext[self.n_free..]).map(|(t, v)| t * v).sum::<f64>();
        g
    }

    /// Hessian of E/p with respect to the free nodal values.
    pub fn hessian(&self, u: &RadialFunction) -> Result<nalgebra::DMatrix<f64>> {
        self.check(u)?;
        let w = u.extended_values();
        let tau = u.grid().tail_factors();
        let ne = self.ext_nodes.len();
        let nf = self.n_free;
        let m = nf - 1;
        let p = self.p;
        let c = p - 1.0;
        let mut full = vec![0.0; ne * ne];
        for a in 0..ne {
            let mut diag = 0.0;
            for b in 0..ne {
                if a == b {
                    continue;
                }
                let d = (w[a] - w[b]).abs();
                let hab = if p == 2.0 {
                    self.weight(a, b)
                } else if d > 0.0 {
                    c * self.weight(a, b) * d.powf(p - 2.0)
                } else {
                    0.0
                };
                full[a * ne + b] = -hab;
                diag += hab;
            }
            full[a * ne + a] = diag;
        }
        for q in &self.exterior {
            let v = q.value(&w);
            let f = if p == 2.0 {
                q.weight
            } else if v != 0.0 {
                c * q.weight * v.abs().powf(p - 2.0)
            } else {
                0.0
            };
            let (k, z) = (q.elem, q.z);
            full[k * ne + k] += f * (1.0 - z) * (1.0 - z);
            full[k * ne + k + 1] += f * (1.0 - z) * z;
            full[(k + 1) * ne + k] += f * (1.0 - z) * z;
            full[(k + 1) * ne + k + 1] += f * z * z;
        }
        let mut h = nalgebra::DMatrix::<f64>::zeros(nf, nf);
        for i in 0..nf {
            for j in 0..nf {
                h[(i, j)] = full[i * ne + j];
            }
        }
        // Fold ghost rows/columns into node M.
        for i in 0..nf {
            let s: f64 = tau.iter().enumerate().map(|(e, t)| t * full[i * ne + nf + e]).sum();
            h[(i, m)] += s;
            h[(m, i)] += s;
        }
        let mut ss = 0.0;
        for (e, te) in tau.iter().enumerate() {
            for (f, tf) in tau.iter().enumerate() {
                ss += te * tf * full[(nf + e) * ne + nf + f];
            }
        }
        h[(m, m)] += ss;
        Ok(h)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        let ne = self.ext_nodes.len();
        writeln!(
            f,
            "# grid_hash={:016x} p={:.17e} free={} extended={} clamped={}",
            self.geometry_hash, self.p, self.n_free, ne, self.clamped_pairs
        )?;
        writeln!(f, "i,j,weight")?;
        for i in 0..ne {
            for j in (i + 1)..ne {
                let v = self.weight(i, j);
                if v != 0.0 {
                    writeln!(f, "{i},{j},{v:.17e}")?;
                }
            }
        }
        writeln!(f, "element,z,exterior_weight")?;
        for q in &self.exterior {
            writeln!(f, "{},{:.17e},{:.17e}", q.elem, q.z, q.weight)?;
        }
        f.flush()?;
        Ok(())
    }

    /// Loads a cache written by [`write_csv`](Self::write_csv); rejects files
    /// for other grids or exponents.
    pub fn read_csv(path: &Path, grid: &RadialGrid, params: &ProblemParams) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
        let x = grid.extended_nodes();
        let ne = x.len();
        let mut weights = vec![0.0; ne * ne];
        let mut exterior = Vec::new();
        let mut in_exterior = false;
        let mut clamped_pairs = 0;
        let mut header = false;
        for (idx, line) in file.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if let Some(meta) = t.strip_prefix('#') {
                for kv in meta.split_whitespace() {
                    let (k, v) = kv.split_once('=').unwrap_or((kv, ""));
                    match k {
                        "grid_hash" => {
                            if u64::from_str_radix(v, 16).ok() != Some(grid.geometry_hash()) {
                                return Err(err(idx + 1, "grid hash mismatch".into()));
                            }
                            header = true;
                        }
                        "p" => {
                            if v.parse::<f64>().ok() != Some(params.p) {
                                return Err(err(idx + 1, format!("cached for p={v}, need p={}", params.p)));
                            }
                        }
                        "extended" => {
                            if v.parse::<usize>().ok() != Some(ne) {
                                return Err(err(idx + 1, "extended node count mismatch".into()));
                            }
                        }
                        "clamped" => clamped_pairs = v.parse().unwrap_or(0),
                        _ => {}
                    }
                }
                continue;
            }
            if t.is_empty() || t.starts_with("i,") {
                continue;
            }
            if t.starts_with("element,") {
                in_exterior = true;
                continue;
            }
            let cols: Vec<&str> = t.split(',').collect();
            if cols.len() != 3 {
                return Err(err(idx + 1, "expected three columns".into()));
            }
            if in_exterior {
                let elem: usize = cols[0].trim().parse().map_err(|_| err(idx + 1, "bad element".into()))?;
                let z: f64 = cols[1].trim().parse().map_err(|_| err(idx + 1, "bad z".into()))?;
                let weight: f64 = cols[2].trim().parse().map_err(|_| err(idx + 1, "bad weight".into()))?;
                if elem + 1 >= ne {
                    return Err(err(idx + 1, format!("element {elem} out of range")));
                }
                exterior.push(ExteriorPoint { elem, z, weight });
                continue;
            }
            let i: usize = cols[0].trim().parse().map_err(|_| err(idx + 1, "bad i".into()))?;
            let j: usize = cols[1].trim().parse().map_err(|_| err(idx + 1, "bad j".into()))?;
            let v: f64 = cols[2].trim().parse().map_err(|_| err(idx + 1, "bad weight".into()))?;
            if i >= ne || j >= ne || i == j {
                return Err(err(idx + 1, format!("bad pair index ({i},{j})")));
            }
            weights[i * ne + j] = v;
            weights[j * ne + i] = v;
        }
        if !header {
            return Err(err(1, "missing grid hash header".into()));
        }
        Ok(KernelMatrix {
            geometry_hash: grid.geometry_hash(),
            p: params.p,
            n_free: grid.len(),
            ext_nodes: x,
            weights,
            exterior,
            volume_weights: grid.volume_weights(params.n),
            clamped_pairs,
        })
    }
}

/// Gauss points of 2 ∫ |u(r)|^p m(r) dr on every element, with
/// m(r) = ∫_{R_far}^∞ k(r, r') dr' the coupling to the zero exterior.
fn exterior_points(x: &[f64], it: &Integrator, rule: &Rule) -> Vec<ExteriorPoint> {
    let ne = x.len();
    let r_far = x[ne - 1];
    let gj = gauss_jacobi_left(12, it.sp - 1.0);
    let m = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let rho_max = (r / r_far).min(0.5);
        let s: f64 = gj.nodes.iter().zip(&gj.weights).map(|(t, w)| w * it.table.phi(1.0 - rho_max * t)).sum();
        it.c * r.powf(it.n as f64 - 1.0 - it.sp) * rho_max.powf(it.sp) * s
    };
    let mut out = Vec::with_capacity((ne - 1) * rule.nodes.len());
    for k in 0..ne - 1 {
        let (a, b) = (x[k], x[k + 1]);
        let h = b - a;
        for (z, w) in rule.nodes.iter().zip(&rule.weights) {
            out.push(ExteriorPoint { elem: k, z: *z, weight: 2.0 * w * h * m(a + h * z) });
        }
    }
    out
}

/// Discrete [u]_{s,p}^p.
pub fn energy_seminorm(u: &RadialFunction, k: &KernelMatrix, params: &ProblemParams) -> Result<f64> {
    check_params(k, params)?;
    k.check(u)?;
    Ok(k.energy_ext(&u.extended_values()))
}

/// R_i = ⟨(-Δ_p)^s u, φ_i⟩ = (1/p) ∂E/∂U_i, including the tail chain rule at
/// the last node.
pub fn weak_residual(u: &RadialFunction, k: &KernelMatrix, params: &ProblemParams) -> Result<Vec<f64>> {
    check_params(k, params)?;
    k.check(u)?;
    let g = k.gradient_ext(&u.extended_values());
    Ok(k.fold(&g, &u.grid().tail_factors()))
}

fn check_params(k: &KernelMatrix, params: &ProblemParams) -> Result<()> {
    if k.p != params.p {
        return Err(Error::usage(format!("kernel matrix assembled for p={}, called with p={}", k.p, params.p)));
    }
    Ok(())
}

/// a(r) = c_a / (1 + r^{N+α}).
pub fn weight_a(r: f64, params: &ProblemParams) -> f64 {
    params.c_a / (1.0 + r.powf(params.nf() + params.alpha))
}

/// (∫ |u|^q w dx)^{1/q} with w = 1 / (1 + |x|^{N+α}): nodal quadrature inside
/// R_max plus the exterior power tail integrated as a convergent series.
pub fn weighted_norm(u: &RadialFunction, q: f64, params: &ProblemParams) -> Result<f64> {
    let p_star = params.p_star();
    if !(q >= 1.0 && q <= p_star) {
        return Err(Error::domain(format!("q = {q} outside [1, p*] = [1, {p_star}]")));
    }
    let grid = u.grid();
    let omega = grid.volume_weights(params.n);
    let w = |r: f64| 1.0 / (1.0 + r.powf(params.nf() + params.alpha));
    let inner: f64 = grid.nodes().iter().zip(u.values()).zip(&omega).map(|((r, v), om)| om * v.abs().powf(q) * w(*r)).sum();
    // ∫_R^∞ |A|^q r^{-βq} r^{N-1} / (1 + r^{N+α}) dr
    //   = Σ_k (-1)^k R^{-(c + k(N+α)) + 1} / (c + k(N+α) - 1),  c = βq + α + 1.
    let amp = u.tail_amplitude().abs().powf(q);
    let tail = if amp == 0.0 {
        0.0
    } else {
        let big_r = grid.r_max();
        let na = params.nf() + params.alpha;
        let c = grid.tail_exponent() * q + params.alpha + 1.0;
        let mut s = 0.0;
        for k in 0..40 {
            let e = c + k as f64 * na - 1.0;
            let term = big_r.powf(-e) / e;
            s += if k % 2 == 0 { term } else { -term };
            if term < 1e-18 * s.abs() {
                break;
            }
        }
        unit_sphere_area(params.n - 1) * amp * s
    };
    Ok((inner + tail).powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grading;
    use std::sync::Arc;

    fn setup(p: f64, m: usize) -> (Arc<RadialGrid>, KernelMatrix, ProblemParams) {
        let params = ProblemParams::operator(3, 0.5, p).unwrap();
        let grid = Arc::new(RadialGrid::graded(16.0, m, Grading::Stretch(20.0), None, params.beta_star()).unwrap());
        let k = KernelMatrix::assemble(&grid, &params).unwrap();
        (grid, k, params)
    }

    #[test]
    fn weights_symmetric_nonnegative() {
        let (_, k, _) = setup(2.5, 24);
        let ne = k.extended_len();
        for i in 0..ne {
            assert_eq!(k.weight(i, i), 0.0);
            for j in 0..ne {
                assert_eq!(k.weight(i, j), k.weight(j, i));
                assert!(k.weight(i, j) >= 0.0);
            }
        }
        assert!(k.volume_weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn constant_has_zero_energy_without_tail() {
        let (grid, k, params) = setup(2.0, 20);
        let u = RadialFunction::zeros(grid);
        assert_eq!(energy_seminorm(&u, &k, &params).unwrap(), 0.0);
    }

    #[test]
    fn weight_a_values() {
        let pr = ProblemParams::new(3, 0.5, 2.5, 0.5, 1.2, 1.0, 2.0).unwrap();
        assert_eq!(weight_a(0.0, &pr), 2.0);
        assert_eq!(weight_a(1.0, &pr), 1.0);
        assert!((weight_a(10.0, &pr) - 2.0 / (1.0 + 1e4)).abs() < 1e-15);
    }

    #[test]
    fn mismatched_grid_is_usage_error() {
        let (_, k, params) = setup(2.0, 20);
        let other = Arc::new(RadialGrid::graded(16.0, 21, Grading::Stretch(20.0), None, 1.0).unwrap());
        let u = RadialFunction::zeros(other);
        assert!(matches!(energy_seminorm(&u, &k, &params), Err(Error::Usage(_))));
    }

    #[test]
    fn csv_cache_roundtrip() {
        let (grid, k, params) = setup(2.5, 20);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.csv");
        k.write_csv(&path).unwrap();
        let back = KernelMatrix::read_csv(&path, &grid, &params).unwrap();
        assert_eq!(back.weights, k.weights);
        assert_eq!(back.exterior, k.exterior);
    }
}
