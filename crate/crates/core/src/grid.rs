//! Radial grids on [0, R_max] with a power-law exterior, and functions on them.

use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::unit_ball_volume;

/// Far-field nodes extend the grid to this multiple of R_max.
pub const FAR_FACTOR: f64 = 256.0;
/// Per-cell growth of the ghost cells beyond R_max, capped by `GHOST_MAX_ASPECT`.
const GHOST_GROWTH: f64 = 1.15;
/// Largest ghost cell width relative to its left endpoint.
const GHOST_MAX_ASPECT: f64 = 0.25;

/// How cell widths grow from the origin outward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Grading {
    /// Ratio of the last cell width to the first.
    Stretch(f64),
    /// Constant ratio between consecutive cell widths.
    Ratio(f64),
}

impl Default for Grading {
    fn default() -> Self {
        Grading::Stretch(50.0)
    }
}

impl Grading {
    fn ratio(self, m: usize) -> f64 {
        match self {
            Grading::Stretch(s) => s.powf(1.0 / (m as f64 - 1.0)),
            Grading::Ratio(g) => g,
        }
    }
}

/// Nodes 0 = r_0 < r_1 < ... < r_M = R_max, plus ghost nodes continuing the
/// mesh out to `FAR_FACTOR · R_max` on which functions follow the tail model
/// U(r) = U_M (r / R_max)^{-tail_exponent}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    ghosts: Vec<f64>,
    tail_exponent: f64,
}

impl RadialGrid {
    /// Geometric grid r_i = A (g^i - 1). With an anchor, g is adjusted so that
    /// some node lands exactly on it.
    pub fn graded(r_max: f64, m: usize, grading: Grading, anchor: Option<f64>, tail_exponent: f64) -> Result<Self> {
        if m < 16 {
            return Err(Error::domain(format!("grid needs M >= 16 cells, got {m}")));
        }
        if !(r_max >= 8.0) || !r_max.is_finite() {
            return Err(Error::domain(format!("grid needs R_max >= 8, got {r_max}")));
        }
        let g0 = grading.ratio(m);
        if !(g0 >= 1.0) || !g0.is_finite() {
            return Err(Error::domain(format!("grading ratio {g0} must be finite and >= 1")));
        }
        let ln_g = match anchor {
            None => g0.ln(),
            Some(a) => {
                if !(a > 0.0 && a < r_max) {
                    return Err(Error::domain(format!("anchor {a} must lie in (0, R_max)")));
                }
                anchored_log_ratio(r_max, m, a, g0.ln())
                    .ok_or_else(|| Error::domain(format!("no graded grid with M={m} has a node at {a}")))?
            }
        };
        let mut nodes: Vec<f64> = if ln_g == 0.0 {
            (0..=m).map(|i| r_max * i as f64 / m as f64).collect()
        } else {
            let scale = r_max / (m as f64 * ln_g).exp_m1();
            (0..=m).map(|i| scale * (i as f64 * ln_g).exp_m1()).collect()
        };
        nodes[m] = r_max;
        if let Some(a) = anchor {
            let k =
                nodes.iter().enumerate().min_by(|x, y| (x.1 - a).abs().total_cmp(&(y.1 - a).abs())).map(|(k, _)| k).unwrap_or(0);
            nodes[k] = a;
        }
        Self::from_nodes(nodes, tail_exponent)
    }

    pub fn from_nodes(nodes: Vec<f64>, tail_exponent: f64) -> Result<Self> {
        let m = nodes.len().saturating_sub(1);
        if m < 16 {
            return Err(Error::domain(format!("grid needs M >= 16 cells, got {m}")));
        }
        if nodes[0] != 0.0 {
            return Err(Error::domain("grid must start at r = 0"));
        }
        if let Some(w) = nodes.windows(2).position(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::domain(format!("grid nodes not strictly increasing at index {}", w + 1)));
        }
        let r_max = nodes[m];
        if !(r_max >= 8.0) {
            return Err(Error::domain(format!("grid needs R_max >= 8, got {r_max}")));
        }
        if !(tail_exponent > 0.0) || !tail_exponent.is_finite() {
            return Err(Error::domain(format!("tail exponent {tail_exponent} must be finite and > 0")));
        }
        let mut ghosts = Vec::new();
        let mut r = r_max;
        let mut h = nodes[m] - nodes[m - 1];
        let r_far = FAR_FACTOR * r_max;
        while r < r_far {
            h = (h * GHOST_GROWTH).min(GHOST_MAX_ASPECT * r);
            r = (r + h).min(r_far);
            if r_far - r < 0.5 * h {
                r = r_far;
            }
            ghosts.push(r);
        }
        Ok(RadialGrid { nodes, ghosts, tail_exponent })
    }

    /// Same geometry with a different tail exponent.
    pub fn with_tail_exponent(&self, tail_exponent: f64) -> Result<Self> {
        Self::from_nodes(self.nodes.clone(), tail_exponent)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Nodes beyond R_max, ending at the far radius.
    pub fn ghosts(&self) -> &[f64] {
        &self.ghosts
    }

    /// Interior nodes followed by the ghost nodes.
    pub fn extended_nodes(&self) -> Vec<f64> {
        self.nodes.iter().chain(&self.ghosts).copied().collect()
    }

    /// Number of cells M (the grid has M + 1 nodes).
    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.cells()]
    }

    pub fn r_far(&self) -> f64 {
        *self.ghosts.last().unwrap_or(&self.r_max())
    }

    pub fn tail_exponent(&self) -> f64 {
        self.tail_exponent
    }

    /// Tail factors (r_e / R_max)^{-β_tail} at the ghost nodes.
    pub fn tail_factors(&self) -> Vec<f64> {
        let r_max = self.r_max();
        self.ghosts.iter().map(|r| (r / r_max).powf(-self.tail_exponent)).collect()
    }

    /// Largest ratio between adjacent cell widths.
    pub fn grading_ratio(&self) -> f64 {
        self.nodes
            .windows(3)
            .map(|w| {
                let (a, b) = (w[1] - w[0], w[2] - w[1]);
                (b / a).max(a / b)
            })
            .fold(1.0, f64::max)
    }

    /// Index of the node equal to `r` (to 1e-12 relative), if any.
    pub fn node_index(&self, r: f64) -> Option<usize> {
        self.nodes.iter().position(|&x| (x - r).abs() <= 1e-12 * r.abs().max(1.0))
    }

    /// N-dimensional measures of the dual cells [r_{i-1/2}, r_{i+1/2}]
    /// (clipped to [0, R_max]).
    pub fn volume_weights(&self, n: u32) -> Vec<f64> {
        let vb = unit_ball_volume(n);
        let nf = n as i32;
        let m = self.cells();
        (0..=m)
            .map(|i| {
                let lo = if i == 0 { 0.0 } else { 0.5 * (self.nodes[i - 1] + self.nodes[i]) };
                let hi = if i == m { self.nodes[m] } else { 0.5 * (self.nodes[i] + self.nodes[i + 1]) };
                vb * (hi.powi(nf) - lo.powi(nf))
            })
            .collect()
    }

    /// Stable FNV-1a hash of the node positions (the tail exponent is not part
    /// of the geometry).
    pub fn geometry_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for x in &self.nodes {
            for b in x.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

/// ln g for the geometric grid whose node k sits exactly at `anchor`, choosing
/// k so that g is as close as possible to exp(target).
fn anchored_log_ratio(r_max: f64, m: usize, anchor: f64, target: f64) -> Option<f64> {
    let goal = (r_max / anchor).ln();
    let mut best: Option<f64> = None;
    for k in 1..m {
        // (g^M - 1) / (g^k - 1) increases from M/k (g → 1) without bound.
        if (m as f64 / k as f64).ln() >= goal {
            continue;
        }
        let f = |l: f64| ((m as f64 * l).exp_m1() / (k as f64 * l).exp_m1()).ln() - goal;
        let (mut lo, mut hi) = (1e-12, 1.0);
        while f(hi) < 0.0 {
            hi *= 2.0;
            if hi > 64.0 {
                break;
            }
        }
        if f(hi) < 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let l = 0.5 * (lo + hi);
        if best.is_none_or(|b| (l - target).abs() < (b - target).abs()) {
            best = Some(l);
        }
    }
    best
}

/// Nodal values of a radial function with the power-law exterior
/// U(r) = A r^{-β_tail} for r > R_max, A = U_M R_max^{β_tail}.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::usage(format!("function has {} values but grid has {} nodes", values.len(), grid.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite value at node {i}")));
        }
        Ok(RadialFunction { grid, values })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        RadialFunction { grid, values: vec![0.0; n] }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn tail_amplitude(&self) -> f64 {
        self.values[self.grid.cells()] * self.grid.r_max().powf(self.grid.tail_exponent())
    }

    /// Values on interior and ghost nodes.
    pub fn extended_values(&self) -> Vec<f64> {
        let um = self.values[self.grid.cells()];
        self.values.iter().copied().chain(self.grid.tail_factors().into_iter().map(|t| um * t)).collect()
    }

    /// Piecewise-linear interpolant inside, tail model outside.
    pub fn eval(&self, r: f64) -> f64 {
        let nodes = self.grid.nodes();
        if r >= self.grid.r_max() {
            return self.tail_amplitude() * r.powf(-self.grid.tail_exponent());
        }
        let r = r.max(0.0);
        let j = nodes.partition_point(|&x| x <= r).clamp(1, nodes.len() - 1);
        let (a, b) = (nodes[j - 1], nodes[j]);
        let t = (r - a) / (b - a);
        self.values[j - 1] * (1.0 - t) + self.values[j] * t
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        RadialFunction { grid: self.grid.clone(), values: self.values.iter().map(|v| lambda * v).collect() }
    }

    pub fn sup_distance(&self, other: &RadialFunction) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(
            f,
            "# grid_hash={:016x} tail_exponent={:.15e} tail_amplitude={:.15e}",
            self.grid.geometry_hash(),
            self.grid.tail_exponent(),
            self.tail_amplitude()
        )?;
        writeln!(f, "r,value")?;
        for (r, v) in self.grid.nodes().iter().zip(&self.values) {
            writeln!(f, "{r:.17e},{v:.17e}")?;
        }
        f.flush()?;
        Ok(())
    }

    /// Reads a file written by [`write_csv`](Self::write_csv); the node
    /// column must match `grid`.
    pub fn read_csv(path: &Path, grid: Arc<RadialGrid>) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let parse_err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
        let mut values = Vec::with_capacity(grid.len());
        for (idx, line) in file.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with("r,") {
                continue;
            }
            let mut cols = t.split(',');
            let r: f64 =
                cols.next().and_then(|c| c.trim().parse().ok()).ok_or_else(|| parse_err(idx + 1, "bad r column".into()))?;
            let v: f64 =
                cols.next().and_then(|c| c.trim().parse().ok()).ok_or_else(|| parse_err(idx + 1, "bad value column".into()))?;
            let k = values.len();
            match grid.nodes().get(k) {
                Some(&x) if (x - r).abs() <= 1e-12 * x.abs().max(1.0) => values.push(v),
                _ => return Err(parse_err(idx + 1, format!("node {k} at r={r} does not match the grid"))),
            }
        }
        Self::new(grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_grid_basic_shape() {
        let g = RadialGrid::graded(64.0, 256, Grading::Stretch(50.0), None, 1.0).unwrap();
        assert_eq!(g.cells(), 256);
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.r_max(), 64.0);
        let h = |i: usize| g.nodes()[i + 1] - g.nodes()[i];
        assert!((h(255) / h(0) - 50.0).abs() < 1e-6);
        assert!((g.r_far() - FAR_FACTOR * 64.0).abs() < 1e-9);
    }

    #[test]
    fn anchored_grid_hits_anchor_smoothly() {
        let g = RadialGrid::graded(64.0, 128, Grading::Stretch(50.0), Some(1.0), 1.0).unwrap();
        assert!(g.node_index(1.0).is_some());
        assert!(g.grading_ratio() < 1.05);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(RadialGrid::graded(64.0, 8, Grading::default(), None, 1.0).is_err());
        assert!(RadialGrid::graded(4.0, 64, Grading::default(), None, 1.0).is_err());
        assert!(RadialGrid::graded(64.0, 64, Grading::default(), None, 0.0).is_err());
        let mut nodes: Vec<f64> = (0..=20).map(|i| i as f64).collect();
        nodes[5] = nodes[4];
        assert!(RadialGrid::from_nodes(nodes, 1.0).is_err());
    }

    #[test]
    fn volume_weights_sum_to_ball() {
        let g = RadialGrid::graded(16.0, 40, Grading::Ratio(1.05), None, 1.0).unwrap();
        let total: f64 = g.volume_weights(3).iter().sum();
        let ball = unit_ball_volume(3) * 16f64.powi(3);
        assert!((total - ball).abs() < 1e-10 * ball);
    }

    #[test]
    fn tail_continuity_and_csv_roundtrip() {
        let g = Arc::new(RadialGrid::graded(16.0, 32, Grading::default(), None, 1.5).unwrap());
        let u = RadialFunction::from_fn(g.clone(), |r| (1.0 + r).powf(-1.5)).unwrap();
        let um = *u.values().last().unwrap();
        assert!((u.eval(16.0) - um).abs() < 1e-15);
        assert!((u.eval(32.0) - um * 2f64.powf(-1.5)).abs() < 1e-15);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        u.write_csv(&path).unwrap();
        let back = RadialFunction::read_csv(&path, g).unwrap();
        assert_eq!(back, u);
    }
}
