//! Closed loops `u: R/Z -> R^n` stored as truncated trigonometric series.
//!
//! A [`FourierLoop`] with `max_mode = K` holds
//!
//! ```text
//! u(t) = c_0 + sum_{k=1..K} a_k cos(2 pi k t) + b_k sin(2 pi k t)
//! ```
//!
//! in one flat coefficient vector laid out as `[c_0 | a_1 | b_1 | a_2 | b_2 | ...]`,
//! each block of length `dim`. The flat layout doubles as the coefficient space in
//! which the functionals' gradients live, with the Euclidean pairing.
//!
//! Integrals of nonlinear integrands are taken with the trapezoidal rule on a
//! [`UniformGrid`]; quadratic quantities (kinetic integral, L2 norm) use Parseval.

use std::f64::consts::{PI, TAU};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of Fourier modes for solver loops.
pub const DEFAULT_MODES: usize = 32;

/// Default quadrature size for `K` modes: `max(256, 8K)`.
pub fn default_quadrature_nodes(max_mode: usize) -> usize {
    256.max(8 * max_mode)
}

/// Relative tolerance used by the inequality verdicts.
pub const INEQUALITY_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LoopJson", into = "LoopJson")]
pub struct FourierLoop {
    dim: usize,
    max_mode: usize,
    coeffs: Vec<f64>,
}

/// Wire format: `{dim, max_mode, mean, cos, sin}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LoopJson {
    dim: usize,
    max_mode: usize,
    mean: Vec<f64>,
    cos: Vec<Vec<f64>>,
    sin: Vec<Vec<f64>>,
}

impl From<FourierLoop> for LoopJson {
    fn from(l: FourierLoop) -> Self {
        LoopJson {
            dim: l.dim,
            max_mode: l.max_mode,
            mean: l.mean().to_vec(),
            cos: (1..=l.max_mode).map(|k| l.cos(k).to_vec()).collect(),
            sin: (1..=l.max_mode).map(|k| l.sin(k).to_vec()).collect(),
        }
    }
}

impl TryFrom<LoopJson> for FourierLoop {
    type Error = Error;

    fn try_from(j: LoopJson) -> Result<Self> {
        if j.dim == 0 {
            return Err(Error::InvalidInput("loop dim must be positive".into()));
        }
        if j.mean.len() != j.dim {
            return Err(Error::InvalidInput(format!(
                "loop mean has {} entries, expected {}",
                j.mean.len(),
                j.dim
            )));
        }
        if j.cos.len() != j.max_mode || j.sin.len() != j.max_mode {
            return Err(Error::InvalidInput(format!(
                "loop has {} cos / {} sin rows, expected {}",
                j.cos.len(),
                j.sin.len(),
                j.max_mode
            )));
        }
        let mut l = FourierLoop::zero(j.dim, j.max_mode);
        l.mean_mut().copy_from_slice(&j.mean);
        for k in 1..=j.max_mode {
            let (a, b) = (&j.cos[k - 1], &j.sin[k - 1]);
            if a.len() != j.dim || b.len() != j.dim {
                return Err(Error::InvalidInput(format!("mode {k} has wrong dimension")));
            }
            l.cos_mut(k).copy_from_slice(a);
            l.sin_mut(k).copy_from_slice(b);
        }
        if l.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "loop coefficients must be finite".into(),
            ));
        }
        Ok(l)
    }
}

impl FourierLoop {
    pub fn zero(dim: usize, max_mode: usize) -> Self {
        assert!(dim > 0, "loop dimension must be positive");
        FourierLoop {
            dim,
            max_mode,
            coeffs: vec![0.0; dim * (2 * max_mode + 1)],
        }
    }

    pub fn constant(point: &[f64], max_mode: usize) -> Self {
        let mut l = Self::zero(point.len(), max_mode);
        l.mean_mut().copy_from_slice(point);
        l
    }

    /// Planar circle of radius `r` traversed once, `(r cos 2πt, r sin 2πt)`,
    /// embedded in the first two coordinates of `R^dim`.
    pub fn circle(dim: usize, max_mode: usize, r: f64) -> Self {
        assert!(dim >= 2 && max_mode >= 1);
        let mut l = Self::zero(dim, max_mode);
        l.cos_mut(1)[0] = r;
        l.sin_mut(1)[1] = r;
        l
    }

    /// Builds a loop from a raw coefficient vector in the flat layout.
    pub fn from_coeffs(dim: usize, max_mode: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), dim * (2 * max_mode + 1));
        FourierLoop {
            dim,
            max_mode,
            coeffs,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn mean(&self) -> &[f64] {
        &self.coeffs[..self.dim]
    }

    pub fn mean_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs[..self.dim]
    }

    fn block(&self, k: usize, sin: bool) -> std::ops::Range<usize> {
        assert!(k >= 1 && k <= self.max_mode, "mode {k} out of range");
        let start = self.dim * (2 * k - 1 + usize::from(sin));
        start..start + self.dim
    }

    /// Cosine coefficient `a_k`, `1 <= k <= K`.
    pub fn cos(&self, k: usize) -> &[f64] {
        &self.coeffs[self.block(k, false)]
    }

    pub fn sin(&self, k: usize) -> &[f64] {
        &self.coeffs[self.block(k, true)]
    }

    pub fn cos_mut(&mut self, k: usize) -> &mut [f64] {
        let r = self.block(k, false);
        &mut self.coeffs[r]
    }

    pub fn sin_mut(&mut self, k: usize) -> &mut [f64] {
        let r = self.block(k, true);
        &mut self.coeffs[r]
    }

    /// Mode number owning flat coefficient index `i` (0 for the mean).
    pub fn mode_of_index(&self, i: usize) -> usize {
        (i / self.dim).div_ceil(2)
    }

    pub fn evaluate(&self, t: f64) -> Vec<f64> {
        self.evaluate_derivative(t, 0)
    }

    pub fn velocity(&self, t: f64) -> Vec<f64> {
        self.evaluate_derivative(t, 1)
    }

    pub fn acceleration(&self, t: f64) -> Vec<f64> {
        self.evaluate_derivative(t, 2)
    }

    /// `order`-th time derivative at `t` (orders 0, 1, 2).
    fn evaluate_derivative(&self, t: f64, order: u32) -> Vec<f64> {
        let n = self.dim;
        let mut out = if order == 0 {
            self.mean().to_vec()
        } else {
            vec![0.0; n]
        };
        // cos/sin of 2πkt by angle addition from the first harmonic
        let (s1, c1) = (TAU * t).sin_cos();
        let (mut s, mut c) = (s1, c1);
        for (k, block) in self.coeffs[n..].chunks_exact(2 * n).enumerate() {
            let w = TAU * (k + 1) as f64;
            // d/dt (a cos + b sin) = w(-a sin + b cos); second derivative -w^2(a cos + b sin)
            let (ca, cb) = match order {
                0 => (c, s),
                1 => (-w * s, w * c),
                _ => (-w * w * c, -w * w * s),
            };
            let (a, b) = block.split_at(n);
            for (o, (ai, bi)) in out.iter_mut().zip(a.iter().zip(b)) {
                *o += ca * ai + cb * bi;
            }
            (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
        }
        out
    }

    /// `∫₀¹ |u̇|² dt = 2π² Σ k² (|a_k|² + |b_k|²)`.
    pub fn kinetic_integral(&self) -> f64 {
        let mut acc = 0.0;
        for k in 1..=self.max_mode {
            let e: f64 = self.cos(k).iter().chain(self.sin(k)).map(|x| x * x).sum();
            acc += (k * k) as f64 * e;
        }
        2.0 * PI * PI * acc
    }

    /// `∫₀¹ |u|² dt` by Parseval.
    pub fn l2_integral(&self) -> f64 {
        let mean: f64 = self.mean().iter().map(|x| x * x).sum();
        let osc: f64 = self.coeffs[self.dim..].iter().map(|x| x * x).sum();
        mean + 0.5 * osc
    }

    /// `‖u‖ = (∫|u̇|²)^{1/2} + |u(0)|`.
    pub fn h1_norm(&self) -> f64 {
        self.kinetic_integral().sqrt() + norm(&self.evaluate(0.0))
    }

    /// Zeroes the mean and every even mode. The image satisfies `u(t+½) = −u(t)`.
    pub fn project_antisymmetric(&self) -> FourierLoop {
        let mut out = self.clone();
        out.mean_mut().fill(0.0);
        for k in (2..=self.max_mode).step_by(2) {
            out.cos_mut(k).fill(0.0);
            out.sin_mut(k).fill(0.0);
        }
        out
    }

    pub fn project_zero_mean(&self) -> FourierLoop {
        let mut out = self.clone();
        out.mean_mut().fill(0.0);
        out
    }

    pub fn scaled(&self, lambda: f64) -> FourierLoop {
        FourierLoop {
            dim: self.dim,
            max_mode: self.max_mode,
            coeffs: self.coeffs.iter().map(|c| lambda * c).collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &FourierLoop) -> FourierLoop {
        self.check_shape(other);
        FourierLoop {
            dim: self.dim,
            max_mode: self.max_mode,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    /// Euclidean pairing of coefficient vectors.
    pub fn dot(&self, other: &FourierLoop) -> f64 {
        self.check_shape(other);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Applies a linear map (row-major `dim x dim`) to every coefficient block.
    pub fn transformed(&self, matrix: &[f64]) -> FourierLoop {
        let n = self.dim;
        assert_eq!(matrix.len(), n * n);
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for (dst, src) in coeffs.chunks_mut(n).zip(self.coeffs.chunks(n)) {
            for i in 0..n {
                dst[i] = (0..n).map(|j| matrix[i * n + j] * src[j]).sum();
            }
        }
        FourierLoop::from_coeffs(n, self.max_mode, coeffs)
    }

    /// The loop `t -> u(t + tau)`.
    pub fn time_shifted(&self, tau: f64) -> FourierLoop {
        let mut out = self.clone();
        for k in 1..=self.max_mode {
            let (s, c) = (TAU * k as f64 * tau).sin_cos();
            let a = self.cos(k).to_vec();
            let b = self.sin(k).to_vec();
            // a cos(w(t+τ)) + b sin(w(t+τ)) = (a c + b s) cos wt + (b c − a s) sin wt
            for i in 0..self.dim {
                out.cos_mut(k)[i] = a[i] * c + b[i] * s;
                out.sin_mut(k)[i] = b[i] * c - a[i] * s;
            }
        }
        out
    }

    /// Truncates or zero-pads to `max_mode` modes.
    pub fn with_max_mode(&self, max_mode: usize) -> FourierLoop {
        let mut out = FourierLoop::zero(self.dim, max_mode);
        let keep = self.dim * (2 * self.max_mode.min(max_mode) + 1);
        out.coeffs[..keep].copy_from_slice(&self.coeffs[..keep]);
        out
    }

    fn check_shape(&self, other: &FourierLoop) {
        assert!(
            self.dim == other.dim && self.max_mode == other.max_mode,
            "loop shape mismatch"
        );
    }

    /// Number of nodes for the refined scans behind `min_radius` and `sup_norm`.
    fn scan_nodes(&self) -> usize {
        (8 * (2 * self.max_mode + 1)).max(64)
    }

    /// `min_t |u(t)|`: refined grid scan polished by golden-section search.
    pub fn min_radius(&self) -> f64 {
        extremal_radius(self, false)
    }

    /// `|u|_∞ = max_t |u(t)|`.
    pub fn sup_norm(&self) -> f64 {
        extremal_radius(self, true)
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn extremal_radius(l: &FourierLoop, maximize: bool) -> f64 {
    let m = l.scan_nodes();
    let h = 1.0 / m as f64;
    let sign = if maximize { -1.0 } else { 1.0 };
    let objective = |t: f64| sign * norm(&l.evaluate(t));
    let (mut best_j, mut best) = (0, f64::INFINITY);
    for j in 0..m {
        let v = objective(j as f64 * h);
        if v < best {
            best = v;
            best_j = j;
        }
    }
    let center = best_j as f64 * h;
    let (_, polished) = golden_section_min(objective, center - h, center + h, 1e-14);
    sign * best.min(polished)
}

/// Minimizes a unimodal `f` on `[lo, hi]`; returns `(argmin, min)`.
pub(crate) fn golden_section_min(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Uniform nodes `t_j = j/M` on the unit circle with cached trig tables.
#[derive(Debug, Clone)]
pub struct UniformGrid {
    m: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl UniformGrid {
    pub fn new(m: usize) -> Self {
        assert!(m > 0, "grid needs at least one node");
        let (sin, cos) = (0..m)
            .map(|j| (TAU * j as f64 / m as f64).sin_cos())
            .unzip();
        UniformGrid { m, cos, sin }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 / self.m as f64
    }

    /// Loop values at every node.
    pub fn sample(&self, l: &FourierLoop) -> GridLoop {
        let n = l.dim();
        let mut nodes = Vec::with_capacity(self.m * n);
        for j in 0..self.m {
            let start = nodes.len();
            nodes.extend_from_slice(l.mean());
            let out = &mut nodes[start..];
            let mut idx = 0;
            for block in l.coeffs()[n..].chunks_exact(2 * n) {
                idx += j;
                if idx >= self.m {
                    idx -= self.m;
                }
                let (c, s) = (self.cos[idx], self.sin[idx]);
                let (a, b) = block.split_at(n);
                for (o, (ai, bi)) in out.iter_mut().zip(a.iter().zip(b)) {
                    *o += c * ai + s * bi;
                }
            }
        }
        GridLoop {
            dim: n,
            period: 1.0,
            nodes,
        }
    }

    /// Transpose of [`sample`](Self::sample) weighted by the trapezoidal weight `1/M`:
    /// for node vectors `w_j`, returns the coefficient-space vector of
    /// `v -> (1/M) Σ_j w_j · v(t_j)`.
    pub fn adjoint_sample(&self, values: &[f64], dim: usize, max_mode: usize) -> FourierLoop {
        assert_eq!(values.len(), self.m * dim);
        let mut out = FourierLoop::zero(dim, max_mode);
        let w = 1.0 / self.m as f64;
        let coeffs = out.coeffs_mut();
        for (j, wj) in values.chunks(dim).enumerate() {
            let (mean, rest) = coeffs.split_at_mut(dim);
            for (m, x) in mean.iter_mut().zip(wj) {
                *m += w * x;
            }
            let mut idx = 0;
            for block in rest.chunks_exact_mut(2 * dim) {
                idx += j;
                if idx >= self.m {
                    idx -= self.m;
                }
                let (c, s) = (w * self.cos[idx], w * self.sin[idx]);
                let (a, b) = block.split_at_mut(dim);
                for ((ai, bi), x) in a.iter_mut().zip(b.iter_mut()).zip(wj) {
                    *ai += c * x;
                    *bi += s * x;
                }
            }
        }
        out
    }

    /// Discrete Fourier analysis of node samples; exact inverse of `sample`
    /// whenever `M >= 2K + 1`.
    pub fn analyze(&self, g: &GridLoop, max_mode: usize) -> Result<FourierLoop> {
        if g.len() != self.m {
            return Err(Error::InvalidInput(format!(
                "grid loop has {} nodes, grid has {}",
                g.len(),
                self.m
            )));
        }
        if self.m < 2 * max_mode + 1 {
            return Err(Error::InvalidInput(format!(
                "{} nodes cannot resolve {} modes (need at least {})",
                self.m,
                max_mode,
                2 * max_mode + 1
            )));
        }
        let mut l = self.adjoint_sample(&g.nodes, g.dim, max_mode);
        let dim = l.dim;
        for c in &mut l.coeffs_mut()[dim..] {
            *c *= 2.0;
        }
        Ok(l)
    }

    /// Trapezoidal mean `(1/M) Σ_j f(t_j)` of scalar node values.
    pub fn mean_of(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() / self.m as f64
    }
}

/// Node samples of a loop of period `period` (1 for the unit loop).
#[derive(Debug, Clone, PartialEq)]
pub struct GridLoop {
    dim: usize,
    period: f64,
    nodes: Vec<f64>,
}

impl GridLoop {
    pub fn new(dim: usize, period: f64, nodes: Vec<f64>) -> Result<Self> {
        if dim == 0 || !nodes.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "{} node values do not split into points of dimension {dim}",
                nodes.len()
            )));
        }
        if !(period > 0.0) {
            return Err(Error::InvalidInput("grid period must be positive".into()));
        }
        Ok(GridLoop { dim, period, nodes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.nodes.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.period * j as f64 / self.len() as f64
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.nodes[j * self.dim..(j + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks(self.dim)
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.period = period;
        self
    }

    /// CSV rows `t, u_1, ..., u_n` with a header line.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.dim).map(|i| format!("u_{i}")));
        wtr.write_record(&header).map_err(csv_err)?;
        for j in 0..self.len() {
            let mut row = vec![fmt_num(self.time(j))];
            row.extend(self.point(j).iter().map(|&x| fmt_num(x)));
            wtr.write_record(&row).map_err(csv_err)?;
        }
        wtr.flush().map_err(|e| Error::InvalidInput(e.to_string()))
    }

    /// Reads the format written by [`write_csv`](Self::write_csv); the period is
    /// inferred from the uniform node spacing.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let dim = rdr.headers().map_err(csv_err)?.len().saturating_sub(1);
        let mut times = Vec::new();
        let mut nodes = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            let vals = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidInput(format!("bad CSV number: {e}")))?;
            times.push(vals[0]);
            nodes.extend_from_slice(&vals[1..]);
        }
        let period = match times.len() {
            0 | 1 => 1.0,
            m => (times[m - 1] - times[0]) * m as f64 / (m - 1) as f64,
        };
        GridLoop::new(dim, period, nodes)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        self.write_csv(f)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("CSV error: {e}"))
}

/// Shortest round-trip representation, as `{:?}` on f64 would give.
pub(crate) fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

/// Quantities behind the Wirtinger, Sobolev and Friedrichs–Poincaré inequalities
/// on the unit period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub kinetic: f64,
    pub l2: f64,
    pub sup_norm: f64,
    /// `∫|u̇|² / (4π² ∫|u − ū|²)`.
    pub wirtinger_ratio: f64,
    /// `∫|u̇|² / (12 |u − ū|²_∞)`.
    pub sobolev_ratio: f64,
    /// `∫|u̇|² / (π² ∫|u − u(0)|²)`.
    pub poincare_ratio: f64,
    pub wirtinger_ok: bool,
    pub sobolev_ok: bool,
    pub poincare_ok: bool,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        // 0/0: the constant loop; every inequality holds with equality
        1.0
    }
}

pub fn inequality_report(l: &FourierLoop) -> InequalityReport {
    let kinetic = l.kinetic_integral();
    let centered = l.project_zero_mean();
    let centered_l2 = centered.l2_integral();
    let centered_sup = centered.sup_norm();

    let u0 = l.evaluate(0.0);
    let mut pinned = l.clone();
    for (m, v) in pinned.mean_mut().iter_mut().zip(&u0) {
        *m -= v;
    }
    let pinned_l2 = pinned.l2_integral();

    let wirtinger_ratio = ratio(kinetic, 4.0 * PI * PI * centered_l2);
    let sobolev_ratio = ratio(kinetic, 12.0 * centered_sup * centered_sup);
    let poincare_ratio = ratio(kinetic, PI * PI * pinned_l2);
    let ok = |r: f64| r >= 1.0 - INEQUALITY_RTOL;
    InequalityReport {
        kinetic,
        l2: l.l2_integral(),
        sup_norm: l.sup_norm(),
        wirtinger_ratio,
        sobolev_ratio,
        poincare_ratio,
        wirtinger_ok: ok(wirtinger_ratio),
        sobolev_ok: ok(sobolev_ratio),
        poincare_ok: ok(poincare_ratio),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn evaluate_unit_circle_at_zero() {
        let c = FourierLoop::circle(2, 4, 1.0);
        let p = c.evaluate(0.0);
        assert!(close(p[0], 1.0, 1e-15) && p[1].abs() < 1e-15);
    }

    #[test]
    fn zero_loop_evaluates_to_origin() {
        let z = FourierLoop::zero(3, 5);
        for t in [0.0, 0.3, 0.77] {
            assert_eq!(z.evaluate(t), vec![0.0; 3]);
        }
    }

    #[test]
    fn kinetic_examples() {
        let c = FourierLoop::circle(2, 3, 1.0);
        assert!(close(c.kinetic_integral(), 4.0 * PI * PI, 1e-15));
        let c2 = FourierLoop::circle(2, 3, 2.5);
        assert!(close(c2.kinetic_integral(), 4.0 * PI * PI * 6.25, 1e-15));
        assert_eq!(
            FourierLoop::constant(&[1.0, -2.0], 3).kinetic_integral(),
            0.0
        );
    }

    #[test]
    fn h1_norm_examples() {
        let c = FourierLoop::circle(2, 2, 1.0);
        assert!(close(c.h1_norm(), TAU + 1.0, 1e-14));
        assert!(close(
            FourierLoop::constant(&[3.0, 4.0], 2).h1_norm(),
            5.0,
            1e-15
        ));
        assert_eq!(FourierLoop::zero(2, 2).h1_norm(), 0.0);
    }

    #[test]
    fn antisymmetric_projection_examples() {
        let mut k2 = FourierLoop::zero(2, 3);
        k2.cos_mut(2)[0] = 1.0;
        k2.sin_mut(2)[1] = -0.5;
        assert_eq!(k2.project_antisymmetric(), FourierLoop::zero(2, 3));

        let c = FourierLoop::circle(2, 3, 1.3);
        assert_eq!(c.project_antisymmetric(), c);

        let mixed = c.axpy(1.0, &k2);
        assert_eq!(mixed.project_antisymmetric(), c);
    }

    #[test]
    fn zero_mean_projection_examples() {
        assert_eq!(
            FourierLoop::constant(&[1.0, 2.0], 2).project_zero_mean(),
            FourierLoop::zero(2, 2)
        );
        let c = FourierLoop::circle(2, 2, 1.0);
        assert_eq!(c.project_zero_mean(), c);
        let mut shifted = c.clone();
        shifted.mean_mut().copy_from_slice(&[0.4, -0.1]);
        assert_eq!(shifted.project_zero_mean(), c);
    }

    #[test]
    fn inequality_examples() {
        let c = FourierLoop::circle(2, 4, 1.0);
        let r = inequality_report(&c);
        assert!(close(r.wirtinger_ratio, 1.0, 1e-12));
        assert!(r.wirtinger_ok);
        assert!(close(r.sobolev_ratio, 4.0 * PI * PI / 12.0, 1e-12));
        assert!(r.poincare_ok);

        let mut k2 = FourierLoop::zero(2, 4);
        k2.cos_mut(2)[0] = 1.0;
        k2.sin_mut(2)[1] = 1.0;
        assert!(close(inequality_report(&k2).wirtinger_ratio, 4.0, 1e-12));
    }

    #[test]
    fn constant_loop_inequalities_hold() {
        let r = inequality_report(&FourierLoop::constant(&[1.0, 1.0], 3));
        assert!(r.wirtinger_ok && r.sobolev_ok && r.poincare_ok);
    }

    #[test]
    fn min_radius_examples() {
        assert!(close(
            FourierLoop::circle(2, 3, 0.7).min_radius(),
            0.7,
            1e-12
        ));
        assert!(close(
            FourierLoop::constant(&[3.0, 4.0], 3).min_radius(),
            5.0,
            1e-15
        ));
    }

    #[test]
    fn min_radius_of_shifted_circle_matches_dense_scan() {
        let mut l = FourierLoop::circle(2, 3, 1.0);
        l.mean_mut()[0] = 0.5;
        // dense scan oracle, independent of the refined-grid + golden path
        let oracle = (0..=200_000)
            .map(|j| norm(&l.evaluate(j as f64 / 200_000.0)))
            .fold(f64::INFINITY, f64::min);
        assert!(close(oracle, 0.5, 1e-9));
        assert!(close(l.min_radius(), oracle, 1e-9));
        assert!(l.min_radius() <= oracle + 1e-15);
    }

    #[test]
    fn velocity_and_acceleration_of_circle() {
        let c = FourierLoop::circle(2, 2, 2.0);
        let v = c.velocity(0.0);
        assert!(v[0].abs() < 1e-14 && close(v[1], 2.0 * TAU, 1e-14));
        let a = c.acceleration(0.0);
        assert!(close(a[0], -2.0 * TAU * TAU, 1e-14) && a[1].abs() < 1e-12);
    }

    #[test]
    fn grid_analysis_inverts_sampling() {
        let mut l = FourierLoop::zero(2, 3);
        l.coeffs_mut()
            .iter_mut()
            .enumerate()
            .for_each(|(i, c)| *c = (i as f64 * 0.37).sin());
        let grid = UniformGrid::new(7);
        let back = grid.analyze(&grid.sample(&l), 3).unwrap();
        for (a, b) in back.coeffs().iter().zip(l.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(grid.analyze(&UniformGrid::new(6).sample(&l), 3).is_err());
    }

    #[test]
    fn time_shift_matches_evaluation() {
        let mut l = FourierLoop::circle(2, 3, 1.0);
        l.sin_mut(3)[0] = 0.2;
        let s = l.time_shifted(0.13);
        for t in [0.0, 0.21, 0.8] {
            let (a, b) = (s.evaluate(t), l.evaluate(t + 0.13));
            assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn loop_json_shape() {
        let l = FourierLoop::circle(2, 2, 1.0);
        let v: serde_json::Value = serde_json::to_value(&l).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["max_mode"], 2);
        assert_eq!(v["cos"][0], serde_json::json!([1.0, 0.0]));
        assert_eq!(v["sin"][0], serde_json::json!([0.0, 1.0]));
        let back: FourierLoop = serde_json::from_value(v).unwrap();
        assert_eq!(back, l);
        let bad = serde_json::json!({"dim": 2, "max_mode": 1, "mean": [0.0], "cos": [[1.0, 0.0]], "sin": [[0.0, 1.0]]});
        assert!(serde_json::from_value::<FourierLoop>(bad).is_err());
    }

    #[test]
    fn grid_csv_round_trip() {
        let l = FourierLoop::circle(2, 2, 1.0);
        let g = UniformGrid::new(8).sample(&l).with_period(2.0);
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,u_1,u_2\n"));
        let back = GridLoop::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 8);
        assert!((back.period() - 2.0).abs() < 1e-14);
        assert_eq!(back.point(3), g.point(3));
    }
}
