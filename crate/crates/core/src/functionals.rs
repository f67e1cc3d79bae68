//! The two fixed-energy functionals on unit-period loops and the rescaling of
//! their critical points into physical orbits.
//!
//! * Free functional on loops avoiding the origin:
//!   `f(u) = ½ ∫|u̇|² · ∫(h − V(u))`.
//! * Constrained functional on `F = {u : ∫(V(u) + ½ V′(u)·u) = h}`:
//!   `f(u) = ¼ ∫|u̇|² · ∫V′(u)·u`.
//!
//! A critical loop `ũ` with positive value yields the physical orbit
//! `q(t) = ũ(t/T)` whose period `T` follows from the ratio of the two factors.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loop_space::{fmt_num, FourierLoop, GridLoop, UniformGrid};
use crate::potentials::{PotentialSpec, Term};
use crate::verifier::VerificationReport;

pub const DEFAULT_MIN_RADIUS_FLOOR: f64 = 1e-6;

/// Loops with kinetic integral at or below this are treated as constant.
pub const DEGENERATE_KINETIC: f64 = 1e-14;

/// Which variational principle a loop is a critical point of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Free,
    Constrained,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Route::Free => "free",
            Route::Constrained => "constrained",
        })
    }
}

/// A fixed-energy problem instance.
#[derive(Debug, Clone)]
pub struct EnergyProblem {
    spec: PotentialSpec,
    h: f64,
    grid: UniformGrid,
    min_radius_floor: f64,
}

impl EnergyProblem {
    pub fn new(spec: PotentialSpec, h: f64, quadrature_nodes: usize) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::InvalidInput("energy h must be finite".into()));
        }
        if quadrature_nodes < 3 {
            return Err(Error::InvalidInput(
                "quadrature needs at least 3 nodes".into(),
            ));
        }
        Ok(EnergyProblem {
            spec,
            h,
            grid: UniformGrid::new(quadrature_nodes),
            min_radius_floor: DEFAULT_MIN_RADIUS_FLOOR,
        })
    }

    pub fn with_min_radius_floor(mut self, floor: f64) -> Self {
        assert!(floor > 0.0, "radius floor must be positive");
        self.min_radius_floor = floor;
        self
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn min_radius_floor(&self) -> f64 {
        self.min_radius_floor
    }

    fn check_loop(&self, l: &FourierLoop) -> Result<()> {
        if l.dim() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "loop dimension {} does not match problem dimension {}",
                l.dim(),
                self.dim()
            )));
        }
        if self.grid.len() < 2 * l.max_mode() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} quadrature nodes cannot resolve {} modes",
                self.grid.len(),
                l.max_mode()
            )));
        }
        Ok(())
    }

    /// Samples the loop and its node radii, enforcing the radius floor.
    fn nodes(&self, l: &FourierLoop) -> Result<Nodes> {
        self.check_loop(l)?;
        let pts = self.grid.sample(l);
        let radii: Vec<f64> = pts.points().map(crate::loop_space::norm).collect();
        let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
        if !(r_min > self.min_radius_floor) {
            return Err(Error::Singularity {
                radius: r_min,
                floor: self.min_radius_floor,
            });
        }
        Ok(Nodes { pts, radii })
    }
}

struct Nodes {
    pts: GridLoop,
    radii: Vec<f64>,
}

impl Nodes {
    /// Node vectors `φ(r_j) u_j`, flattened.
    fn radial_field(&self, phi: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.radii.len() * self.pts.dim());
        for (p, &r) in self.pts.points().zip(&self.radii) {
            let c = phi(r);
            out.extend(p.iter().map(|x| c * x));
        }
        out
    }
}

/// Coefficient gradient of `∫|u̇|²`: `4π²k²` times each mode-`k` coefficient.
fn kinetic_gradient(l: &FourierLoop) -> FourierLoop {
    let mut g = l.clone();
    g.mean_mut().fill(0.0);
    for k in 1..=l.max_mode() {
        let w = 4.0 * PI * PI * (k * k) as f64;
        g.cos_mut(k).iter_mut().for_each(|c| *c *= w);
        g.sin_mut(k).iter_mut().for_each(|c| *c *= w);
    }
    g
}

/// `∫₀¹ (h − V(u)) dt` by quadrature.
pub fn energy_gap_integral(problem: &EnergyProblem, l: &FourierLoop) -> Result<f64> {
    let nodes = problem.nodes(l)?;
    Ok(gap_from_nodes(problem, &nodes))
}

fn gap_from_nodes(problem: &EnergyProblem, nodes: &Nodes) -> f64 {
    let v: Vec<f64> = nodes
        .radii
        .iter()
        .map(|&r| problem.h - problem.spec.value_at_radius(r))
        .collect();
    problem.grid.mean_of(&v)
}

/// `∫₀¹ V′(u)·u dt` by quadrature.
pub fn euler_integral(problem: &EnergyProblem, l: &FourierLoop) -> Result<f64> {
    let nodes = problem.nodes(l)?;
    Ok(euler_from_nodes(problem, &nodes))
}

fn euler_from_nodes(problem: &EnergyProblem, nodes: &Nodes) -> f64 {
    let v: Vec<f64> = nodes
        .radii
        .iter()
        .map(|&r| problem.spec.gradient_factor(r) * r * r)
        .collect();
    problem.grid.mean_of(&v)
}

/// `f(u) = ½ ∫|u̇|² ∫(h − V(u))`.
pub fn f_free(problem: &EnergyProblem, l: &FourierLoop) -> Result<f64> {
    Ok(0.5 * l.kinetic_integral() * energy_gap_integral(problem, l)?)
}

/// Coefficient-space gradient of [`f_free`]:
/// `f′(u)v = ∫u̇·v̇ ∫(h−V) − ½ ∫|u̇|² ∫V′(u)·v`.
pub fn grad_f_free(problem: &EnergyProblem, l: &FourierLoop) -> Result<FourierLoop> {
    let nodes = problem.nodes(l)?;
    let gap = gap_from_nodes(problem, &nodes);
    let kin = l.kinetic_integral();
    let field = nodes.radial_field(|r| problem.spec.gradient_factor(r));
    let pot = problem.grid.adjoint_sample(&field, l.dim(), l.max_mode());
    Ok(kinetic_gradient(l).scaled(0.5 * gap).axpy(-0.5 * kin, &pot))
}

/// `f_free` and its gradient from one sampling pass.
pub fn f_free_with_grad(problem: &EnergyProblem, l: &FourierLoop) -> Result<(f64, FourierLoop)> {
    let nodes = problem.nodes(l)?;
    let gap = gap_from_nodes(problem, &nodes);
    let kin = l.kinetic_integral();
    let field = nodes.radial_field(|r| problem.spec.gradient_factor(r));
    let pot = problem.grid.adjoint_sample(&field, l.dim(), l.max_mode());
    let grad = kinetic_gradient(l).scaled(0.5 * gap).axpy(-0.5 * kin, &pot);
    Ok((0.5 * kin * gap, grad))
}

/// `g(u) = ∫₀¹ (V(u) + ½ V′(u)·u) dt`.
pub fn constraint_g(problem: &EnergyProblem, l: &FourierLoop) -> Result<f64> {
    let nodes = problem.nodes(l)?;
    let v: Vec<f64> = nodes
        .radii
        .iter()
        .map(|&r| problem.spec.value_at_radius(r) + 0.5 * problem.spec.gradient_factor(r) * r * r)
        .collect();
    Ok(problem.grid.mean_of(&v))
}

/// Coefficient-space gradient of [`constraint_g`].
pub fn grad_constraint_g(problem: &EnergyProblem, l: &FourierLoop) -> Result<FourierLoop> {
    let nodes = problem.nodes(l)?;
    // ∇(V + ½ V′·x) = ∇V + ½ ∇(V′·x)
    let field = nodes.radial_field(|r| {
        problem.spec.gradient_factor(r) + 0.5 * problem.spec.euler_gradient_factor(r)
    });
    Ok(problem.grid.adjoint_sample(&field, l.dim(), l.max_mode()))
}

/// `f(u) = ¼ ∫|u̇|² ∫V′(u)·u`.
pub fn f_constrained(problem: &EnergyProblem, l: &FourierLoop) -> Result<f64> {
    Ok(0.25 * l.kinetic_integral() * euler_integral(problem, l)?)
}

/// [`f_constrained`] and its (unconstrained) coefficient gradient.
pub fn f_constrained_with_grad(
    problem: &EnergyProblem,
    l: &FourierLoop,
) -> Result<(f64, FourierLoop)> {
    let nodes = problem.nodes(l)?;
    let euler = euler_from_nodes(problem, &nodes);
    let kin = l.kinetic_integral();
    let field = nodes.radial_field(|r| problem.spec.euler_gradient_factor(r));
    let pot = problem.grid.adjoint_sample(&field, l.dim(), l.max_mode());
    let grad = kinetic_gradient(l)
        .scaled(0.25 * euler)
        .axpy(0.25 * kin, &pot);
    Ok((0.25 * kin * euler, grad))
}

/// Accurate increments between two nearby loops: the kinetic integral and
/// the node means `S_i = ∫|u|^(−α_i)` of every potential term.
struct Increments {
    kin: f64,
    d_kin: f64,
    s: Vec<f64>,
    d_s: Vec<f64>,
}

fn increments(problem: &EnergyProblem, old: &FourierLoop, new: &FourierLoop) -> Result<Increments> {
    let a = problem.nodes(old)?;
    problem.nodes(new)?;
    let step = new.axpy(-1.0, old);
    let du = problem.grid.sample(&step);

    // ∫|u̇|² is quadratic: Δ = 2π² Σ k² (2c·dc + dc²)
    let n = old.dim();
    let mut d_kin = 0.0;
    for (i, (c, dc)) in old.coeffs().iter().zip(step.coeffs()).enumerate().skip(n) {
        let k = old.mode_of_index(i) as f64;
        d_kin += k * k * dc * (2.0 * c + dc);
    }
    d_kin *= 2.0 * PI * PI;

    // per node, Δr = (2u·du + |du|²)/(r_new + r_old) and
    // Δ(r^(−α)) = r^(−α) expm1(−α ln(1 + Δr/r))
    let dr: Vec<f64> = a
        .pts
        .points()
        .zip(du.points())
        .zip(&a.radii)
        .map(|((u, d), &r)| {
            let num: f64 = u.iter().zip(d).map(|(x, y)| y * (2.0 * x + y)).sum();
            let r_new = (r * r + num).max(0.0).sqrt();
            num / (r_new + r)
        })
        .collect();
    let m = problem.grid.len() as f64;
    let (mut s, mut d_s) = (Vec::new(), Vec::new());
    for t in problem.spec.terms() {
        let (mut p0, mut p1) = (0.0, 0.0);
        for (&r, &d) in a.radii.iter().zip(&dr) {
            let base = r.powf(-t.alpha);
            p0 += base;
            p1 += base * (-t.alpha * (d / r).ln_1p()).exp_m1();
        }
        s.push(p0 / m);
        d_s.push(p1 / m);
    }
    Ok(Increments {
        kin: old.kinetic_integral(),
        d_kin,
        s,
        d_s,
    })
}

/// `f(new) − f(old)` for the given route, computed from the coefficient and
/// node differences so that it stays accurate when it is far below the
/// rounding level of `f` itself.
pub fn f_difference(
    problem: &EnergyProblem,
    route: Route,
    old: &FourierLoop,
    new: &FourierLoop,
) -> Result<f64> {
    let inc = increments(problem, old, new)?;
    let terms = problem.spec.terms();
    // ∫(h − V) = h + Σ a S and ∫V′·u = Σ aα S
    let weight = |t: &Term| match route {
        Route::Free => t.a,
        Route::Constrained => t.a * t.alpha,
    };
    let base: f64 = terms.iter().zip(&inc.s).map(|(t, s)| weight(t) * s).sum();
    let d: f64 = terms
        .iter()
        .zip(&inc.d_s)
        .map(|(t, ds)| weight(t) * ds)
        .sum();
    let (k, dk) = (inc.kin, inc.d_kin);
    Ok(match route {
        Route::Free => 0.5 * (dk * (problem.h + base) + k * d + dk * d),
        Route::Constrained => 0.25 * (dk * base + k * d + dk * d),
    })
}

/// `f_c(P(new)) − f_c(P(old))` where `P` is the scaling projection onto `F`.
///
/// Differencing the projected loops directly would inherit the rounding of
/// the two projection scales; instead the change `δ` of the log-scale is
/// solved from the relative increments `ρ_i = ΔS_i/S_i`:
/// `Σ g_i(old) expm1(ln(1+ρ_i) − α_i δ) = 0`.
pub fn projected_difference(
    problem: &EnergyProblem,
    old: &FourierLoop,
    new: &FourierLoop,
) -> Result<f64> {
    let inc = increments(problem, old, new)?;
    let terms = problem.spec.terms();
    let rho: Vec<f64> = inc.s.iter().zip(&inc.d_s).map(|(s, d)| d / s).collect();
    let lr: Vec<f64> = rho.iter().map(|r| r.ln_1p()).collect();
    // g_i(old) up to a common factor
    let w: Vec<f64> = terms
        .iter()
        .zip(&inc.s)
        .map(|(t, s)| t.a * (0.5 * t.alpha - 1.0) * s)
        .collect();
    let phi = |delta: f64| -> (f64, f64) {
        let mut v = 0.0;
        let mut dv = 0.0;
        for ((t, wi), l) in terms.iter().zip(&w).zip(&lr) {
            v += wi * (l - t.alpha * delta).exp_m1();
            dv -= wi * t.alpha * (l - t.alpha * delta).exp();
        }
        (v, dv)
    };
    let den: f64 = terms.iter().zip(&w).map(|(t, wi)| wi * t.alpha).sum();
    let mut delta = w.iter().zip(&lr).map(|(wi, l)| wi * l).sum::<f64>() / den;
    for _ in 0..50 {
        let (v, dv) = phi(delta);
        if !(dv != 0.0 && v.is_finite()) {
            return Err(Error::Projection(format!(
                "log-scale update diverged at δ = {delta:e}"
            )));
        }
        let step = v / dv;
        delta -= step;
        if step.abs() <= 1e-17 * (1.0 + delta.abs()) {
            break;
        }
    }
    // ln J(new) − ln J(old) with J = ¼ K E at the projected loops
    let e: Vec<f64> = terms
        .iter()
        .zip(&inc.s)
        .map(|(t, s)| t.a * t.alpha * s)
        .collect();
    let e_sum: f64 = e.iter().sum();
    let e_rel: f64 = terms
        .iter()
        .zip(&e)
        .zip(&lr)
        .map(|((t, ei), l)| ei * (l - t.alpha * delta).exp_m1())
        .sum::<f64>()
        / e_sum;
    let log_ratio = (inc.d_kin / inc.kin).ln_1p() + 2.0 * delta + e_rel.ln_1p();
    let j_old = 0.25 * inc.kin * e_sum;
    Ok(j_old * log_ratio.exp_m1())
}

/// Scales `l` onto `F`. Each homogeneous term contributes
/// `g_i(λu) = λ^(−α_i) g_i(u)`, so the scale solves a scalar equation.
pub fn project_to_f(problem: &EnergyProblem, l: &FourierLoop) -> Result<FourierLoop> {
    let lambda = projection_scale(problem, l)?;
    Ok(l.scaled(lambda))
}

/// The scale `λ` with `g(λu) = h`.
pub fn projection_scale(problem: &EnergyProblem, l: &FourierLoop) -> Result<f64> {
    let nodes = problem.nodes(l)?;
    let h = problem.h;
    // g_i(u) = a_i (α_i/2 − 1) ∫ |u|^(−α_i)
    let parts: Vec<(f64, f64)> = problem
        .spec
        .terms()
        .iter()
        .map(|t| {
            let v: Vec<f64> = nodes.radii.iter().map(|&r| r.powf(-t.alpha)).collect();
            (
                t.alpha,
                t.a * (0.5 * t.alpha - 1.0) * problem.grid.mean_of(&v),
            )
        })
        .collect();
    let g0: f64 = parts.iter().map(|p| p.1).sum();
    if !(h > 0.0) || !(g0 > 0.0) {
        return Err(Error::Projection(format!(
            "need g(u) > 0 and h > 0, got g(u) = {g0:e}, h = {h}"
        )));
    }
    let (lo, hi) = (1e-6f64, 1e6f64);
    let lambda = if let [(alpha, g)] = parts.as_slice() {
        (g / h).powf(1.0 / alpha)
    } else {
        let phi = |mu: f64| parts.iter().map(|(a, g)| g * (-a * mu).exp()).sum::<f64>() - h;
        let (mut a, mut b) = (lo.ln(), hi.ln());
        let (fa, fb) = (phi(a), phi(b));
        if fa.signum() == fb.signum() {
            return Err(Error::Projection(format!(
                "g(λu) − h keeps sign {} on λ ∈ [1e-6, 1e6]",
                fa.signum()
            )));
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if phi(m).signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        (0.5 * (a + b)).exp()
    };
    if !(lo..=hi).contains(&lambda) {
        return Err(Error::Projection(format!(
            "required scale {lambda:e} outside [1e-6, 1e6]"
        )));
    }
    Ok(lambda)
}

/// Period of the physical orbit generated by a critical loop.
///
/// Free: `1/T² = ∫(h−V) / (½∫|u̇|²)`. Constrained: `1/T² = ∫V′(u)·u / ∫|u̇|²`.
pub fn period_from_loop(problem: &EnergyProblem, l: &FourierLoop, route: Route) -> Result<f64> {
    let kin = l.kinetic_integral();
    if kin <= DEGENERATE_KINETIC {
        return Err(Error::DegenerateLoop(kin));
    }
    let rate = match route {
        Route::Free => energy_gap_integral(problem, l)? / (0.5 * kin),
        Route::Constrained => euler_integral(problem, l)? / kin,
    };
    if !(rate > 0.0) {
        return Err(Error::NegativeRate(rate));
    }
    Ok(1.0 / rate.sqrt())
}

/// A unit-period critical loop together with its physical orbit.
#[derive(Debug, Clone)]
pub struct OrbitSolution {
    pub route: Route,
    /// The critical loop `ũ` on `[0, 1]`.
    pub loop_: FourierLoop,
    pub f_value: f64,
    pub period: f64,
    /// `q(jT/M) = ũ(j/M)`.
    pub physical_samples: GridLoop,
    pub initial_position: Vec<f64>,
    pub initial_velocity: Vec<f64>,
    pub residuals: Option<VerificationReport>,
}

/// Builds `q(t) = ũ(t/T)` sampled on the problem's quadrature nodes.
pub fn rescale_to_solution(
    problem: &EnergyProblem,
    l: &FourierLoop,
    period: f64,
) -> Result<OrbitSolution> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "period must be positive, got {period}"
        )));
    }
    problem.check_loop(l)?;
    let f_value = f_free(problem, l)?;
    Ok(OrbitSolution {
        route: Route::Free,
        loop_: l.clone(),
        f_value,
        period,
        physical_samples: problem.grid.sample(l).with_period(period),
        initial_position: l.evaluate(0.0),
        initial_velocity: l.velocity(0.0).iter().map(|v| v / period).collect(),
        residuals: None,
    })
}

impl OrbitSolution {
    /// Physical position and velocity at time `t`.
    pub fn state_at(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let s = t / self.period;
        let q = self.loop_.evaluate(s);
        let v = self
            .loop_
            .velocity(s)
            .iter()
            .map(|x| x / self.period)
            .collect();
        (q, v)
    }

    /// CSV rows `t, q_1..q_n, v_1..v_n, energy` on the sample nodes.
    pub fn write_orbit_csv<W: Write>(&self, spec: &PotentialSpec, w: W) -> Result<()> {
        let n = self.loop_.dim();
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("q_{i}")));
        header.extend((1..=n).map(|i| format!("v_{i}")));
        header.push("energy".into());
        wtr.write_record(&header)
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        for j in 0..self.physical_samples.len() {
            let t = self.physical_samples.time(j);
            let (q, v) = self.state_at(t);
            let e = 0.5 * v.iter().map(|x| x * x).sum::<f64>() + spec.value(&q)?;
            let mut row = vec![fmt_num(t)];
            row.extend(q.iter().chain(&v).map(|&x| fmt_num(x)));
            row.push(fmt_num(e));
            wtr.write_record(&row)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
        }
        wtr.flush().map_err(|e| Error::InvalidInput(e.to_string()))
    }
}
