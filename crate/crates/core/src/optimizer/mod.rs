//! Multistart minimization of the fixed-energy functionals over antisymmetric
//! loops (`u(t+½) = −u(t)`), and the linking-geometry certificate.

mod certificate;
mod descent;

pub use certificate::{saddle_certificate, CertificateOptions, SaddleCertificate};
pub use descent::{StartStatus, TracePoint};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{
    period_from_loop, rescale_to_solution, EnergyProblem, OrbitSolution, Route,
};
use crate::loop_space::{FourierLoop, DEFAULT_MODES};

/// Kinetic integral below which a converged loop is rejected as constant.
pub const NONCONSTANT_KINETIC: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Bound on the preconditioned gradient norm.
    pub grad_tol: f64,
    /// Sufficient-decrease constant.
    pub armijo: f64,
    pub shrink: f64,
    /// First trial step of the first iteration.
    pub initial_step: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Fourier modes of the loops.
    pub modes: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iters: 5000,
            grad_tol: 1e-8,
            armijo: 1e-4,
            shrink: 0.5,
            initial_step: 1e-2,
            restarts: 8,
            seed: 0,
            modes: DEFAULT_MODES,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("grad_tol", self.grad_tol),
            ("armijo", self.armijo),
            ("initial_step", self.initial_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "solver {name} must be positive"
                )));
            }
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidInput(
                "solver shrink must lie in (0, 1)".into(),
            ));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidInput(
                "solver restarts must be at least 1".into(),
            ));
        }
        if self.modes == 0 {
            return Err(Error::InvalidInput(
                "solver modes must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub start: usize,
    pub status: StartStatus,
    pub converged: bool,
    pub f_value: Option<f64>,
    pub grad_norm: Option<f64>,
    pub iterations: usize,
    pub singular_rejections: usize,
    pub constraint_drift: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub route: Route,
    pub best: OrbitSolution,
    pub all_starts: Vec<StartSummary>,
    /// Smallest value over converged starts.
    pub infimum_estimate: f64,
    /// Accepted iterates per start.
    pub traces: Vec<Vec<TracePoint>>,
    /// Final loop of every start, in start order.
    pub final_loops: Vec<FourierLoop>,
}

impl MinimizeResult {
    pub fn converged_count(&self) -> usize {
        self.all_starts.iter().filter(|s| s.converged).count()
    }
}

/// Minimizes `½∫|u̇|² ∫(h−V)` over antisymmetric loops from random starts.
pub fn minimize_free(problem: &EnergyProblem, opts: &SolverOptions) -> Result<MinimizeResult> {
    let starts = random_starts(problem, opts)?;
    minimize_from_starts(problem, opts, Route::Free, &starts)
}

/// Minimizes `¼∫|u̇|² ∫V′(u)·u` on the constraint set `F`, projecting by
/// scaling after every step.
#[allow(non_snake_case)]
pub fn minimize_on_F(problem: &EnergyProblem, opts: &SolverOptions) -> Result<MinimizeResult> {
    let starts = random_starts(problem, opts)?;
    minimize_from_starts(problem, opts, Route::Constrained, &starts)
}

/// Runs the descent from the given starts (projected onto the antisymmetric
/// subspace) in parallel and reduces the results in start order.
pub fn minimize_from_starts(
    problem: &EnergyProblem,
    opts: &SolverOptions,
    route: Route,
    starts: &[FourierLoop],
) -> Result<MinimizeResult> {
    opts.validate()?;
    if starts.is_empty() {
        return Err(Error::InvalidInput("at least one start is required".into()));
    }
    let outcomes: Vec<_> = starts
        .par_iter()
        .map(|s| descent::descend(problem, route, s, opts))
        .collect();

    let mut all_starts = Vec::with_capacity(outcomes.len());
    let mut best: Option<usize> = None;
    for (i, o) in outcomes.iter().enumerate() {
        let converged = o.status == StartStatus::Converged
            && o.f > 0.0
            && o.point.kinetic_integral() >= NONCONSTANT_KINETIC;
        if converged && best.is_none_or(|b| o.f < outcomes[b].f) {
            best = Some(i);
        }
        all_starts.push(StartSummary {
            start: i,
            status: o.status,
            converged,
            f_value: o.f.is_finite().then_some(o.f),
            grad_norm: o.grad_norm.is_finite().then_some(o.grad_norm),
            iterations: o.iterations,
            singular_rejections: o.singular_rejections,
            constraint_drift: o.constraint_drift,
        });
    }
    let Some(b) = best else {
        let best_grad_norm = outcomes
            .iter()
            .map(|o| o.grad_norm)
            .filter(|g| g.is_finite())
            .fold(f64::INFINITY, f64::min);
        return Err(Error::NoConvergence {
            starts: starts.len(),
            best_grad_norm,
        });
    };
    let winner = &outcomes[b];
    let period = period_from_loop(problem, &winner.point, route)?;
    let mut sol = rescale_to_solution(problem, &winner.point, period)?;
    sol.route = route;
    sol.f_value = winner.f;

    Ok(MinimizeResult {
        route,
        best: sol,
        infimum_estimate: winner.f,
        all_starts,
        traces: outcomes.iter().map(|o| o.trace.clone()).collect(),
        final_loops: outcomes.into_iter().map(|o| o.point).collect(),
    })
}

/// Random antisymmetric starts: a slightly eccentric first harmonic in a
/// random plane with a small third-harmonic perturbation, at a radius drawn
/// log-uniformly from `[r*/4, 4r*]` around the circular-solution radius `r*`
/// (1 when no closed form exists). Start `i` draws from ChaCha stream `i`.
pub fn random_starts(problem: &EnergyProblem, opts: &SolverOptions) -> Result<Vec<FourierLoop>> {
    let n = problem.dim();
    if n < 2 {
        return Err(Error::InvalidInput(
            "antisymmetric loops in one dimension always pass through the origin".into(),
        ));
    }
    let center = problem.spec().critical_radius(problem.h()).unwrap_or(1.0);
    Ok((0..opts.restarts)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            random_start(&mut rng, n, opts.modes, center)
        })
        .collect())
}

fn random_start(rng: &mut ChaCha8Rng, n: usize, modes: usize, center: f64) -> FourierLoop {
    let r = center * rng.gen_range(-(4f64.ln())..4f64.ln()).exp();
    let (e1, e2) = random_plane(rng, n);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let ecc = rng.gen_range(0.0..0.3);
    let (s, c) = phase.sin_cos();
    let mut l = FourierLoop::zero(n, modes);
    for i in 0..n {
        l.cos_mut(1)[i] = r * ((1.0 + ecc) * c * e1[i] + (1.0 - ecc) * s * e2[i]);
        l.sin_mut(1)[i] = r * (-(1.0 + ecc) * s * e1[i] + (1.0 - ecc) * c * e2[i]);
    }
    if modes >= 3 {
        let amp = r * rng.gen_range(0.0..0.1);
        for i in 0..n {
            l.cos_mut(3)[i] = amp * standard_normal(rng) / (n as f64).sqrt();
            l.sin_mut(3)[i] = amp * standard_normal(rng) / (n as f64).sqrt();
        }
    }
    l
}

/// Two orthonormal vectors by Gram–Schmidt on Gaussian draws.
pub(crate) fn random_plane(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    loop {
        let a: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
        let b: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
        let na = crate::loop_space::norm(&a);
        if na < 1e-6 {
            continue;
        }
        let e1: Vec<f64> = a.iter().map(|x| x / na).collect();
        let proj: f64 = b.iter().zip(&e1).map(|(x, y)| x * y).sum();
        let c: Vec<f64> = b.iter().zip(&e1).map(|(x, y)| x - proj * y).collect();
        let nc = crate::loop_space::norm(&c);
        if nc < 1e-6 {
            continue;
        }
        return (e1, c.iter().map(|x| x / nc).collect());
    }
}

pub(crate) fn standard_normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

#[cfg(test)]
mod tests;
