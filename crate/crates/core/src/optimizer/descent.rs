//! Preconditioned gradient descent with backtracking over antisymmetric loops.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{
    constraint_g, f_constrained_with_grad, f_difference, f_free_with_grad, grad_constraint_g,
    project_to_f, projected_difference, EnergyProblem, Route,
};
use crate::loop_space::FourierLoop;

use super::SolverOptions;

/// One accepted iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub f: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartStatus {
    Converged,
    MaxIterations,
    /// Backtracking found no acceptable step.
    Stalled,
    /// The start itself lies below the radius floor or off the constraint.
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct DescentOutcome {
    pub status: StartStatus,
    pub point: FourierLoop,
    pub f: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub singular_rejections: usize,
    /// Largest `|g − h|` over accepted iterates (constrained route only).
    pub constraint_drift: Option<f64>,
    pub trace: Vec<TracePoint>,
}

/// Objective value and search direction `d` at a feasible point.
/// `⟨d, P⁻¹d⟩` is the squared preconditioned gradient norm.
struct Local {
    f: f64,
    dir: FourierLoop,
}

/// Preconditioner `1/(1+k²)` per mode, restricted to odd modes: the mean and
/// even modes receive weight 0 so iterates never leave the antisymmetric space.
fn odd_mode_weights(template: &FourierLoop) -> Vec<f64> {
    (0..template.coeffs().len())
        .map(|i| {
            let k = template.mode_of_index(i);
            if k % 2 == 1 {
                1.0 / (1.0 + (k * k) as f64)
            } else {
                0.0
            }
        })
        .collect()
}

fn weighted(v: &FourierLoop, w: &[f64]) -> FourierLoop {
    let c = v.coeffs().iter().zip(w).map(|(x, wi)| x * wi).collect();
    FourierLoop::from_coeffs(v.dim(), v.max_mode(), c)
}

/// `⟨a, P⁻¹ b⟩` over the odd-mode coefficients.
fn inverse_weighted_dot(a: &FourierLoop, b: &FourierLoop, w: &[f64]) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .zip(w)
        .filter(|(_, wi)| **wi > 0.0)
        .map(|((x, y), wi)| x * y / wi)
        .sum()
}

struct Descent<'a> {
    problem: &'a EnergyProblem,
    route: Route,
    weights: Vec<f64>,
}

impl Descent<'_> {
    fn retract(&self, x: FourierLoop) -> Result<FourierLoop> {
        let x = match self.route {
            Route::Free => x,
            Route::Constrained => project_to_f(self.problem, &x)?,
        };
        let r = x.min_radius();
        if !(r > self.problem.min_radius_floor()) {
            return Err(Error::Singularity {
                radius: r,
                floor: self.problem.min_radius_floor(),
            });
        }
        Ok(x)
    }

    fn local(&self, x: &FourierLoop) -> Result<Local> {
        match self.route {
            Route::Free => {
                let (f, grad) = f_free_with_grad(self.problem, x)?;
                let dir = weighted(&grad, &self.weights);
                Ok(Local { f, dir })
            }
            Route::Constrained => {
                let (f, grad) = f_constrained_with_grad(self.problem, x)?;
                let gg = grad_constraint_g(self.problem, x)?;
                let pf = weighted(&grad, &self.weights);
                let pg = weighted(&gg, &self.weights);
                let denom = gg.dot(&pg);
                // tangent part of the preconditioned gradient
                let dir = if denom > 0.0 {
                    pf.axpy(-grad.dot(&pg) / denom, &pg)
                } else {
                    pf
                };
                Ok(Local { f, dir })
            }
        }
    }
}

pub(crate) fn descend(
    problem: &EnergyProblem,
    route: Route,
    start: &FourierLoop,
    opts: &SolverOptions,
) -> DescentOutcome {
    let d = Descent {
        problem,
        route,
        weights: odd_mode_weights(start),
    };
    let infeasible = |point: FourierLoop| DescentOutcome {
        status: StartStatus::Infeasible,
        point,
        f: f64::NAN,
        grad_norm: f64::NAN,
        iterations: 0,
        singular_rejections: 0,
        constraint_drift: None,
        trace: Vec::new(),
    };

    let start = start.project_antisymmetric();
    let mut x = match d.retract(start.clone()) {
        Ok(x) => x,
        Err(_) => return infeasible(start),
    };
    let mut cur = match d.local(&x) {
        Ok(l) => l,
        Err(_) => return infeasible(x),
    };
    let drift_of = |x: &FourierLoop| -> f64 {
        constraint_g(problem, x)
            .map(|g| (g - problem.h()).abs())
            .unwrap_or(f64::INFINITY)
    };
    let mut drift = (route == Route::Constrained).then(|| drift_of(&x));

    let mut gn2 = inverse_weighted_dot(&cur.dir, &cur.dir, &d.weights);
    // f along the path, advanced by accurately computed differences
    let mut f_track = cur.f;
    let mut trace = vec![TracePoint {
        iteration: 0,
        f: cur.f,
        grad_norm: gn2.sqrt(),
    }];
    let mut step = opts.initial_step;
    let mut singular_rejections = 0;
    let mut status = StartStatus::MaxIterations;
    let mut iterations = 0;

    while iterations < opts.max_iters {
        if gn2.sqrt() <= opts.grad_tol {
            status = StartStatus::Converged;
            break;
        }
        let mut s = step;
        let mut accepted = None;
        for _ in 0..80 {
            let y = x.axpy(-s, &cur.dir);
            let trial = d.retract(y.clone()).and_then(|xt| {
                let l = d.local(&xt)?;
                let df = match route {
                    Route::Free => f_difference(problem, route, &x, &xt)?,
                    Route::Constrained => projected_difference(problem, &x, &y)?,
                };
                Ok((xt, l, df))
            });
            match trial {
                Err(Error::Singularity { .. }) | Err(Error::Projection(_)) => {
                    singular_rejections += 1;
                }
                Err(_) => {}
                Ok((xt, lt, df)) => {
                    if df <= -opts.armijo * s * gn2 {
                        accepted = Some((xt, lt, s, df));
                        break;
                    }
                }
            }
            s *= opts.shrink;
        }
        let Some((xt, lt, s, df)) = accepted else {
            status = StartStatus::Stalled;
            break;
        };
        iterations += 1;

        // Barzilai–Borwein trial step in the preconditioned metric
        let dx = xt.axpy(-1.0, &x);
        let dd = lt.dir.axpy(-1.0, &cur.dir);
        let num = inverse_weighted_dot(&dx, &dx, &d.weights);
        let den = inverse_weighted_dot(&dx, &dd, &d.weights);
        step = if den > 0.0 && num > 0.0 {
            (num / den).clamp(1e-12, 1e6)
        } else {
            (2.0 * s).min(1e6)
        };

        x = xt;
        cur = lt;
        f_track += df;
        gn2 = inverse_weighted_dot(&cur.dir, &cur.dir, &d.weights);
        if let Some(dr) = drift.as_mut() {
            *dr = dr.max(drift_of(&x));
        }
        trace.push(TracePoint {
            iteration: iterations,
            f: f_track,
            grad_norm: gn2.sqrt(),
        });
    }
    if status == StartStatus::MaxIterations && gn2.sqrt() <= opts.grad_tol {
        status = StartStatus::Converged;
    }

    DescentOutcome {
        status,
        point: x,
        f: f_track,
        grad_norm: gn2.sqrt(),
        iterations,
        singular_rejections,
        constraint_drift: drift,
        trace,
    }
}
