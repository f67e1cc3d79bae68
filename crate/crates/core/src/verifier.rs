//! Independent check of a candidate orbit by direct integration of
//! `q̈ = −∇V(q)` with an adaptive Dormand–Prince 5(4) pair.
//!
//! [`integrate_orbit`] sees only the potential and initial conditions. The
//! Fourier loop enters [`verify_solution`] solely through the pointwise ODE
//! residual.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{EnergyProblem, OrbitSolution};
use crate::loop_space::{fmt_num, norm};
use crate::potentials::PotentialSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    /// Absolute and relative local error tolerance.
    pub tol: f64,
    /// Radius below which the trajectory counts as a collision.
    pub collision_radius: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            tol: 1e-10,
            collision_radius: 1e-4,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected_steps: usize,
    pub min_radius_seen: f64,
}

/// Accepted integrator states `(q, q̇)` on `[0, T]`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dim: usize,
    pub times: Vec<f64>,
    /// Each state is `[q_1..q_n, v_1..v_n]`.
    pub states: Vec<Vec<f64>>,
    pub stats: IntegratorStats,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states
            .last()
            .expect("trajectory has at least one state")
    }

    pub fn energy(&self, spec: &PotentialSpec, i: usize) -> Result<f64> {
        let (q, v) = self.states[i].split_at(self.dim);
        Ok(0.5 * v.iter().map(|x| x * x).sum::<f64>() + spec.value(q)?)
    }

    /// CSV rows `t, q_1..q_n, v_1..v_n, energy`.
    pub fn write_csv<W: Write>(&self, spec: &PotentialSpec, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.dim).map(|i| format!("q_{i}")));
        header.extend((1..=self.dim).map(|i| format!("v_{i}")));
        header.push("energy".into());
        let io = |e: csv::Error| Error::InvalidInput(e.to_string());
        wtr.write_record(&header).map_err(io)?;
        for (i, (t, s)) in self.times.iter().zip(&self.states).enumerate() {
            let mut row = vec![fmt_num(*t)];
            row.extend(s.iter().map(|&x| fmt_num(x)));
            row.push(fmt_num(self.energy(spec, i)?));
            wtr.write_record(&row).map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

// Dormand–Prince 5(4) tableau; the system is autonomous so the nodes c_i are unused
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Rhs<'a> {
    spec: &'a PotentialSpec,
    dim: usize,
}

impl Rhs<'_> {
    fn eval(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        let (q, v) = y.split_at(self.dim);
        out[..self.dim].copy_from_slice(v);
        let g = self.spec.gradient(q)?;
        for (o, gi) in out[self.dim..].iter_mut().zip(g) {
            *o = -gi;
        }
        Ok(())
    }
}

/// Integrates `q̈ = −∇V(q)` from `(q0, v0)` over `[0, period]`.
pub fn integrate_orbit(
    spec: &PotentialSpec,
    q0: &[f64],
    v0: &[f64],
    period: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    let n = spec.dim();
    if q0.len() != n || v0.len() != n {
        return Err(Error::InvalidInput(format!(
            "initial conditions must have dimension {n}"
        )));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "period must be positive, got {period}"
        )));
    }
    let r0 = norm(q0);
    if !(r0 > opts.collision_radius) {
        return Err(Error::Collision {
            time: 0.0,
            radius: r0,
        });
    }
    let rhs = Rhs { spec, dim: n };
    let mut y: Vec<f64> = q0.iter().chain(v0).copied().collect();
    let mut t = 0.0;
    let mut h = period * 1e-3;
    let h_min = period * 1e-14;
    let mut k = vec![vec![0.0; 2 * n]; 7];
    rhs.eval(&y, &mut k[0])?;
    let mut stage = vec![0.0; 2 * n];
    let mut y_new = vec![0.0; 2 * n];

    let mut traj = Trajectory {
        dim: n,
        times: vec![0.0],
        states: vec![y.clone()],
        stats: IntegratorStats {
            steps: 0,
            rejected_steps: 0,
            min_radius_seen: r0,
        },
    };

    while t < period {
        if traj.stats.steps + traj.stats.rejected_steps >= opts.max_steps {
            return Err(Error::StepFailure(t));
        }
        let last = t + h >= period;
        if last {
            h = period - t;
        }
        let mut singular = false;
        for s in 1..7 {
            for i in 0..2 * n {
                stage[i] = y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            if norm(&stage[..n]) <= opts.collision_radius {
                singular = true;
                break;
            }
            rhs.eval(&stage, &mut k[s])?;
        }
        if singular {
            traj.stats.rejected_steps += 1;
            h *= 0.25;
            if h < h_min {
                return Err(Error::Collision {
                    time: t,
                    radius: traj.stats.min_radius_seen,
                });
            }
            continue;
        }
        // stage 7 was evaluated at the fifth-order solution (FSAL)
        y_new.copy_from_slice(&stage);
        let mut err = 0.0;
        for i in 0..2 * n {
            let e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            let sc = opts.tol + opts.tol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / (2 * n) as f64).sqrt();
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err <= 1.0 {
            t = if last { period } else { t + h };
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            traj.stats.steps += 1;
            let r = norm(&y[..n]);
            traj.stats.min_radius_seen = traj.stats.min_radius_seen.min(r);
            if r <= opts.collision_radius {
                return Err(Error::Collision { time: t, radius: r });
            }
            traj.times.push(t);
            traj.states.push(y.clone());
            h *= factor.min(5.0);
        } else {
            traj.stats.rejected_steps += 1;
            h *= factor.min(1.0);
        }
        if h < h_min && t < period {
            return Err(Error::StepFailure(t));
        }
    }
    Ok(traj)
}

/// Pass thresholds for [`verify_solution`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyTolerances {
    pub energy: f64,
    pub periodicity: f64,
    pub ode: f64,
    /// Sample count for the ODE residual.
    pub samples: usize,
    pub integrator: IntegratorOptions,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        VerifyTolerances {
            energy: 1e-6,
            periodicity: 1e-4,
            ode: 1e-4,
            samples: 400,
            integrator: IntegratorOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// `max_t |½|q̇|² + V(q) − h|` along the integrated trajectory.
    pub energy_residual: Option<f64>,
    /// `|q(T) − q(0)| + |q̇(T) − q̇(0)|`.
    pub periodicity_residual: Option<f64>,
    /// `max_s |ũ″(s)/T² + ∇V(ũ(s))|` over the sample points.
    pub ode_residual: Option<f64>,
    pub verdict: bool,
    pub reason: Option<String>,
    pub integrator_steps: usize,
    pub integrator_rejected_steps: usize,
}

/// Pointwise residual of `q̈ + ∇V(q) = 0` for `q(t) = ũ(t/T)`.
pub fn ode_residual(spec: &PotentialSpec, sol: &OrbitSolution, samples: usize) -> Result<f64> {
    let t2 = sol.period * sol.period;
    let mut worst: f64 = 0.0;
    for j in 0..samples {
        let s = j as f64 / samples as f64;
        let acc = sol.loop_.acceleration(s);
        let g = spec.gradient(&sol.loop_.evaluate(s))?;
        let r: Vec<f64> = acc.iter().zip(&g).map(|(a, gi)| a / t2 + gi).collect();
        worst = worst.max(norm(&r));
    }
    Ok(worst)
}

/// Runs all three checks; integrator failures yield a failed verdict with a reason.
pub fn verify_solution(
    problem: &EnergyProblem,
    sol: &OrbitSolution,
    tol: &VerifyTolerances,
) -> VerificationReport {
    let spec = problem.spec();
    let n = spec.dim();
    let mut reasons = Vec::new();

    let ode = match ode_residual(spec, sol, tol.samples.max(1)) {
        Ok(r) => Some(r),
        Err(e) => {
            reasons.push(format!("ode residual: {e}"));
            None
        }
    };

    let (mut energy, mut periodicity, mut steps, mut rejected) = (None, None, 0, 0);
    match integrate_orbit(
        spec,
        &sol.initial_position,
        &sol.initial_velocity,
        sol.period,
        &tol.integrator,
    ) {
        Ok(traj) => {
            steps = traj.stats.steps;
            rejected = traj.stats.rejected_steps;
            let mut worst: f64 = 0.0;
            let mut ok = true;
            for i in 0..traj.states.len() {
                match traj.energy(spec, i) {
                    Ok(e) => worst = worst.max((e - problem.h()).abs()),
                    Err(e) => {
                        reasons.push(format!("energy: {e}"));
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                energy = Some(worst);
            }
            let (y0, y1) = (&traj.states[0], traj.final_state());
            periodicity = Some(norm_diff(&y0[..n], &y1[..n]) + norm_diff(&y0[n..], &y1[n..]));
        }
        Err(e) => reasons.push(format!("integration: {e}")),
    }

    let pass = |v: Option<f64>, limit: f64, name: &str, reasons: &mut Vec<String>| match v {
        Some(x) if x <= limit => true,
        Some(x) => {
            reasons.push(format!("{name} residual {x:e} exceeds {limit:e}"));
            false
        }
        None => false,
    };
    let e_ok = pass(energy, tol.energy, "energy", &mut reasons);
    let p_ok = pass(periodicity, tol.periodicity, "periodicity", &mut reasons);
    let r_ok = pass(ode, tol.ode, "ode", &mut reasons);

    VerificationReport {
        energy_residual: energy,
        periodicity_residual: periodicity,
        ode_residual: ode,
        verdict: e_ok && p_ok && r_ok,
        reason: if reasons.is_empty() {
            None
        } else {
            Some(reasons.join("; "))
        },
        integrator_steps: steps,
        integrator_rejected_steps: rejected,
    }
}

fn norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cubic() -> PotentialSpec {
        PotentialSpec::homogeneous(2, 1.0, 3.0).unwrap()
    }

    #[test]
    fn circular_orbit_closes() {
        let t = 2.0 * PI / 3f64.sqrt();
        let tr = integrate_orbit(
            &cubic(),
            &[1.0, 0.0],
            &[0.0, 3f64.sqrt()],
            t,
            &Default::default(),
        )
        .unwrap();
        let y = tr.final_state();
        assert!(((y[0] - 1.0).powi(2) + y[1].powi(2)).sqrt() <= 1e-6);
        for i in 0..tr.states.len() {
            assert!((tr.energy(&cubic(), i).unwrap() - 0.5).abs() <= 1e-8);
        }
        assert_eq!(*tr.times.last().unwrap(), t);
    }

    #[test]
    fn radial_plunge_collides() {
        // from rest at r = 1 the 1-D radial ODE r̈ = −3 r^(−4) falls in well before t = 10
        let err = integrate_orbit(
            &cubic(),
            &[1.0, 0.0],
            &[0.0, 0.0],
            10.0,
            &Default::default(),
        )
        .unwrap_err();
        match err {
            Error::Collision { time, .. } => assert!(time < 1.0),
            other => panic!("expected collision, got {other:?}"),
        }
    }

    #[test]
    fn flow_is_time_reversible() {
        let spec = cubic();
        let (q0, v0) = ([1.0, 0.1], [0.2, 1.5]);
        let t = 2.0;
        let fwd = integrate_orbit(&spec, &q0, &v0, t, &Default::default()).unwrap();
        let y = fwd.final_state();
        let back =
            integrate_orbit(&spec, &y[..2], &[-y[2], -y[3]], t, &Default::default()).unwrap();
        let z = back.final_state();
        for i in 0..2 {
            assert!((z[i] - q0[i]).abs() <= 1e-6);
            assert!((z[2 + i] + v0[i]).abs() <= 1e-6);
        }
    }

    #[test]
    fn start_at_singularity_is_a_collision() {
        assert!(matches!(
            integrate_orbit(&cubic(), &[0.0, 0.0], &[1.0, 0.0], 1.0, &Default::default()),
            Err(Error::Collision { .. })
        ));
    }

    #[test]
    fn circular_solution_verifies_and_perturbation_fails() {
        use crate::functionals::rescale_to_solution;
        use crate::loop_space::FourierLoop;
        let p = EnergyProblem::new(cubic(), 0.5, 256).unwrap();
        let c = FourierLoop::circle(2, 8, 1.0);
        let t = 2.0 * PI / 3f64.sqrt();
        let sol = rescale_to_solution(&p, &c, t).unwrap();
        let rep = verify_solution(&p, &sol, &Default::default());
        assert!(rep.verdict, "{rep:?}");
        assert!(rep.energy_residual.unwrap() <= 1e-6);
        assert!(rep.periodicity_residual.unwrap() <= 1e-4);
        assert!(rep.ode_residual.unwrap() <= 1e-4);

        let mut bumped = c.clone();
        bumped.cos_mut(3)[0] += 1e-2;
        let bad = rescale_to_solution(&p, &bumped, t).unwrap();
        let rep = verify_solution(&p, &bad, &Default::default());
        assert!(!rep.verdict);
        assert!(rep.ode_residual.unwrap() > 1e-2);
    }

    #[test]
    fn constant_loop_fails_verification() {
        use crate::functionals::rescale_to_solution;
        use crate::loop_space::FourierLoop;
        let p = EnergyProblem::new(cubic(), 0.5, 64).unwrap();
        let c = FourierLoop::constant(&[1.0, 0.0], 2);
        let sol = rescale_to_solution(&p, &c, 1.0).unwrap();
        let rep = verify_solution(&p, &sol, &Default::default());
        assert!(!rep.verdict);
        assert!((rep.ode_residual.unwrap() - 3.0).abs() < 1e-12);
    }
}
