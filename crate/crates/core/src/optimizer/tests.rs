use std::f64::consts::PI;

use super::*;
use crate::functionals::{constraint_g, f_free, period_from_loop};
use crate::potentials::PotentialSpec;

fn problem(alpha: f64, h: f64) -> EnergyProblem {
    EnergyProblem::new(PotentialSpec::homogeneous(2, 1.0, alpha).unwrap(), h, 256).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Mean radius of the orbit, sampled densely.
fn mean_radius(l: &FourierLoop) -> f64 {
    let n = 512;
    (0..n)
        .map(|j| crate::loop_space::norm(&l.evaluate(j as f64 / n as f64)))
        .sum::<f64>()
        / n as f64
}

#[test]
fn free_route_finds_circular_orbit() {
    let p = problem(3.0, 0.5);
    let res = minimize_free(&p, &SolverOptions::default()).unwrap();
    assert!(res.converged_count() >= 6, "{:?}", res.all_starts);
    assert!(
        rel(res.best.f_value, 3.0 * PI * PI) < 1e-4,
        "{}",
        res.best.f_value
    );
    assert!((mean_radius(&res.best.loop_) - 1.0).abs() < 1e-3);
    assert!((res.best.period - 2.0 * PI / 3f64.sqrt()).abs() < 1e-3);
}

#[test]
fn free_route_quartic() {
    let res = minimize_free(&problem(4.0, 1.0), &SolverOptions::default()).unwrap();
    assert!(
        (res.best.f_value - 4.0 * PI * PI).abs() < 1e-3,
        "{}",
        res.best.f_value
    );
    assert!((mean_radius(&res.best.loop_) - 1.0).abs() < 1e-3);
}

#[test]
fn constrained_route_matches_free_route() {
    let p = problem(3.0, 0.5);
    let opts = SolverOptions::default();
    let free = minimize_free(&p, &opts).unwrap();
    let con = minimize_on_F(&p, &opts).unwrap();
    assert!((free.best.f_value - con.best.f_value).abs() < 1e-3);
    assert!((free.best.period - con.best.period).abs() < 1e-3);
    assert!((mean_radius(&free.best.loop_) - mean_radius(&con.best.loop_)).abs() < 1e-3);
    for s in con
        .all_starts
        .iter()
        .filter(|s| s.status != StartStatus::Infeasible)
    {
        assert!(s.constraint_drift.unwrap() <= 1e-10, "{s:?}");
    }
    let l = &con.best.loop_;
    let t_free = period_from_loop(&p, l, Route::Free).unwrap();
    let t_con = period_from_loop(&p, l, Route::Constrained).unwrap();
    assert!(rel(t_free, t_con) < 1e-9);
}

#[test]
fn constrained_route_small_radius() {
    let p = problem(3.0, 4.0);
    let res = minimize_on_F(&p, &SolverOptions::default()).unwrap();
    assert!((mean_radius(&res.best.loop_) - 0.5).abs() < 1e-3);
    assert!((constraint_g(&p, &res.best.loop_).unwrap() - 4.0).abs() < 1e-10);
}

#[test]
fn absurd_floor_gives_no_convergence() {
    let p = problem(3.0, 0.5).with_min_radius_floor(1e3);
    let opts = SolverOptions {
        restarts: 3,
        ..SolverOptions::default()
    };
    assert!(matches!(
        minimize_free(&p, &opts),
        Err(Error::NoConvergence { .. })
    ));
    assert!(matches!(
        minimize_on_F(&p, &opts),
        Err(Error::NoConvergence { .. })
    ));
}

#[test]
fn traces_are_monotone_and_iterates_antisymmetric() {
    let p = problem(3.0, 0.5);
    let opts = SolverOptions {
        restarts: 4,
        ..SolverOptions::default()
    };
    for res in [
        minimize_free(&p, &opts).unwrap(),
        minimize_on_F(&p, &opts).unwrap(),
    ] {
        for t in &res.traces {
            for w in t.windows(2) {
                assert!(w[1].f <= w[0].f, "{:?}", w);
            }
        }
        for l in &res.final_loops {
            for j in 0..37 {
                let s = j as f64 / 37.0;
                let a = l.evaluate(s);
                let b = l.evaluate(s + 0.5);
                let d: f64 = a
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| (x + y).abs())
                    .fold(0.0, f64::max);
                assert!(d <= 1e-12);
            }
        }
    }
}

#[test]
fn same_seed_same_result() {
    let p = problem(3.0, 0.5);
    let opts = SolverOptions {
        restarts: 3,
        seed: 11,
        ..SolverOptions::default()
    };
    let a = minimize_free(&p, &opts).unwrap();
    let b = minimize_free(&p, &opts).unwrap();
    assert_eq!(a.best.loop_.coeffs(), b.best.loop_.coeffs());
    assert_eq!(a.all_starts, b.all_starts);
    assert_eq!(a.best.f_value.to_bits(), b.best.f_value.to_bits());
}

#[test]
fn rotated_start_reaches_same_value() {
    let p = problem(3.0, 0.5);
    let opts = SolverOptions::default();
    let starts = random_starts(&p, &opts).unwrap();
    let (c, s) = (0.7f64.cos(), 0.7f64.sin());
    let rot = [c, -s, s, c];
    let a = minimize_from_starts(&p, &opts, Route::Free, &starts[..1]).unwrap();
    let b = minimize_from_starts(&p, &opts, Route::Free, &[starts[0].transformed(&rot)]).unwrap();
    assert!((a.best.f_value - b.best.f_value).abs() < 1e-6);
}

#[test]
fn one_dimensional_problem_rejected() {
    let p = EnergyProblem::new(PotentialSpec::homogeneous(1, 1.0, 3.0).unwrap(), 0.5, 256).unwrap();
    assert!(matches!(
        minimize_free(&p, &SolverOptions::default()),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn start_inside_floor_is_rejected_not_fatal() {
    // descent wants radius 0.39 < floor 0.5: steps toward the origin are rejected
    let p = problem(3.0, 8.0).with_min_radius_floor(0.5);
    let start = FourierLoop::circle(2, 8, 0.6);
    let opts = SolverOptions {
        modes: 8,
        ..SolverOptions::default()
    };
    let out = descent::descend(&p, Route::Free, &start, &opts);
    assert!(out.singular_rejections > 0);
    assert!(out.trace.iter().all(|t| t.f.is_finite()));
    for w in out.trace.windows(2) {
        assert!(w[1].f <= w[0].f);
    }
    assert!(out.point.min_radius() > 0.5);
}

#[test]
fn certificate_arithmetic() {
    let spec = PotentialSpec::homogeneous(2, 1.0, 3.0).unwrap();
    let c = SaddleCertificate::from_bounds(&spec, 0.5, 1.0, 3.0, 1.0).unwrap();
    assert_eq!(c.big_m_r, 1.0 + 12f64.powf(-0.5));
    assert!((c.b_r - 1.0).abs() < 1e-15);
    assert_eq!(c.delta, 0.5);
    // ½·12^{3/2}/0.5 = 12^{3/2}
    assert!((c.lower_s - 12f64.powf(1.5)).abs() < 1e-12);
    assert!((c.upper_q - 0.75).abs() < 1e-15);
    assert!(c.separated);
}

#[test]
fn certificate_is_separated_and_sound() {
    let p = problem(3.0, 0.5);
    let c = saddle_certificate(&p, 1.0, 3.0, &CertificateOptions::default()).unwrap();
    assert!(c.separated);
    assert_eq!(c.big_m_r, 1.0 + 12f64.powf(-0.5));
    assert!(c.m_r > 0.0 && c.m_r <= 1.0);
    assert!(c.probe_f_max <= c.upper_q);
    assert!(c.probe_f_max < c.lower_s * (1.0 - 1e-6));
    assert_eq!(c.constant_f_max, 0.0);
    assert!(c.probe_radius_max <= c.big_m_r * (1.0 + 1e-12));
}

#[test]
fn constant_loop_has_zero_value() {
    let p = problem(3.0, 0.5);
    assert_eq!(
        f_free(&p, &FourierLoop::constant(&[0.3, -0.4], 4)).unwrap(),
        0.0
    );
}

#[test]
fn certificate_rejects_bad_inputs() {
    let p = problem(3.0, 0.5);
    let o = CertificateOptions::default();
    assert!(matches!(
        saddle_certificate(&p, 1.0, 2.0, &o),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        saddle_certificate(&p, -1.0, 3.0, &o),
        Err(Error::InvalidInput(_))
    ));
    let neg = problem(3.0, -0.5);
    assert!(matches!(
        saddle_certificate(&neg, 1.0, 3.0, &o),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn certificate_degenerates_under_high_floor() {
    let p = problem(3.0, 0.5).with_min_radius_floor(10.0);
    assert!(matches!(
        saddle_certificate(&p, 1.0, 3.0, &CertificateOptions::default()),
        Err(Error::DegenerateCertificate(_))
    ));
}
