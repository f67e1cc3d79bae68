//! Saddle (linking) geometry for the free functional.
//!
//! With `X₁ = Rⁿ` (constant loops) and `X₂` the zero-mean loops, the sphere
//! `S = {u ∈ X₂ : (∫|u̇|²)^{1/2} = δ}` and the cap
//! `∂Q = {|u₁| ≤ R} ∪ {u₁ + s e : ∫|ė|² = 1, s > 0, |u₁|² + s² = R²}`
//! are separated when `½·12^{β/2} δ^{2−β} > (h/2)R² + ½R²B(R)`, where `B(R)`
//! bounds `|V|` on the annulus `m(R) ≤ |x| ≤ M(R) = R(1 + 12^{−1/2})`.
//!
//! `m(R)` has no closed form, so it is estimated on a random probe family and
//! the resulting verdict is a probe certificate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{f_free, EnergyProblem};
use crate::loop_space::{norm, FourierLoop};
use crate::potentials::PotentialSpec;

use super::standard_normal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertificateOptions {
    pub probe_count: usize,
    pub constant_count: usize,
    /// Highest mode of the random directions `e`.
    pub probe_modes: usize,
    pub seed: u64,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            probe_count: 200,
            constant_count: 50,
            probe_modes: 4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleCertificate {
    pub h: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub beta: f64,
    /// Radius `δ = ρ` of the sphere `S`.
    pub delta: f64,
    pub m_r: f64,
    pub big_m_r: f64,
    pub b_r: f64,
    /// `½·12^{β/2}·δ^{2−β}`.
    pub lower_s: f64,
    /// `(h/2)R² + ½R²B(R)`.
    pub upper_q: f64,
    pub separated: bool,
    /// Largest `f` over the `u₁ + s e` probes.
    pub probe_f_max: f64,
    /// Largest `f` over the constant probes `|u₁| ≤ R`.
    pub constant_f_max: f64,
    /// Largest `|u(t)|` seen on a probe; never exceeds `M(R)`.
    pub probe_radius_max: f64,
    pub probe_count: usize,
    pub constant_count: usize,
}

impl SaddleCertificate {
    /// Evaluates the separation inequality from the geometry alone, for a
    /// given lower radius `m_r` of the probe family.
    pub fn from_bounds(spec: &PotentialSpec, h: f64, r: f64, beta: f64, m_r: f64) -> Result<Self> {
        check_inputs(h, r, beta)?;
        let big_m_r = r * (1.0 + 12f64.powf(-0.5));
        let b_r = spec.max_abs_on_annulus(m_r, big_m_r);
        let delta_max = (12f64.powf(-beta / 2.0) * r * r * (h + b_r)).powf(1.0 / (2.0 - beta));
        let delta = (r / 2.0).min(delta_max / 2.0);
        let lower_s = 0.5 * 12f64.powf(beta / 2.0) * delta.powf(2.0 - beta);
        let upper_q = 0.5 * h * r * r + 0.5 * r * r * b_r;
        Ok(SaddleCertificate {
            h,
            r,
            beta,
            delta,
            m_r,
            big_m_r,
            b_r,
            lower_s,
            upper_q,
            separated: lower_s > upper_q,
            probe_f_max: f64::NAN,
            constant_f_max: f64::NAN,
            probe_radius_max: f64::NAN,
            probe_count: 0,
            constant_count: 0,
        })
    }
}

fn check_inputs(h: f64, r: f64, beta: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("R must be positive, got {r}")));
    }
    if !(beta > 2.0 && beta.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "beta must exceed 2, got {beta}"
        )));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("h must be positive, got {h}")));
    }
    Ok(())
}

/// Random zero-mean loop with `∫|ė|² = 1`.
fn random_unit_direction(rng: &mut ChaCha8Rng, dim: usize, modes: usize) -> FourierLoop {
    let mut e = FourierLoop::zero(dim, modes);
    for k in 1..=modes {
        let w = 1.0 / k as f64;
        for i in 0..dim {
            e.cos_mut(k)[i] = w * standard_normal(rng);
            e.sin_mut(k)[i] = w * standard_normal(rng);
        }
    }
    let kin = e.kinetic_integral();
    e.scaled(1.0 / kin.sqrt())
}

/// Samples the cap `∂Q`, estimates `m(R)` and evaluates the separation.
pub fn saddle_certificate(
    problem: &EnergyProblem,
    r: f64,
    beta: f64,
    opts: &CertificateOptions,
) -> Result<SaddleCertificate> {
    let h = problem.h();
    check_inputs(h, r, beta)?;
    if opts.probe_count == 0 || opts.probe_modes == 0 {
        return Err(Error::InvalidInput(
            "certificate needs probes with at least one mode".into(),
        ));
    }
    let n = problem.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut probes = Vec::with_capacity(opts.probe_count);
    for _ in 0..opts.probe_count {
        let e = random_unit_direction(&mut rng, n, opts.probe_modes);
        // uniform point on the upper half of the radius-R sphere in Rⁿ × R
        let g: Vec<f64> = (0..=n).map(|_| standard_normal(&mut rng)).collect();
        let gn = norm(&g);
        let s = r * g[n].abs() / gn;
        let mut u = e.scaled(s);
        for (m, gi) in u.mean_mut().iter_mut().zip(&g[..n]) {
            *m = r * gi / gn;
        }
        probes.push(u);
    }
    let m_r = probes
        .iter()
        .map(FourierLoop::min_radius)
        .fold(f64::INFINITY, f64::min);
    if !(m_r > problem.min_radius_floor()) {
        return Err(Error::DegenerateCertificate(m_r));
    }
    let mut cert = SaddleCertificate::from_bounds(problem.spec(), h, r, beta, m_r)?;

    let mut probe_f_max = f64::NEG_INFINITY;
    let mut probe_radius_max: f64 = 0.0;
    for u in &probes {
        probe_f_max = probe_f_max.max(f_free(problem, u)?);
        probe_radius_max = probe_radius_max.max(u.sup_norm());
    }

    let mut constant_f_max = f64::NEG_INFINITY;
    for _ in 0..opts.constant_count {
        let g: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
        let gn = norm(&g).max(f64::MIN_POSITIVE);
        let rad = r * rng.gen_range(0.05..=1.0);
        let point: Vec<f64> = g.iter().map(|d| rad * d / gn).collect();
        let c = FourierLoop::constant(&point, opts.probe_modes);
        constant_f_max = constant_f_max.max(f_free(problem, &c)?);
    }

    cert.probe_f_max = probe_f_max;
    cert.constant_f_max = constant_f_max;
    cert.probe_radius_max = probe_radius_max;
    cert.probe_count = opts.probe_count;
    cert.constant_count = opts.constant_count;
    Ok(cert)
}
