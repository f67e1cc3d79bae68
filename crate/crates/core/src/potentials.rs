//! Attractive singular potentials `V(x) = −Σ a |x|^(−α)` and the hypothesis audit.
//!
//! Every built-in potential is radial, so the audit samples shells `|x| = r`
//! on a log-spaced radius list. Verdicts are statements about those samples only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loop_space::norm;

/// Points closer than this to the origin are treated as singular.
pub const SINGULARITY_GUARD: f64 = 1e-300;

/// Non-strict audit inequalities tolerate this relative slack.
pub const AUDIT_RTOL: f64 = 1e-12;

/// One homogeneous term `−a |x|^(−α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub a: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Homogeneous,
    SumOfHomogeneous,
}

/// Value, Euler derivative `V′(x)·x` and radial second variation `(V″(x)x, x)`
/// on the shell `|x| = r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialQuantities {
    pub v: f64,
    pub v_dot_u: f64,
    pub vpp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    dim: usize,
    terms: Vec<Term>,
}

impl PotentialSpec {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "potential dimension must be positive".into(),
            ));
        }
        if terms.is_empty() {
            return Err(Error::InvalidInput(
                "potential needs at least one term".into(),
            ));
        }
        for (i, t) in terms.iter().enumerate() {
            if !(t.a > 0.0 && t.a.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "terms[{i}].a must be a positive finite number, got {}",
                    t.a
                )));
            }
            if !(t.alpha > 0.0 && t.alpha.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "terms[{i}].alpha must be a positive finite number, got {}",
                    t.alpha
                )));
            }
        }
        Ok(PotentialSpec { dim, terms })
    }

    /// `V(x) = −a |x|^(−α)`.
    pub fn homogeneous(dim: usize, a: f64, alpha: f64) -> Result<Self> {
        Self::new(dim, vec![Term { a, alpha }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn kind(&self) -> PotentialKind {
        if self.terms.len() == 1 {
            PotentialKind::Homogeneous
        } else {
            PotentialKind::SumOfHomogeneous
        }
    }

    pub fn min_alpha(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.alpha)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_alpha(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.alpha)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn radius_checked(&self, x: &[f64]) -> Result<f64> {
        let r = norm(x);
        if r < SINGULARITY_GUARD || !r.is_finite() {
            return Err(Error::Singularity {
                radius: r,
                floor: SINGULARITY_GUARD,
            });
        }
        Ok(r)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.value_at_radius(self.radius_checked(x)?))
    }

    pub fn value_at_radius(&self, r: f64) -> f64 {
        -self
            .terms
            .iter()
            .map(|t| t.a * r.powf(-t.alpha))
            .sum::<f64>()
    }

    /// `∇V(x) = Σ a α |x|^(−α−2) x`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let r = self.radius_checked(x)?;
        let c = self.gradient_factor(r);
        Ok(x.iter().map(|xi| c * xi).collect())
    }

    /// Scalar `c(r)` with `∇V(x) = c(|x|) x`.
    pub(crate) fn gradient_factor(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.a * t.alpha * r.powf(-t.alpha - 2.0))
            .sum()
    }

    /// Scalar `d(r)` with `∇(V′(x)·x) = d(|x|) x`.
    pub(crate) fn euler_gradient_factor(&self, r: f64) -> f64 {
        -self
            .terms
            .iter()
            .map(|t| t.a * t.alpha * t.alpha * r.powf(-t.alpha - 2.0))
            .sum::<f64>()
    }

    pub fn radial_euler_quantities(&self, r: f64) -> RadialQuantities {
        assert!(r > 0.0, "radius must be positive");
        let mut q = RadialQuantities {
            v: 0.0,
            v_dot_u: 0.0,
            vpp: 0.0,
        };
        for t in &self.terms {
            let p = t.a * r.powf(-t.alpha);
            q.v -= p;
            q.v_dot_u += t.alpha * p;
            q.vpp -= t.alpha * (t.alpha + 1.0) * p;
        }
        q
    }

    /// `max{|V(x)| : lo <= |x| <= hi}`; every term decays in `|x|`, so the
    /// maximum sits on the inner shell.
    pub fn max_abs_on_annulus(&self, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo <= hi);
        self.value_at_radius(lo).abs()
    }

    /// Radius of the circular solution at energy `h`: the root of
    /// `2h = Σ a (α−2) r^(−α)`. `None` unless `h > 0` and every `α > 2`.
    pub fn critical_radius(&self, h: f64) -> Option<f64> {
        if !(h > 0.0) || self.min_alpha() <= 2.0 {
            return None;
        }
        if let [t] = self.terms.as_slice() {
            return Some((t.a * (t.alpha - 2.0) / (2.0 * h)).powf(1.0 / t.alpha));
        }
        let rate = |log_r: f64| -> f64 {
            let r = log_r.exp();
            self.terms
                .iter()
                .map(|t| t.a * (t.alpha - 2.0) * r.powf(-t.alpha))
                .sum::<f64>()
                - 2.0 * h
        };
        // decreasing in log r; widen until the root is bracketed
        let (mut lo, mut hi) = (-1.0, 1.0);
        while rate(lo) < 0.0 {
            lo *= 2.0;
            if lo < -700.0 {
                return None;
            }
        }
        while rate(hi) > 0.0 {
            hi *= 2.0;
            if hi > 700.0 {
                return None;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rate(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some((0.5 * (lo + hi)).exp())
    }
}

/// Sampling setup for [`audit_assumptions`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub radii: Vec<f64>,
    pub alpha_target: f64,
    pub beta_target: f64,
    pub mu2: f64,
    pub h: f64,
    pub r_small: f64,
    pub l0: f64,
    pub rho0: f64,
    /// Bound on `|∇V|` at the outermost shells for the limits at infinity.
    pub decay_tol: f64,
    pub seed: u64,
}

/// `count` log-spaced radii from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

impl AuditConfig {
    /// Defaults: 61 radii from 1e-3 to 1e3, `alpha_target` the largest and
    /// `beta_target` the smallest exponent of `spec`, `mu2 = 0`, `r_small = 1`,
    /// `L0 = 1`, `rho0 = 0.1`, decay tolerance 1e-6, seed 0.
    pub fn new(spec: &PotentialSpec, h: f64) -> Self {
        AuditConfig {
            radii: log_spaced(1e-3, 1e3, 61),
            alpha_target: spec.max_alpha(),
            beta_target: spec.min_alpha(),
            mu2: 0.0,
            h,
            r_small: 1.0,
            l0: 1.0,
            rho0: 0.1,
            decay_tol: 1e-6,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radii.len() < 2 {
            return Err(Error::InvalidInput("audit needs at least two radii".into()));
        }
        if self.radii[0] <= 0.0 || self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "audit radii must be positive and strictly increasing".into(),
            ));
        }
        if !(self.mu2 >= 0.0) {
            return Err(Error::InvalidInput("mu2 must be nonnegative".into()));
        }
        for (name, v) in [
            ("alpha_target", self.alpha_target),
            ("beta_target", self.beta_target),
            ("r_small", self.r_small),
            ("rho0", self.rho0),
            ("decay_tol", self.decay_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive")));
            }
        }
        if !self.h.is_finite() || !self.l0.is_finite() {
            return Err(Error::InvalidInput("h and l0 must be finite".into()));
        }
        Ok(())
    }

    /// `μ₂/α`, the energy threshold of both existence results.
    pub fn energy_threshold(&self) -> f64 {
        self.mu2 / self.alpha_target
    }
}

/// Outcome of one hypothesis on the sampled shells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds_on_samples: bool,
    /// Smallest normalized margin; negative means violated. `None` when the
    /// hypothesis has no sampled radius in its domain (vacuously true).
    pub worst_margin: Option<f64>,
    pub worst_radius: Option<f64>,
}

impl Verdict {
    fn vacuous() -> Self {
        Verdict {
            holds_on_samples: true,
            worst_margin: None,
            worst_radius: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    #[serde(rename = "A1")]
    pub a1: Verdict,
    #[serde(rename = "A2")]
    pub a2: Verdict,
    #[serde(rename = "A3")]
    pub a3: Verdict,
    #[serde(rename = "A4")]
    pub a4: Verdict,
    #[serde(rename = "A4'")]
    pub a4_prime: Verdict,
    #[serde(rename = "A5")]
    pub a5: Verdict,
    #[serde(rename = "A5'")]
    pub a5_prime: Verdict,
    #[serde(rename = "P1")]
    pub p1: Verdict,
    #[serde(rename = "B1")]
    pub b1: Verdict,
    #[serde(rename = "B2")]
    pub b2: Verdict,
    #[serde(rename = "B3")]
    pub b3: Verdict,
    #[serde(rename = "B2'")]
    pub b2_prime: Verdict,
    #[serde(rename = "B3'")]
    pub b3_prime: Verdict,
    pub strong_force: Verdict,
    pub energy_threshold: f64,
    pub h: f64,
    /// Subset of `["1.7", "1.8"]`.
    pub applicable_theorems: Vec<String>,
}

impl AuditReport {
    pub fn theorem_applicable(&self, name: &str) -> bool {
        self.applicable_theorems.iter().any(|t| t == name)
    }
}

/// Folds per-radius margins into a verdict; `strict` demands margin > tol.
fn fold_margins(samples: impl Iterator<Item = (f64, f64)>, strict: bool) -> Verdict {
    let mut worst: Option<(f64, f64)> = None;
    for (r, m) in samples {
        if worst.is_none_or(|(_, w)| m < w) {
            worst = Some((r, m));
        }
    }
    match worst {
        None => Verdict::vacuous(),
        Some((r, m)) => Verdict {
            holds_on_samples: if strict {
                m > AUDIT_RTOL
            } else {
                m >= -AUDIT_RTOL
            },
            worst_margin: Some(m),
            worst_radius: Some(r),
        },
    }
}

/// Evaluates every hypothesis family on the sampled shells of `cfg`.
pub fn audit_assumptions(spec: &PotentialSpec, cfg: &AuditConfig) -> Result<AuditReport> {
    cfg.validate()?;
    let radii = &cfg.radii;
    let q: Vec<RadialQuantities> = radii
        .iter()
        .map(|&r| spec.radial_euler_quantities(r))
        .collect();
    let scale = |q: &RadialQuantities| q.v.abs() + q.v_dot_u.abs() + q.vpp.abs();
    let shells = || radii.iter().copied().zip(q.iter());

    let a1 = fold_margins(
        shells().map(|(r, q)| (r, (3.0 * q.v_dot_u + q.vpp).abs() / scale(q))),
        true,
    );
    let a2 = fold_margins(shells().map(|(r, q)| (r, q.v_dot_u / scale(q))), true);
    let a3 = fold_margins(
        shells().map(|(r, q)| {
            (
                r,
                (-cfg.alpha_target * q.v + cfg.mu2 - q.v_dot_u) / (scale(q) + cfg.mu2),
            )
        }),
        false,
    );
    let a4_margin = |q: &RadialQuantities| (q.v_dot_u + cfg.beta_target * q.v) / scale(q);
    let a4 = fold_margins(
        shells()
            .filter(|(r, _)| *r < cfg.r_small)
            .map(|(r, q)| (r, a4_margin(q))),
        false,
    );
    let mut a4_prime = fold_margins(shells().map(|(r, q)| (r, a4_margin(q))), false);
    // both forms require an exponent β > 2
    let mut a4 = a4;
    for v in [&mut a4, &mut a4_prime] {
        v.holds_on_samples &= cfg.beta_target > 2.0;
    }
    let a5 = fold_margins(
        shells().map(|(r, q)| (r, -(q.v + 0.5 * q.v_dot_u) / scale(q))),
        false,
    );

    // evenness V(−x) = V(x), one random direction per shell
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut a5p = Vec::with_capacity(radii.len());
    for (&r, q) in radii.iter().zip(&q) {
        let dir = random_unit(&mut rng, spec.dim());
        let x: Vec<f64> = dir.iter().map(|d| r * d).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let diff = (spec.value(&x)? - spec.value(&neg)?).abs();
        a5p.push((r, -diff / scale(q)));
    }
    let a5_prime = fold_margins(a5p.into_iter(), false);

    let p1 = decay_verdict(spec, radii, cfg.decay_tol);
    let b2_prime = p1.clone();

    let b1 = fold_margins(shells().map(|(r, q)| (r, -q.v / scale(q))), false);
    let b_scale = |q: &RadialQuantities| scale(q) + cfg.h.abs();
    let b_lhs = |q: &RadialQuantities| q.v + 0.5 * q.v_dot_u;
    let b2 = fold_margins(
        shells()
            .filter(|(r, _)| *r >= cfg.l0.exp())
            .map(|(r, q)| (r, (cfg.h - b_lhs(q)) / b_scale(q))),
        false,
    );
    let b3 = fold_margins(
        shells()
            .filter(|(r, _)| *r <= (-cfg.l0).exp())
            .map(|(r, q)| (r, (b_lhs(q) - cfg.h) / b_scale(q))),
        false,
    );
    let b3_prime = fold_margins(
        shells()
            .filter(|(r, _)| *r <= cfg.rho0)
            .map(|(r, q)| (r, (b_lhs(q) - cfg.h) / b_scale(q))),
        false,
    );

    let strong_force = strong_force_verdict(spec, radii, cfg);

    let energy_threshold = cfg.energy_threshold();
    let above = cfg.h > energy_threshold;
    let mut applicable_theorems = Vec::new();
    if above
        && a1.holds_on_samples
        && a2.holds_on_samples
        && a3.holds_on_samples
        && a4_prime.holds_on_samples
        && a5_prime.holds_on_samples
    {
        applicable_theorems.push("1.7".to_string());
    }
    if above && p1.holds_on_samples && a3.holds_on_samples && a4.holds_on_samples {
        applicable_theorems.push("1.8".to_string());
    }

    Ok(AuditReport {
        a1,
        a2,
        a3,
        a4,
        a4_prime,
        a5,
        a5_prime,
        p1,
        b1,
        b2,
        b3,
        b2_prime,
        b3_prime,
        strong_force,
        energy_threshold,
        h: cfg.h,
        applicable_theorems,
    })
}

fn random_unit(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// `|∇V| → 0` at infinity: small at the outermost shell and decaying
/// (negative log-log slope over the last five shells).
fn decay_verdict(spec: &PotentialSpec, radii: &[f64], tol: f64) -> Verdict {
    let tail = &radii[radii.len().saturating_sub(5)..];
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .map(|&r| (r.ln(), (spec.gradient_factor(r) * r).ln()))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let r_max = *radii.last().unwrap();
    let grad_max = spec.gradient_factor(r_max) * r_max;
    let margin = tol - grad_max;
    Verdict {
        holds_on_samples: margin >= 0.0 && slope < 0.0,
        worst_margin: Some(margin),
        worst_radius: Some(r_max),
    }
}

/// Strong force with `U = ln|x|`: requires `β ≥ 2` and `−V(x)|x|²` bounded away
/// from zero as `|x| → 0`, i.e. not decreasing toward the origin on the shells
/// inside `r_small`. The margin is the smallest sampled `−V r²`.
fn strong_force_verdict(spec: &PotentialSpec, radii: &[f64], cfg: &AuditConfig) -> Verdict {
    let inner: Vec<(f64, f64)> = radii
        .iter()
        .filter(|&&r| r < cfg.r_small)
        .map(|&r| (r, -spec.value_at_radius(r) * r * r))
        .collect();
    let Some(&(r_in, c_in)) = inner.first() else {
        return Verdict {
            holds_on_samples: false,
            worst_margin: None,
            worst_radius: None,
        };
    };
    let (r_min, c_min) =
        inner
            .iter()
            .copied()
            .fold((r_in, c_in), |acc, p| if p.1 < acc.1 { p } else { acc });
    let c_out = inner.last().unwrap().1;
    let bounded_below = c_min > 0.0 && c_in >= c_out * (1.0 - AUDIT_RTOL);
    Verdict {
        holds_on_samples: cfg.beta_target >= 2.0 && bounded_below,
        worst_margin: Some(c_min),
        worst_radius: Some(r_min),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> PotentialSpec {
        PotentialSpec::homogeneous(2, 1.0, 3.0).unwrap()
    }

    #[test]
    fn value_and_gradient_closed_form() {
        let v = cubic();
        assert!((v.value(&[2.0, 0.0]).unwrap() + 0.125).abs() < 1e-16);
        let g = v.gradient(&[2.0, 0.0]).unwrap();
        assert!((g[0] - 0.1875).abs() < 1e-16 && g[1] == 0.0);
        let d = [0.6, -0.8];
        assert!((v.value(&d).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_point_is_rejected() {
        assert!(matches!(
            cubic().value(&[0.0, 0.0]),
            Err(Error::Singularity { .. })
        ));
        assert!(cubic().gradient(&[1e-301, 0.0]).is_err());
    }

    #[test]
    fn radial_quantities_examples() {
        let q = cubic().radial_euler_quantities(1.0);
        assert_eq!((q.v, q.v_dot_u, q.vpp), (-1.0, 3.0, -12.0));
        assert_eq!(3.0 * q.v_dot_u + q.vpp, -3.0);
        let sq = PotentialSpec::homogeneous(2, 1.0, 2.0).unwrap();
        for r in [0.01, 0.5, 3.0, 70.0] {
            let q = sq.radial_euler_quantities(r);
            assert!((3.0 * q.v_dot_u + q.vpp).abs() <= 1e-15 * q.vpp.abs());
        }
    }

    #[test]
    fn radial_quantities_match_finite_differences() {
        // V(s) along the ray s -> s x̂: V'·x = r dV/dr, (V''x, x) = r² d²V/dr²
        let v = PotentialSpec::new(
            2,
            vec![Term { a: 0.7, alpha: 2.5 }, Term { a: 1.3, alpha: 4.0 }],
        )
        .unwrap();
        for r in [0.4, 1.0, 2.2] {
            let h = 1e-4 * r;
            let f = |s: f64| v.value_at_radius(s);
            let d1 = (f(r + h) - f(r - h)) / (2.0 * h);
            let d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
            let q = v.radial_euler_quantities(r);
            assert!((q.v_dot_u - r * d1).abs() <= 1e-6 * q.v_dot_u.abs());
            assert!((q.vpp - r * r * d2).abs() <= 1e-5 * q.vpp.abs());
        }
    }

    #[test]
    fn critical_radius_closed_form_and_bisection_agree() {
        let v = cubic();
        assert!((v.critical_radius(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((v.critical_radius(4.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(v.critical_radius(-1.0).is_none());
        let split = PotentialSpec::new(
            2,
            vec![Term { a: 0.5, alpha: 3.0 }, Term { a: 0.5, alpha: 3.0 }],
        )
        .unwrap();
        assert!((split.critical_radius(0.5).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn audit_cubic_example() {
        let v = cubic();
        let cfg = AuditConfig::new(&v, 0.5);
        let rep = audit_assumptions(&v, &cfg).unwrap();
        assert!(rep.a1.holds_on_samples);
        assert!(rep.a2.holds_on_samples);
        assert!(rep.a3.holds_on_samples);
        assert!(rep.a3.worst_margin.unwrap().abs() <= 1e-12);
        assert!(rep.a4_prime.holds_on_samples);
        assert!(!rep.a5.holds_on_samples);
        assert!(rep.a5_prime.holds_on_samples);
        assert!(rep.p1.holds_on_samples);
        assert!(rep.strong_force.holds_on_samples);
        assert_eq!(rep.energy_threshold, 0.0);
        assert_eq!(rep.applicable_theorems, vec!["1.7", "1.8"]);
    }

    #[test]
    fn audit_negative_energy_has_no_theorem() {
        let v = cubic();
        let rep = audit_assumptions(&v, &AuditConfig::new(&v, -1.0)).unwrap();
        assert!(rep.applicable_theorems.is_empty());
    }

    #[test]
    fn audit_weak_force_fails_strong_force() {
        let v = PotentialSpec::homogeneous(2, 1.0, 1.5).unwrap();
        let mut cfg = AuditConfig::new(&v, 0.5);
        cfg.beta_target = 1.5;
        assert!(
            !audit_assumptions(&v, &cfg)
                .unwrap()
                .strong_force
                .holds_on_samples
        );
        // the exponent test alone fails it even with a strong potential
        let mut cfg3 = AuditConfig::new(&cubic(), 0.5);
        cfg3.beta_target = 1.5;
        assert!(
            !audit_assumptions(&cubic(), &cfg3)
                .unwrap()
                .strong_force
                .holds_on_samples
        );
    }

    #[test]
    fn kepler_is_not_covered() {
        let v = PotentialSpec::homogeneous(2, 1.0, 1.0).unwrap();
        let rep = audit_assumptions(&v, &AuditConfig::new(&v, 0.5)).unwrap();
        assert!(!rep.a4.holds_on_samples && !rep.a4_prime.holds_on_samples);
        assert!(!rep.strong_force.holds_on_samples);
        assert!(rep.applicable_theorems.is_empty());
    }

    #[test]
    fn audit_degenerate_exponent_fails_a1() {
        let v = PotentialSpec::homogeneous(3, 1.0, 2.0).unwrap();
        let rep = audit_assumptions(&v, &AuditConfig::new(&v, 0.5)).unwrap();
        assert!(!rep.a1.holds_on_samples);
        assert!(!rep.theorem_applicable("1.7"));
    }

    #[test]
    fn audit_rejects_bad_config() {
        let v = cubic();
        let mut cfg = AuditConfig::new(&v, 0.5);
        cfg.radii = vec![1.0, 0.5];
        assert!(audit_assumptions(&v, &cfg).is_err());
        let mut cfg = AuditConfig::new(&v, 0.5);
        cfg.mu2 = -1.0;
        assert!(audit_assumptions(&v, &cfg).is_err());
    }

    #[test]
    fn audit_report_json_uses_hypothesis_names() {
        let v = cubic();
        let rep = audit_assumptions(&v, &AuditConfig::new(&v, 0.5)).unwrap();
        let j = serde_json::to_value(&rep).unwrap();
        assert_eq!(j["A5"]["holds_on_samples"], false);
        assert_eq!(j["A4'"]["holds_on_samples"], true);
    }

    #[test]
    fn spec_validation() {
        assert!(PotentialSpec::homogeneous(2, -1.0, 3.0).is_err());
        assert!(PotentialSpec::homogeneous(2, 1.0, 0.0).is_err());
        assert!(PotentialSpec::new(2, vec![]).is_err());
        assert!(PotentialSpec::homogeneous(0, 1.0, 3.0).is_err());
    }
}
