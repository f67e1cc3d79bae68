//! TOML run configuration. Unknown keys are rejected at every level.
//!
//! ```toml
//! dim = 2
//! h = 0.5
//! route = "free"          # free | constrained | both
//! modes = 32              # Fourier modes K
//! quadrature = 256        # nodes M, default max(256, 8K)
//! min_radius_floor = 1e-6
//! output_dir = "out"
//!
//! [potential]
//! terms = [{ a = 1.0, alpha = 3.0 }]   # V(x) = -Σ a |x|^(-alpha)
//!
//! [solver]                # every key optional
//! seed = 0
//! restarts = 8
//! max_iters = 5000
//! grad_tol = 1e-8
//!
//! [audit]                 # every key optional
//! mu2 = 0.0
//!
//! [verify]                # every key optional
//! energy_tol = 1e-6
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{EnergyProblem, Route, DEFAULT_MIN_RADIUS_FLOOR};
use crate::loop_space::{default_quadrature_nodes, DEFAULT_MODES};
use crate::optimizer::SolverOptions;
use crate::potentials::{log_spaced, AuditConfig, PotentialSpec, Term};
use crate::verifier::{IntegratorOptions, VerifyTolerances};

/// Environment variable overriding `output_dir`.
pub const OUTPUT_ENV: &str = "HAMLOOP_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteChoice {
    Free,
    Constrained,
    Both,
}

impl RouteChoice {
    pub fn routes(self) -> Vec<Route> {
        match self {
            RouteChoice::Free => vec![Route::Free],
            RouteChoice::Constrained => vec![Route::Constrained],
            RouteChoice::Both => vec![Route::Free, Route::Constrained],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub max_iters: Option<usize>,
    pub grad_tol: Option<f64>,
    pub armijo: Option<f64>,
    pub shrink: Option<f64>,
    pub initial_step: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSection {
    pub mu2: Option<f64>,
    pub alpha_target: Option<f64>,
    pub beta_target: Option<f64>,
    pub r_small: Option<f64>,
    pub l0: Option<f64>,
    pub rho0: Option<f64>,
    pub decay_tol: Option<f64>,
    pub radius_min: Option<f64>,
    pub radius_max: Option<f64>,
    pub radius_count: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub energy_tol: Option<f64>,
    pub periodicity_tol: Option<f64>,
    pub ode_tol: Option<f64>,
    pub samples: Option<usize>,
    pub integrator_tol: Option<f64>,
    pub collision_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dim: usize,
    pub h: f64,
    pub potential: PotentialSection,
    #[serde(default = "default_route")]
    pub route: RouteChoice,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default)]
    pub quadrature: Option<usize>,
    #[serde(default = "default_floor")]
    pub min_radius_floor: f64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub audit: AuditSection,
    #[serde(default)]
    pub verify: VerifySection,
}

fn default_route() -> RouteChoice {
    RouteChoice::Free
}

fn default_modes() -> usize {
    DEFAULT_MODES
}

fn default_floor() -> f64 {
    DEFAULT_MIN_RADIUS_FLOOR
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidInput("config: dim must be positive".into()));
        }
        if !self.h.is_finite() {
            return Err(Error::InvalidInput("config: h must be finite".into()));
        }
        if self.modes == 0 {
            return Err(Error::InvalidInput("config: modes must be positive".into()));
        }
        if self.quadrature_nodes() < 2 * self.modes + 1 {
            return Err(Error::InvalidInput(format!(
                "config: quadrature must be at least 2*modes+1 = {}",
                2 * self.modes + 1
            )));
        }
        if !(self.min_radius_floor > 0.0) {
            return Err(Error::InvalidInput(
                "config: min_radius_floor must be positive".into(),
            ));
        }
        self.spec()?;
        self.solver_options().validate()?;
        self.audit_config()?.validate()?;
        Ok(())
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.quadrature
            .unwrap_or_else(|| default_quadrature_nodes(self.modes))
    }

    pub fn spec(&self) -> Result<PotentialSpec> {
        PotentialSpec::new(self.dim, self.potential.terms.clone())
            .map_err(|e| Error::InvalidInput(format!("config: potential: {e}")))
    }

    pub fn problem(&self) -> Result<EnergyProblem> {
        Ok(
            EnergyProblem::new(self.spec()?, self.h, self.quadrature_nodes())?
                .with_min_radius_floor(self.min_radius_floor),
        )
    }

    pub fn solver_options(&self) -> SolverOptions {
        let d = SolverOptions::default();
        let s = &self.solver;
        SolverOptions {
            max_iters: s.max_iters.unwrap_or(d.max_iters),
            grad_tol: s.grad_tol.unwrap_or(d.grad_tol),
            armijo: s.armijo.unwrap_or(d.armijo),
            shrink: s.shrink.unwrap_or(d.shrink),
            initial_step: s.initial_step.unwrap_or(d.initial_step),
            restarts: s.restarts.unwrap_or(d.restarts),
            seed: s.seed.unwrap_or(d.seed),
            modes: self.modes,
        }
    }

    pub fn audit_config(&self) -> Result<AuditConfig> {
        let spec = self.spec()?;
        let mut c = AuditConfig::new(&spec, self.h);
        let a = &self.audit;
        if a.radius_min.is_some() || a.radius_max.is_some() || a.radius_count.is_some() {
            let (lo, hi, n) = (
                a.radius_min.unwrap_or(1e-3),
                a.radius_max.unwrap_or(1e3),
                a.radius_count.unwrap_or(61),
            );
            if !(lo > 0.0 && hi > lo && n >= 2) {
                return Err(Error::InvalidInput(
                    "config: audit radii need 0 < radius_min < radius_max and radius_count >= 2"
                        .into(),
                ));
            }
            c.radii = log_spaced(lo, hi, n);
        }
        c.mu2 = a.mu2.unwrap_or(c.mu2);
        c.alpha_target = a.alpha_target.unwrap_or(c.alpha_target);
        c.beta_target = a.beta_target.unwrap_or(c.beta_target);
        c.r_small = a.r_small.unwrap_or(c.r_small);
        c.l0 = a.l0.unwrap_or(c.l0);
        c.rho0 = a.rho0.unwrap_or(c.rho0);
        c.decay_tol = a.decay_tol.unwrap_or(c.decay_tol);
        c.seed = a.seed.unwrap_or(c.seed);
        Ok(c)
    }

    pub fn verify_tolerances(&self) -> VerifyTolerances {
        let d = VerifyTolerances::default();
        let v = &self.verify;
        VerifyTolerances {
            energy: v.energy_tol.unwrap_or(d.energy),
            periodicity: v.periodicity_tol.unwrap_or(d.periodicity),
            ode: v.ode_tol.unwrap_or(d.ode),
            samples: v.samples.unwrap_or(d.samples),
            integrator: IntegratorOptions {
                tol: v.integrator_tol.unwrap_or(d.integrator.tol),
                collision_radius: v.collision_radius.unwrap_or(d.integrator.collision_radius),
                ..d.integrator
            },
        }
    }

    /// `output_dir`, unless overridden by the environment.
    pub fn resolved_output_dir(&self) -> PathBuf {
        std::env::var_os(OUTPUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| self.output_dir.clone())
    }
}
