//! Periodic orbits of singular Hamiltonian systems `q̈ + ∇V(q) = 0` at a
//! prescribed energy `½|q̇|² + V(q) = h`, found as critical points of
//! fixed-energy loop functionals.
//!
//! Pipeline: [`potentials`] audits the hypotheses on `V`; [`optimizer`]
//! minimizes a functional from [`functionals`] over Fourier loops from
//! [`loop_space`]; the minimizer is rescaled to a physical orbit and checked by
//! [`verifier`]. The [`cli`] module wires these into the `hamloop` binary.

pub mod cli;
pub mod error;
pub mod functionals;
pub mod loop_space;
pub mod optimizer;
pub mod potentials;
pub mod verifier;

pub use error::{Error, Result};
pub use functionals::{EnergyProblem, OrbitSolution, Route};
pub use loop_space::{FourierLoop, GridLoop, InequalityReport, UniformGrid};
pub use optimizer::{MinimizeResult, SaddleCertificate, SolverOptions};
pub use potentials::{AuditConfig, AuditReport, PotentialSpec, Term};
pub use verifier::{Trajectory, VerificationReport, VerifyTolerances};

/// Version stamped into every JSON artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
