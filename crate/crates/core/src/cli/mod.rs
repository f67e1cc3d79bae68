//! `hamloop` command line: `solve`, `audit`, `certificate`, `verify`.
//!
//! Exit codes are the machine contract:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (verified / theorem applicable / separated) |
//! | 1 | ran, but the verdict is negative |
//! | 2 | no optimizer start converged |
//! | 3 | configuration or input error |

pub mod artifacts;
pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::functionals::{rescale_to_solution, Route};
use crate::optimizer::{
    minimize_free, minimize_on_F, saddle_certificate, CertificateOptions, MinimizeResult,
};
use crate::potentials::{audit_assumptions, PotentialSpec};
use crate::verifier::verify_solution;
use crate::EnergyProblem;

use artifacts::{
    write_json, CertificateDoc, SolutionDoc, SolutionEntry, VerificationDoc, VerificationEntry,
};
use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "hamloop",
    version,
    about = "Fixed-energy periodic orbits of singular Hamiltonian systems",
    long_about = "Fixed-energy periodic orbits of singular Hamiltonian systems q'' + grad V(q) = 0, \
                  1/2|q'|^2 + V(q) = h, for V(x) = -sum a|x|^(-alpha).\n\n\
                  Config defaults: route = free, modes = 32, quadrature = max(256, 8*modes), \
                  min_radius_floor = 1e-6, output_dir = out; solver: seed 0, restarts 8, \
                  max_iters 5000, grad_tol 1e-8, armijo 1e-4, shrink 0.5, initial_step 1e-2; \
                  audit: mu2 0, alpha_target = max alpha, beta_target = min alpha, r_small 1, \
                  l0 1, rho0 0.1, decay_tol 1e-6, 61 radii on [1e-3, 1e3]; verify: energy_tol 1e-6, \
                  periodicity_tol 1e-4, ode_tol 1e-4, samples 400, integrator_tol 1e-10, \
                  collision_radius 1e-4.\n\n\
                  Exit codes: 0 success, 1 negative verdict, 2 no convergence, 3 config error. \
                  HAMLOOP_OUTPUT_DIR overrides output_dir."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Audit, minimize, verify and write solution.json, orbit.csv, trace.csv, verification.json.
    Solve {
        /// TOML run configuration.
        config: PathBuf,
    },
    /// Check the potential hypotheses on sampled shells and write audit.json.
    Audit { config: PathBuf },
    /// Evaluate the linking-geometry separation and write certificate.json.
    Certificate {
        #[arg(long)]
        h: f64,
        #[arg(long = "R")]
        r: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 200)]
        probes: usize,
        #[arg(long, default_value_t = 50)]
        constants: usize,
        /// Exponent of V = -a|x|^(-alpha); defaults to beta.
        #[arg(long)]
        alpha: Option<f64>,
        /// Coefficient a of V.
        #[arg(long, default_value_t = 1.0)]
        coeff: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Take the potential from a run configuration instead.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
    },
    /// Re-verify a solution.json against a configuration.
    Verify {
        #[arg(long)]
        orbit: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Where to write verification.json; defaults to the orbit file's directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_CONFIG,
            };
        }
    };
    match cli.command {
        Command::Solve { config } => cmd_solve(&config),
        Command::Audit { config } => cmd_audit(&config),
        Command::Certificate {
            h,
            r,
            beta,
            probes,
            constants,
            alpha,
            coeff,
            dim,
            seed,
            config,
            output_dir,
        } => {
            let spec = match config {
                Some(path) => RunConfig::load(&path).and_then(|c| c.spec()),
                None => PotentialSpec::homogeneous(dim, coeff, alpha.unwrap_or(beta)),
            };
            let opts = CertificateOptions {
                probe_count: probes,
                constant_count: constants,
                seed,
                ..CertificateOptions::default()
            };
            match spec {
                Ok(spec) => cmd_certificate(spec, h, r, beta, &opts, &output_dir),
                Err(e) => config_error(&e),
            }
        }
        Command::Verify {
            orbit,
            config,
            output_dir,
        } => cmd_verify(&orbit, &config, output_dir.as_deref()),
    }
}

fn config_error(e: &Error) -> i32 {
    eprintln!("error: {e}");
    EXIT_CONFIG
}

fn runtime_error(e: &Error) -> i32 {
    eprintln!("error: {e}");
    EXIT_NEGATIVE
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", dir.display())))
}

/// Loads the config and rejects energies at or below the threshold `μ₂/α`.
fn load_gated(path: &Path) -> Result<(RunConfig, EnergyProblem, crate::AuditReport), Error> {
    let cfg = RunConfig::load(path)?;
    let audit_cfg = cfg.audit_config()?;
    let report = audit_assumptions(&cfg.spec()?, &audit_cfg)?;
    if !(cfg.h > report.energy_threshold) {
        return Err(Error::InvalidInput(format!(
            "energy h = {} must satisfy h > mu2/alpha = {} / {} = {}",
            cfg.h, audit_cfg.mu2, audit_cfg.alpha_target, report.energy_threshold
        )));
    }
    let problem = cfg.problem()?;
    Ok((cfg, problem, report))
}

pub fn cmd_solve(config_path: &Path) -> i32 {
    let (cfg, problem, audit) = match load_gated(config_path) {
        Ok(x) => x,
        Err(e) => return config_error(&e),
    };
    for route in cfg.route.routes() {
        let ok = match route {
            Route::Constrained => audit.theorem_applicable("1.7"),
            Route::Free => audit.theorem_applicable("1.7") || audit.theorem_applicable("1.8"),
        };
        if !ok {
            return config_error(&Error::InvalidInput(format!(
                "the {route} route needs its hypotheses to hold on the audit samples \
                 (applicable theorems: {:?})",
                audit.applicable_theorems
            )));
        }
    }
    let out = cfg.resolved_output_dir();
    if let Err(e) = ensure_dir(&out) {
        return config_error(&e);
    }
    let opts = cfg.solver_options();
    let tol = cfg.verify_tolerances();

    let mut results: Vec<MinimizeResult> = Vec::new();
    for route in cfg.route.routes() {
        let res = match route {
            Route::Free => minimize_free(&problem, &opts),
            Route::Constrained => minimize_on_F(&problem, &opts),
        };
        match res {
            Ok(r) => results.push(r),
            Err(e @ Error::NoConvergence { .. }) => {
                eprintln!("error: {route} route: {e}");
                return EXIT_NO_CONVERGENCE;
            }
            Err(e) => return runtime_error(&e),
        }
    }

    let mut verdict = true;
    let mut reports = Vec::new();
    for r in &mut results {
        let rep = verify_solution(&problem, &r.best, &tol);
        verdict &= rep.verdict;
        r.best.residuals = Some(rep.clone());
        reports.push(VerificationEntry {
            route: r.route,
            report: rep,
        });
        println!(
            "{} route: f = {:.10}, T = {:.10}, {}/{} starts converged",
            r.route,
            r.best.f_value,
            r.best.period,
            r.converged_count(),
            r.all_starts.len()
        );
    }

    let doc = SolutionDoc::new(
        &cfg,
        &problem,
        results.iter().map(SolutionEntry::from_result).collect(),
    );
    let written = write_json(&out.join("solution.json"), &doc)
        .and_then(|_| {
            write_json(
                &out.join("verification.json"),
                &VerificationDoc::new(reports),
            )
        })
        .and_then(|_| artifacts::write_trace_csv(&out.join("trace.csv"), &results))
        .and_then(|_| {
            let f = std::fs::File::create(out.join("orbit.csv"))
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            results[0].best.write_orbit_csv(problem.spec(), f)
        });
    if let Err(e) = written {
        return runtime_error(&e);
    }
    println!(
        "verification: {}",
        if verdict { "passed" } else { "FAILED" }
    );
    if verdict {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

pub fn cmd_audit(config_path: &Path) -> i32 {
    let (cfg, report) = match RunConfig::load(config_path).and_then(|cfg| {
        let report = audit_assumptions(&cfg.spec()?, &cfg.audit_config()?)?;
        Ok((cfg, report))
    }) {
        Ok(x) => x,
        Err(e) => return config_error(&e),
    };
    let out = cfg.resolved_output_dir();
    if let Err(e) = ensure_dir(&out).and_then(|_| {
        write_json(
            &out.join("audit.json"),
            &artifacts::AuditDoc::new(report.clone()),
        )
    }) {
        return runtime_error(&e);
    }
    println!("applicable theorems: {:?}", report.applicable_theorems);
    if report.applicable_theorems.is_empty() {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    }
}

pub fn cmd_certificate(
    spec: PotentialSpec,
    h: f64,
    r: f64,
    beta: f64,
    opts: &CertificateOptions,
    output_dir: &Path,
) -> i32 {
    let problem = match EnergyProblem::new(spec, h, 64) {
        Ok(p) => p,
        Err(e) => return config_error(&e),
    };
    let cert = match saddle_certificate(&problem, r, beta, opts) {
        Ok(c) => c,
        Err(e @ Error::InvalidInput(_)) => return config_error(&e),
        Err(e) => return runtime_error(&e),
    };
    if let Err(e) = ensure_dir(output_dir).and_then(|_| {
        write_json(
            &output_dir.join("certificate.json"),
            &CertificateDoc::new(cert.clone()),
        )
    }) {
        return runtime_error(&e);
    }
    println!(
        "lower_S = {:.6e}, upper_Q = {:.6e}, separated = {}",
        cert.lower_s, cert.upper_q, cert.separated
    );
    if cert.separated {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

pub fn cmd_verify(orbit: &Path, config_path: &Path, output_dir: Option<&Path>) -> i32 {
    let loaded = RunConfig::load(config_path).and_then(|cfg| {
        let problem = cfg.problem()?;
        let doc = artifacts::read_solution(orbit)?;
        Ok((cfg, problem, doc))
    });
    let (cfg, problem, doc) = match loaded {
        Ok(x) => x,
        Err(e) => return config_error(&e),
    };
    if doc.solutions.is_empty() {
        return config_error(&Error::InvalidInput(
            "solution file holds no solutions".into(),
        ));
    }
    let tol = cfg.verify_tolerances();
    let mut verdict = true;
    let mut reports = Vec::new();
    for s in &doc.solutions {
        let sol = match rescale_to_solution(&problem, &s.loop_, s.period) {
            Ok(sol) => sol,
            Err(e) => return config_error(&e),
        };
        let rep = verify_solution(&problem, &sol, &tol);
        verdict &= rep.verdict;
        println!("{} route: verdict {}", s.route, rep.verdict);
        reports.push(VerificationEntry {
            route: s.route,
            report: rep,
        });
    }
    let out = output_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| orbit.parent().map(Path::to_path_buf).unwrap_or_default());
    if let Err(e) = ensure_dir(&out).and_then(|_| {
        write_json(
            &out.join("verification.json"),
            &VerificationDoc::new(reports),
        )
    }) {
        return runtime_error(&e);
    }
    if verdict {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}
