//! JSON and CSV artifacts written by the commands. Documents carry the tool
//! name and version but no timestamps, so identical runs give identical bytes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{EnergyProblem, Route};
use crate::loop_space::{fmt_num, FourierLoop};
use crate::optimizer::{MinimizeResult, SaddleCertificate, StartSummary};
use crate::potentials::{AuditReport, Term};
use crate::verifier::VerificationReport;
use crate::VERSION;

use super::config::RunConfig;

pub const TOOL: &str = "hamloop";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDoc {
    pub dim: usize,
    pub h: f64,
    pub terms: Vec<Term>,
    pub modes: usize,
    pub quadrature: usize,
    pub min_radius_floor: f64,
    pub seed: u64,
    pub restarts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionEntry {
    pub route: Route,
    pub f_value: f64,
    pub period: f64,
    pub initial_position: Vec<f64>,
    pub initial_velocity: Vec<f64>,
    pub kinetic: f64,
    pub min_radius: f64,
    pub max_radius: f64,
    pub infimum_estimate: f64,
    pub converged_starts: usize,
    pub starts: Vec<StartSummary>,
    #[serde(rename = "loop")]
    pub loop_: FourierLoop,
}

impl SolutionEntry {
    pub fn from_result(r: &MinimizeResult) -> Self {
        let l = &r.best.loop_;
        SolutionEntry {
            route: r.route,
            f_value: r.best.f_value,
            period: r.best.period,
            initial_position: r.best.initial_position.clone(),
            initial_velocity: r.best.initial_velocity.clone(),
            kinetic: l.kinetic_integral(),
            min_radius: l.min_radius(),
            max_radius: l.sup_norm(),
            infimum_estimate: r.infimum_estimate,
            converged_starts: r.converged_count(),
            starts: r.all_starts.clone(),
            loop_: l.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub tool: String,
    pub version: String,
    pub problem: ProblemDoc,
    pub solutions: Vec<SolutionEntry>,
}

impl SolutionDoc {
    pub fn new(cfg: &RunConfig, problem: &EnergyProblem, solutions: Vec<SolutionEntry>) -> Self {
        let opts = cfg.solver_options();
        SolutionDoc {
            tool: TOOL.into(),
            version: VERSION.into(),
            problem: ProblemDoc {
                dim: problem.dim(),
                h: problem.h(),
                terms: problem.spec().terms().to_vec(),
                modes: cfg.modes,
                quadrature: problem.quadrature_nodes(),
                min_radius_floor: problem.min_radius_floor(),
                seed: opts.seed,
                restarts: opts.restarts,
            },
            solutions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationEntry {
    pub route: Route,
    #[serde(flatten)]
    pub report: VerificationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationDoc {
    pub tool: String,
    pub version: String,
    pub verdict: bool,
    pub solutions: Vec<VerificationEntry>,
}

impl VerificationDoc {
    pub fn new(solutions: Vec<VerificationEntry>) -> Self {
        VerificationDoc {
            tool: TOOL.into(),
            version: VERSION.into(),
            verdict: solutions.iter().all(|s| s.report.verdict),
            solutions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditDoc {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub report: AuditReport,
}

impl AuditDoc {
    pub fn new(report: AuditReport) -> Self {
        AuditDoc {
            tool: TOOL.into(),
            version: VERSION.into(),
            report,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub certificate: SaddleCertificate,
}

impl CertificateDoc {
    pub fn new(certificate: SaddleCertificate) -> Self {
        CertificateDoc {
            tool: TOOL.into(),
            version: VERSION.into(),
            certificate,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("serialize {}: {e}", path.display())))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

pub fn read_solution(path: &Path) -> Result<SolutionDoc> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

/// `route,start,iteration,f,grad_norm`, one row per accepted iterate.
pub fn write_trace_csv(path: &Path, results: &[MinimizeResult]) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidInput(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["route", "start", "iteration", "f", "grad_norm"])
        .map_err(io)?;
    for r in results {
        for (i, trace) in r.traces.iter().enumerate() {
            for p in trace {
                w.write_record([
                    r.route.to_string(),
                    i.to_string(),
                    p.iteration.to_string(),
                    fmt_num(p.f),
                    fmt_num(p.grad_norm),
                ])
                .map_err(io)?;
            }
        }
    }
    w.flush()
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}
