//! CSV results and whitespace-separated plot tables.

use std::fmt::Write as _;

use serde::Serialize;

use super::{Eigensolver, ModelOutcome, RankingReport, SpeedFit, SpeedReport};
use crate::error::{Result, SbdError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub label: String,
    pub eigensolver: Eigensolver,
    pub depth: usize,
    pub matrix_dim: Option<usize>,
    pub energy_hartree: Option<f64>,
    pub wall_time_s: Option<f64>,
    pub status: String,
}

impl From<&ModelOutcome> for ResultRow {
    fn from(o: &ModelOutcome) -> Self {
        let spec = o.spec();
        let (matrix_dim, energy, time, status) = match o {
            ModelOutcome::Ok(r) => (Some(r.matrix_dim), Some(r.energy), Some(r.wall_time), "ok".to_string()),
            ModelOutcome::Failed { error, .. } => (None, None, None, format!("failed: {error}")),
        };
        ResultRow {
            label: spec.hamiltonian_label.clone(),
            eigensolver: spec.eigensolver,
            depth: spec.depth,
            matrix_dim,
            energy_hartree: energy,
            wall_time_s: time,
            status,
        }
    }
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| SbdError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| SbdError::Parse(e.to_string()))
}

pub fn results_csv(outcomes: &[ModelOutcome]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for o in outcomes {
        w.serialize(ResultRow::from(o))?;
    }
    if outcomes.is_empty() {
        w.write_record(["label", "eigensolver", "depth", "matrix_dim", "energy_hartree", "wall_time_s", "status"])?;
    }
    finish(w)
}

/// One row per model: the model name followed by molecules in ascending energy.
pub fn ranking_csv(report: &RankingReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["model".to_string()];
    header.extend((1..=report.molecules.len()).map(|i| format!("rank_{i}")));
    w.write_record(&header)?;
    for (model, order) in report.models.iter().zip(&report.orderings) {
        let mut row = vec![model.clone()];
        row.extend(order.iter().cloned());
        w.write_record(&row)?;
    }
    finish(w)
}

/// `label eigensolver depth matrix_dim energy`, one line per successful run.
pub fn ground_state_table(outcomes: &[ModelOutcome]) -> String {
    let mut s = String::from("# label eigensolver depth matrix_dim energy_hartree\n");
    for r in outcomes.iter().filter_map(ModelOutcome::run) {
        let _ = writeln!(
            s,
            "{} {} {} {} {:.12}",
            r.spec.hamiltonian_label,
            r.spec.eigensolver.as_str(),
            r.spec.depth,
            r.matrix_dim,
            r.energy
        );
    }
    s
}

/// Absolute error against the depth-0 dense energy of the same molecule.
pub fn error_table(outcomes: &[ModelOutcome]) -> String {
    let mut s = String::from("# label eigensolver depth abs_error_hartree (vs dense depth 0)\n");
    let runs: Vec<_> = outcomes.iter().filter_map(ModelOutcome::run).collect();
    for r in &runs {
        let exact = runs.iter().find(|x| {
            x.spec.hamiltonian_label == r.spec.hamiltonian_label
                && x.spec.eigensolver == Eigensolver::Dense
                && x.spec.depth == 0
        });
        if let Some(exact) = exact {
            let _ = writeln!(
                s,
                "{} {} {} {:.12e}",
                r.spec.hamiltonian_label,
                r.spec.eigensolver.as_str(),
                r.spec.depth,
                (r.energy - exact.energy).abs()
            );
        }
    }
    s
}

pub fn speed_table(report: &SpeedReport, fit: Option<&SpeedFit>) -> String {
    let mut s = format!("# relative speed = median time of {} on the same molecule / median time\n", report.reference);
    if let Some(f) = fit {
        let _ = writeln!(s, "# fit speed = a*exp(b*depth): a={:.6} b={:.6} rms_log_residual={:.6}", f.a, f.b, f.residual);
    }
    s.push_str("# label eigensolver depth median_s relative_speed\n");
    for (e, r) in report.entries.iter().zip(&report.relative) {
        let _ = writeln!(s, "{} {} {} {:.6e} {:.6}", e.label, e.eigensolver.as_str(), e.depth, e.median, r);
    }
    s
}

pub fn ranking_table(report: &RankingReport) -> String {
    let mut s = format!(
        "# reference={} match_rate={:.4} ground_hit_rate={:.4}\n# model rank label energy_hartree\n",
        report.reference, report.match_rate, report.ground_hit_rate
    );
    for (i, model) in report.models.iter().enumerate() {
        for (rank, label) in report.orderings[i].iter().enumerate() {
            let j = report.molecules.iter().position(|m| m == label).expect("label in grid");
            let _ = writeln!(s, "{model} {} {label} {:.12}", rank + 1, report.energies[i][j]);
        }
    }
    s
}
