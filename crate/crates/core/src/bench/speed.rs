use serde::Serialize;

use super::{run_prepared, Eigensolver, ModelSpec, Prepared, RunSettings};
use crate::error::{Result, SbdError};

/// Timed repetitions per model, after one untimed warm-up.
pub const TIMED_RUNS: usize = 7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedEntry {
    pub model: String,
    pub label: String,
    pub eigensolver: Eigensolver,
    pub depth: usize,
    pub times: Vec<f64>,
    pub median: f64,
    pub energy: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// One warm-up, then [`TIMED_RUNS`] timed runs of compress + eigensolve.
pub fn time_model(prepared: &Prepared, spec: &ModelSpec, settings: &RunSettings) -> Result<SpeedEntry> {
    let mut entries = time_models(prepared, std::slice::from_ref(spec), settings)?;
    Ok(entries.remove(0))
}

/// Times several models on one Hamiltonian. Runs are interleaved round-robin
/// so slow drifts in machine load hit every model alike.
pub fn time_models(prepared: &Prepared, specs: &[ModelSpec], settings: &RunSettings) -> Result<Vec<SpeedEntry>> {
    let mut times = vec![Vec::with_capacity(TIMED_RUNS); specs.len()];
    let mut energies = vec![f64::NAN; specs.len()];
    for spec in specs {
        run_prepared(prepared, spec, settings)?;
    }
    for _ in 0..TIMED_RUNS {
        for (i, spec) in specs.iter().enumerate() {
            let run = run_prepared(prepared, spec, settings)?;
            times[i].push(run.wall_time);
            energies[i] = run.energy;
        }
    }
    Ok(specs
        .iter()
        .zip(times)
        .zip(energies)
        .map(|((spec, times), energy)| SpeedEntry {
            model: spec.model_name(),
            label: spec.hamiltonian_label.clone(),
            eigensolver: spec.eigensolver,
            depth: spec.depth,
            median: median(&times),
            times,
            energy,
        })
        .collect())
}

/// Speeds relative to a reference model, normalized per molecule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedReport {
    pub reference: String,
    pub entries: Vec<SpeedEntry>,
    /// `median(reference on same label) / median(entry)`.
    pub relative: Vec<f64>,
}

impl SpeedReport {
    pub fn new(entries: Vec<SpeedEntry>, reference: &str) -> Result<Self> {
        let mut relative = Vec::with_capacity(entries.len());
        for e in &entries {
            let base = entries
                .iter()
                .find(|r| r.model == reference && r.label == e.label)
                .ok_or_else(|| SbdError::IncompleteGrid(format!("no {reference} timing for {}", e.label)))?;
            relative.push(base.median / e.median);
        }
        Ok(SpeedReport {
            reference: reference.to_string(),
            entries,
            relative,
        })
    }

    /// `(depth, relative speed)` points for one solver.
    pub fn series(&self, solver: Eigensolver) -> Vec<(f64, f64)> {
        self.entries
            .iter()
            .zip(&self.relative)
            .filter(|(e, _)| e.eigensolver == solver)
            .map(|(e, &r)| (e.depth as f64, r))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedFit {
    pub a: f64,
    pub b: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

/// Least squares of `ln(speed) = ln(a) + b·depth`.
pub fn speed_fit(points: &[(f64, f64)]) -> Result<SpeedFit> {
    if points.len() < 3 {
        return Err(SbdError::DegenerateFit(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(&(d, s)) = points.iter().find(|(d, s)| !(s.is_finite() && *s > 0.0 && d.is_finite())) {
        return Err(SbdError::DegenerateFit(format!("point ({d}, {s}) cannot be log-fitted")));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(SbdError::DegenerateFit("all depths are equal".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
    let b = sxy / sxx;
    let ln_a = my - b * mx;
    let residual = (points
        .iter()
        .map(|p| (p.1.ln() - ln_a - b * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(SpeedFit {
        a: ln_a.exp(),
        b,
        residual,
    })
}
