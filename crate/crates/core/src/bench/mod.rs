//! Experiment harness: single-model runs, energy ranking, timing and fits.

mod rank;
mod report;
mod solve;
mod speed;

use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::eig::KrylovConfig;
use crate::error::{Result, SbdError};
use crate::hammat::{load_matrix, LoadedMatrix, SparseHermitian, DEFAULT_QUBIT_CAP};
use crate::sbd::{compress, BranchPolicy, CompressOptions, SbdConfig};
use crate::vqe::VqeConfig;

pub use rank::{rank, RankingReport, ReferencePolicy};
pub use report::{
    error_table, ground_state_table, ranking_csv, ranking_table, results_csv, speed_table, ResultRow,
};
pub use solve::{solve_extreme, Operand, Solved};
pub use speed::{median, speed_fit, time_model, time_models, SpeedEntry, SpeedFit, SpeedReport, TIMED_RUNS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eigensolver {
    Dense,
    Krylov,
    Vqe,
}

impl Eigensolver {
    pub fn as_str(self) -> &'static str {
        match self {
            Eigensolver::Dense => "dense",
            Eigensolver::Krylov => "krylov",
            Eigensolver::Vqe => "vqe",
        }
    }
}

impl std::str::FromStr for Eigensolver {
    type Err = SbdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Eigensolver::Dense),
            "krylov" => Ok(Eigensolver::Krylov),
            "vqe" => Ok(Eigensolver::Vqe),
            other => Err(SbdError::Parse(format!("unknown eigensolver {other:?}"))),
        }
    }
}

/// Per-model tweaks on top of the run-wide settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<BranchPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vqe_layers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vqe_max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vqe_learning_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vqe_restarts: Option<usize>,
}

/// One cell of an experiment grid: a Hamiltonian, a solver and a depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// Grouping key for ranking; defaults to `{eigensolver}-d{depth}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub hamiltonian_label: String,
    pub source: PathBuf,
    pub eigensolver: Eigensolver,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "is_default")]
    pub overrides: Overrides,
}

fn is_default(o: &Overrides) -> bool {
    *o == Overrides::default()
}

impl ModelSpec {
    pub fn new(label: impl Into<String>, source: impl Into<PathBuf>, eigensolver: Eigensolver, depth: usize) -> Self {
        ModelSpec {
            model: None,
            hamiltonian_label: label.into(),
            source: source.into(),
            eigensolver,
            depth,
            overrides: Overrides::default(),
        }
    }

    pub fn model_name(&self) -> String {
        self.model
            .clone()
            .unwrap_or_else(|| format!("{}-d{}", self.eigensolver.as_str(), self.depth))
    }
}

/// Reads a manifest; relative sources resolve against the manifest's directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ModelSpec>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut specs: Vec<ModelSpec> =
        serde_json::from_str(&text).map_err(|e| SbdError::Parse(format!("manifest {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    for s in &mut specs {
        if s.source.is_relative() {
            s.source = base.join(&s.source);
        }
    }
    Ok(specs)
}

/// Run-wide solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub krylov: KrylovConfig,
    pub vqe: VqeConfig,
    pub sbd: SbdConfig,
    pub sign: i8,
    pub qubit_cap: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            krylov: KrylovConfig::default(),
            vqe: VqeConfig::default(),
            sbd: SbdConfig::default(),
            sign: -1,
            qubit_cap: DEFAULT_QUBIT_CAP,
        }
    }
}

impl RunSettings {
    pub fn with_seed(seed: u64) -> Self {
        let mut s = RunSettings::default();
        s.set_seed(seed);
        s
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.krylov.seed = seed;
        self.vqe.seed = seed;
    }

    /// Literal pipeline: all-`Γ₀` path and no square-root fallback.
    pub fn strict(mut self) -> Self {
        self.sbd = SbdConfig::strict();
        self
    }

    pub fn apply(&self, o: &Overrides) -> RunSettings {
        let mut s = *self;
        if let Some(seed) = o.seed {
            s.set_seed(seed);
        }
        if let Some(tol) = o.tol {
            s.krylov.tol = tol;
        }
        if let Some(sign) = o.sign {
            s.sign = sign;
        }
        if let Some(b) = o.branch {
            s.sbd.branch = b;
        }
        if let Some(v) = o.vqe_layers {
            s.vqe.layers = v;
        }
        if let Some(v) = o.vqe_max_iters {
            s.vqe.max_iters = v;
        }
        if let Some(v) = o.vqe_learning_rate {
            s.vqe.learning_rate = v;
        }
        if let Some(v) = o.vqe_restarts {
            s.vqe.restarts = v;
        }
        s
    }
}

/// A loaded, padded Hamiltonian ready for timed runs.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub label: String,
    pub matrix: SparseHermitian,
}

/// Loads and pads; padding sits beyond the targeted end of the spectrum.
pub fn prepare(source: &Path, label: &str, sign: i8, qubit_cap: usize) -> Result<Prepared> {
    let mut loaded = load_matrix(source, qubit_cap)?;
    loaded.label = label.to_string();
    Ok(prepare_loaded(loaded, sign))
}

pub fn prepare_loaded(loaded: LoadedMatrix, sign: i8) -> Prepared {
    let pad = loaded.matrix.gershgorin_bound() + 1.0;
    Prepared {
        label: loaded.label,
        matrix: loaded.matrix.pad_to_pow2(if sign < 0 { pad } else { -pad }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelRun {
    pub spec: ModelSpec,
    /// Dimension handed to the eigensolver.
    pub matrix_dim: usize,
    pub energy: f64,
    pub residual: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelOutcome {
    Ok(ModelRun),
    Failed { spec: ModelSpec, error: String },
}

impl ModelOutcome {
    pub fn spec(&self) -> &ModelSpec {
        match self {
            ModelOutcome::Ok(r) => &r.spec,
            ModelOutcome::Failed { spec, .. } => spec,
        }
    }

    pub fn run(&self) -> Option<&ModelRun> {
        match self {
            ModelOutcome::Ok(r) => Some(r),
            ModelOutcome::Failed { .. } => None,
        }
    }
}

/// Compress (when `depth > 0`), eigensolve and recover; times exactly that span.
pub fn run_prepared(prepared: &Prepared, spec: &ModelSpec, settings: &RunSettings) -> Result<ModelRun> {
    let s = settings.apply(&spec.overrides);
    let start = Instant::now();
    let (solved, matrix_dim) = if spec.depth == 0 {
        let solved = solve_extreme(Operand::Sparse(&prepared.matrix), spec.eigensolver, s.sign < 0, &s)?;
        (solved, prepared.matrix.dim())
    } else {
        let opts = CompressOptions::new(spec.depth)
            .with_sign(s.sign)
            .with_label(prepared.label.clone());
        let c = compress(&prepared.matrix, &opts, &s.sbd)?;
        let top = solve_extreme(Operand::Dense(&c.block), spec.eigensolver, false, &s)?;
        let value = c.recover(top.value)?;
        (Solved { value, ..top }, c.block.nrows())
    };
    let wall_time = start.elapsed().as_secs_f64();
    Ok(ModelRun {
        spec: spec.clone(),
        matrix_dim,
        energy: solved.value,
        residual: solved.residual,
        wall_time,
    })
}

pub fn run_model(spec: &ModelSpec, settings: &RunSettings) -> Result<ModelRun> {
    let s = settings.apply(&spec.overrides);
    let prepared = prepare(&spec.source, &spec.hamiltonian_label, s.sign, s.qubit_cap)?;
    run_prepared(&prepared, spec, settings)
}

/// Runs every model in order; failures are recorded, never dropped.
pub fn run_manifest(specs: &[ModelSpec], settings: &RunSettings) -> Vec<ModelOutcome> {
    specs
        .iter()
        .map(|spec| match run_model(spec, settings) {
            Ok(run) => {
                info!(
                    "{} {}: energy {:.10} in {:.4}s",
                    spec.model_name(),
                    spec.hamiltonian_label,
                    run.energy,
                    run.wall_time
                );
                ModelOutcome::Ok(run)
            }
            Err(e) => {
                warn!("{} {} failed: {e}", spec.model_name(), spec.hamiltonian_label);
                ModelOutcome::Failed {
                    spec: spec.clone(),
                    error: e.to_string(),
                }
            }
        })
        .collect()
}

/// The `{dense, krylov, vqe} × depths` grid over a set of labelled sources.
pub fn model_grid(sources: &[(String, PathBuf)], depths: &[usize]) -> Vec<ModelSpec> {
    let mut specs = Vec::new();
    for solver in [Eigensolver::Dense, Eigensolver::Krylov, Eigensolver::Vqe] {
        for &depth in depths {
            for (label, path) in sources {
                specs.push(ModelSpec::new(label.clone(), path.clone(), solver, depth));
            }
        }
    }
    specs
}
