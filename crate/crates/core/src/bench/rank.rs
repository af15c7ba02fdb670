use serde::{Deserialize, Serialize};

use super::{Eigensolver, ModelOutcome};
use crate::error::{Result, SbdError};

/// Which model's ordering counts as the truth.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferencePolicy {
    #[default]
    UncompressedDense,
    UncompressedVqe,
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingReport {
    pub reference: String,
    /// Model names in first-seen order.
    pub models: Vec<String>,
    pub solvers: Vec<Eigensolver>,
    pub depths: Vec<usize>,
    /// Molecule labels in first-seen order.
    pub molecules: Vec<String>,
    /// `energies[model][molecule]`, Hartree.
    pub energies: Vec<Vec<f64>>,
    /// Molecule labels sorted by ascending energy, per model.
    pub orderings: Vec<Vec<String>>,
    /// Fraction of all models (reference included) whose ordering matches the reference.
    pub match_rate: f64,
    /// Same fraction restricted to compressed models; `None` when there are none.
    pub sbd_match_rate: Option<f64>,
    /// Fraction of all models whose lowest molecule is the reference's.
    pub ground_hit_rate: f64,
    /// Same fraction restricted to compressed VQE models.
    pub sbd_vqe_hit_rate: Option<f64>,
}

impl RankingReport {
    pub fn model_index(&self, name: &str) -> Option<usize> {
        self.models.iter().position(|m| m == name)
    }
}

pub fn rank(outcomes: &[ModelOutcome], reference: &ReferencePolicy) -> Result<RankingReport> {
    let mut models: Vec<String> = Vec::new();
    let mut solvers = Vec::new();
    let mut depths = Vec::new();
    let mut molecules: Vec<String> = Vec::new();
    for o in outcomes {
        let spec = o.spec();
        let name = spec.model_name();
        if !models.contains(&name) {
            models.push(name);
            solvers.push(spec.eigensolver);
            depths.push(spec.depth);
        }
        if !molecules.contains(&spec.hamiltonian_label) {
            molecules.push(spec.hamiltonian_label.clone());
        }
    }
    if models.is_empty() || molecules.is_empty() {
        return Err(SbdError::IncompleteGrid("no models".into()));
    }

    let mut grid = vec![vec![None::<f64>; molecules.len()]; models.len()];
    for o in outcomes {
        let spec = o.spec();
        let i = models.iter().position(|m| *m == spec.model_name()).expect("seen above");
        let j = molecules.iter().position(|l| *l == spec.hamiltonian_label).expect("seen above");
        match o {
            ModelOutcome::Ok(run) => grid[i][j] = Some(run.energy),
            ModelOutcome::Failed { error, .. } => {
                return Err(SbdError::IncompleteGrid(format!(
                    "{} on {} failed: {error}",
                    models[i], molecules[j]
                )))
            }
        }
    }
    let mut energies = Vec::with_capacity(models.len());
    for (i, row) in grid.into_iter().enumerate() {
        let mut filled = Vec::with_capacity(row.len());
        for (j, e) in row.into_iter().enumerate() {
            filled.push(e.ok_or_else(|| {
                SbdError::IncompleteGrid(format!("{} has no result for {}", models[i], molecules[j]))
            })?);
        }
        energies.push(filled);
    }

    let ref_idx = match reference {
        ReferencePolicy::UncompressedDense => find(&solvers, &depths, Eigensolver::Dense),
        ReferencePolicy::UncompressedVqe => find(&solvers, &depths, Eigensolver::Vqe),
        ReferencePolicy::Named(n) => models.iter().position(|m| m == n),
    }
    .ok_or_else(|| SbdError::IncompleteGrid(format!("reference model {reference:?} missing from grid")))?;

    let orderings: Vec<Vec<String>> = energies
        .iter()
        .map(|row| {
            let mut idx: Vec<usize> = (0..row.len()).collect();
            idx.sort_by(|&a, &b| row[a].total_cmp(&row[b]));
            idx.into_iter().map(|j| molecules[j].clone()).collect()
        })
        .collect();
    let reference_order = &orderings[ref_idx];
    let matches = |i: usize| orderings[i] == *reference_order;
    let hits = |i: usize| orderings[i][0] == reference_order[0];

    let all: Vec<usize> = (0..models.len()).collect();
    let sbd: Vec<usize> = all.iter().copied().filter(|&i| depths[i] > 0).collect();
    let sbd_vqe: Vec<usize> = sbd.iter().copied().filter(|&i| solvers[i] == Eigensolver::Vqe).collect();

    Ok(RankingReport {
        reference: models[ref_idx].clone(),
        match_rate: fraction(&all, matches).expect("non-empty"),
        sbd_match_rate: fraction(&sbd, matches),
        ground_hit_rate: fraction(&all, hits).expect("non-empty"),
        sbd_vqe_hit_rate: fraction(&sbd_vqe, hits),
        models,
        solvers,
        depths,
        molecules,
        energies,
        orderings,
    })
}

fn find(solvers: &[Eigensolver], depths: &[usize], solver: Eigensolver) -> Option<usize> {
    (0..solvers.len()).find(|&i| solvers[i] == solver && depths[i] == 0)
}

fn fraction(set: &[usize], pred: impl Fn(usize) -> bool) -> Option<f64> {
    if set.is_empty() {
        None
    } else {
        Some(set.iter().filter(|&&i| pred(i)).count() as f64 / set.len() as f64)
    }
}
