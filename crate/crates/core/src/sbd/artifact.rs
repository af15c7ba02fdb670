//! The `sbd-v1` JSON artifact for compressed Hamiltonians.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CompressedHamiltonian, CompressionStep};
use crate::error::{Result, SbdError};
use crate::hammat::{CsrLayout, SparseHermitian};

pub const ARTIFACT_FORMAT: &str = "sbd-v1";

pub type ArtifactStep = CompressionStep;

/// On-disk form; field order is the serialized order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressedArtifact {
    pub format: String,
    pub label: String,
    pub original_dim: usize,
    pub sign: i8,
    pub steps: Vec<ArtifactStep>,
    pub block: CsrLayout,
}

impl CompressedArtifact {
    pub fn from_compressed(c: &CompressedHamiltonian) -> Result<Self> {
        let sparse = SparseHermitian::from_dense(&c.block)?;
        Ok(CompressedArtifact {
            format: ARTIFACT_FORMAT.to_string(),
            label: c.label.clone(),
            original_dim: c.original_dim,
            sign: c.sign,
            steps: c.steps.clone(),
            block: sparse.to_layout(),
        })
    }

    pub fn into_compressed(self) -> Result<CompressedHamiltonian> {
        if self.format != ARTIFACT_FORMAT {
            return Err(SbdError::Parse(format!("unsupported artifact format {:?}", self.format)));
        }
        if self.sign != 1 && self.sign != -1 {
            return Err(SbdError::Parse(format!("artifact sign must be +1 or -1, got {}", self.sign)));
        }
        if let Some(s) = self.steps.iter().find(|s| !(s.n_scale > 0.0) || s.branch > 1) {
            return Err(SbdError::Parse(format!("invalid compression step {s:?}")));
        }
        let block = SparseHermitian::from_layout(&self.block)?.to_dense();
        let expected = self.original_dim >> self.steps.len();
        if block.nrows() << self.steps.len() != self.original_dim || expected == 0 {
            return Err(SbdError::Parse(format!(
                "block dim {} with {} steps does not match original dim {}",
                block.nrows(),
                self.steps.len(),
                self.original_dim
            )));
        }
        Ok(CompressedHamiltonian {
            block,
            steps: self.steps,
            original_dim: self.original_dim,
            sign: self.sign,
            label: self.label,
        })
    }
}

impl CompressedHamiltonian {
    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&CompressedArtifact::from_compressed(self)?)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let artifact: CompressedArtifact =
            serde_json::from_str(s).map_err(|e| SbdError::Parse(format!("artifact: {e}")))?;
        artifact.into_compressed()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}
