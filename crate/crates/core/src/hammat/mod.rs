//! Hamiltonian data model: Pauli-term ingestion, sparse realization, padding
//! and synthetic instance generators.

mod generators;
mod mtx;
mod pauli;
mod sparse;

use std::path::Path;

pub use generators::{
    commuting_block_from, commuting_roots, gen_commuting_block, gen_commuting_dense, gen_tfim,
    random_hermitian, random_psd, seeded_rng, CommutingCoeffs,
};
pub use mtx::{read_mtx, read_mtx_str, write_mtx, write_mtx_string};
pub use pauli::{
    realize, realize_capped, Pauli, PauliTerm, QubitHamiltonian, DEFAULT_QUBIT_CAP,
};
pub(crate) use pauli::WordMasks;
pub use sparse::{default_pad_value, CsrLayout, SparseHermitian, HERMITIAN_TOL};

use crate::error::{Result, SbdError};

/// A raw input matrix together with the label it should carry downstream.
#[derive(Debug, Clone)]
pub struct LoadedMatrix {
    pub label: String,
    pub matrix: SparseHermitian,
    /// Present when the input was a Pauli-term file.
    pub hamiltonian: Option<QubitHamiltonian>,
}

/// Loads either a Pauli-term JSON file or a Matrix Market file, chosen by
/// extension (`.mtx` → Matrix Market, anything else → JSON).
pub fn load_matrix(path: impl AsRef<Path>, qubit_cap: usize) -> Result<LoadedMatrix> {
    let path = path.as_ref();
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx")) {
        let matrix = read_mtx(path)?;
        if !matrix.is_hermitian() {
            return Err(SbdError::NotHermitian(matrix.hermitian_deviation()));
        }
        let cap = 1usize << qubit_cap;
        if matrix.dim() > cap {
            return Err(SbdError::CapExceeded {
                what: "matrix dimension",
                size: matrix.dim(),
                cap,
            });
        }
        Ok(LoadedMatrix {
            label: stem,
            matrix,
            hamiltonian: None,
        })
    } else {
        let h = QubitHamiltonian::load(path)?;
        let matrix = realize_capped(&h, qubit_cap)?;
        Ok(LoadedMatrix {
            label: if h.label.is_empty() { stem } else { h.label.clone() },
            matrix,
            hamiltonian: Some(h),
        })
    }
}
