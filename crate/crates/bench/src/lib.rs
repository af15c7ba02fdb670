//! Shared fixtures for the criterion benches.

use std::path::PathBuf;

use sbd_core::bench::{prepare, Prepared};
use sbd_core::hammat::DEFAULT_QUBIT_CAP;

/// Path of a bundled PAH Hamiltonian, e.g. `pah_fixture("pyrene", "4_4")`.
pub fn pah_fixture(molecule: &str, active: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/pah")
        .join(format!("{molecule}_{active}.json"))
}

/// Loaded and padded for ground-state runs.
pub fn load_pah(molecule: &str, active: &str) -> Prepared {
    prepare(&pah_fixture(molecule, active), molecule, -1, DEFAULT_QUBIT_CAP).expect("bundled fixture loads")
}
