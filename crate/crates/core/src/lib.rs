//! Recursive block compression of Hermitian qubit Hamiltonians.

pub mod bench;
pub mod blockops;
pub mod eig;
pub mod error;
pub mod hammat;
pub mod linalg;
pub mod matsqrt;
pub mod sbd;
pub mod vqe;

pub use error::{Result, SbdError};

pub use bench::{Eigensolver, ModelSpec, RunSettings};
pub use eig::{EigResult, KrylovConfig, Which};
pub use hammat::{PauliTerm, QubitHamiltonian, SparseHermitian};
pub use linalg::Block;
pub use sbd::{BranchPolicy, CompressOptions, CompressedHamiltonian, CompressionStep, SbdConfig};
pub use vqe::{VqeConfig, VqeResult};
