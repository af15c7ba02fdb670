//! Exact-statevector VQE with a layered RY + CZ-chain ansatz.
//!
//! The ansatz only ever produces real amplitudes, so the energy of a Hermitian
//! `m` reduces to `ψᵀ·Re(m)·ψ` and the whole simulation runs in `f64`.

mod decompose;

use log::debug;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SbdError};
use crate::hammat::{seeded_rng, SparseHermitian};
use crate::linalg::{hermitian_deviation, max_abs, Block};

pub use decompose::{pauli_decompose, DECOMPOSE_QUBIT_CAP};

pub const VQE_QUBIT_CAP: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    #[default]
    ParameterShift,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VqeConfig {
    pub layers: usize,
    pub max_iters: usize,
    pub learning_rate: f64,
    /// Stop once successive energies differ by less than this.
    pub tol: f64,
    pub seed: u64,
    pub gradient: GradientMethod,
    /// Independent runs from fresh random angles; the best is kept.
    pub restarts: usize,
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig {
            layers: 3,
            max_iters: 500,
            learning_rate: 0.05,
            tol: 1e-6,
            seed: 0,
            gradient: GradientMethod::ParameterShift,
            restarts: 3,
        }
    }
}

impl VqeConfig {
    pub fn with_seed(seed: u64) -> Self {
        VqeConfig {
            seed,
            ..VqeConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.layers < 1 {
            return Err(SbdError::DomainError("VQE needs at least one layer".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(SbdError::DomainError(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.restarts < 1 {
            return Err(SbdError::DomainError("VQE needs at least one run".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    /// Lowest energy seen over all runs.
    pub energy: f64,
    pub params: Vec<f64>,
    /// Optimizer steps taken by the winning run.
    pub iterations: usize,
    pub energy_trace: Vec<f64>,
    /// False when the winning run hit `max_iters` still moving by more than `tol`.
    pub converged: bool,
}

/// Real part of a Hermitian matrix, optionally negated, stored sparse or dense.
#[derive(Debug, Clone)]
pub struct RealObservable {
    dim: usize,
    storage: Storage,
}

#[derive(Debug, Clone)]
enum Storage {
    Csr {
        indptr: Vec<usize>,
        indices: Vec<usize>,
        data: Vec<f64>,
    },
    /// Row-major.
    Dense(Vec<f64>),
}

impl RealObservable {
    pub fn from_sparse(m: &SparseHermitian, scale: f64) -> Self {
        let mut indptr = Vec::with_capacity(m.dim() + 1);
        let mut indices = Vec::with_capacity(m.nnz());
        let mut data = Vec::with_capacity(m.nnz());
        indptr.push(0);
        for i in 0..m.dim() {
            for k in m.indptr()[i]..m.indptr()[i + 1] {
                let v = m.data()[k].re;
                if v != 0.0 {
                    indices.push(m.indices()[k]);
                    data.push(scale * v);
                }
            }
            indptr.push(indices.len());
        }
        RealObservable {
            dim: m.dim(),
            storage: Storage::Csr { indptr, indices, data },
        }
    }

    pub fn from_dense(m: &Block, scale: f64) -> Self {
        let n = m.nrows();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            data.extend((0..n).map(|j| scale * m[(i, j)].re));
        }
        RealObservable {
            dim: n,
            storage: Storage::Dense(data),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn expectation(&self, psi: &[f64]) -> f64 {
        match &self.storage {
            Storage::Csr { indptr, indices, data } => (0..self.dim)
                .map(|i| {
                    let row: f64 = (indptr[i]..indptr[i + 1]).map(|k| data[k] * psi[indices[k]]).sum();
                    psi[i] * row
                })
                .sum(),
            Storage::Dense(data) => data
                .chunks_exact(self.dim)
                .zip(psi)
                .map(|(row, &p)| p * row.iter().zip(psi).map(|(a, b)| a * b).sum::<f64>())
                .sum(),
        }
    }
}

/// Statevector for the ansatz at angles `theta` (`layers × n_qubits`, layer-major).
pub fn ansatz_state(n_qubits: usize, theta: &[f64]) -> Vec<f64> {
    let dim = 1usize << n_qubits;
    let mut psi = vec![0.0; dim];
    psi[0] = 1.0;
    for layer in theta.chunks(n_qubits) {
        for (k, &angle) in layer.iter().enumerate() {
            apply_ry(&mut psi, n_qubits, k, angle);
        }
        for k in 0..n_qubits.saturating_sub(1) {
            apply_cz(&mut psi, n_qubits, k, k + 1);
        }
    }
    psi
}

/// Qubit 0 is the most significant bit.
fn apply_ry(psi: &mut [f64], n_qubits: usize, qubit: usize, angle: f64) {
    let bit = 1usize << (n_qubits - 1 - qubit);
    let (s, c) = (angle / 2.0).sin_cos();
    for i in 0..psi.len() {
        if i & bit == 0 {
            let (a0, a1) = (psi[i], psi[i | bit]);
            psi[i] = c * a0 - s * a1;
            psi[i | bit] = s * a0 + c * a1;
        }
    }
}

fn apply_cz(psi: &mut [f64], n_qubits: usize, q1: usize, q2: usize) {
    let mask = (1usize << (n_qubits - 1 - q1)) | (1usize << (n_qubits - 1 - q2));
    for (i, amp) in psi.iter_mut().enumerate() {
        if i & mask == mask {
            *amp = -*amp;
        }
    }
}

pub fn energy(obs: &RealObservable, n_qubits: usize, theta: &[f64]) -> f64 {
    obs.expectation(&ansatz_state(n_qubits, theta))
}

/// Exact gradient: every generator is `Y/2`, so a ±π/2 shift gives the derivative.
pub fn parameter_shift_gradient(obs: &RealObservable, n_qubits: usize, theta: &[f64]) -> Vec<f64> {
    let mut shifted = theta.to_vec();
    (0..theta.len())
        .map(|k| {
            shifted[k] = theta[k] + std::f64::consts::FRAC_PI_2;
            let plus = energy(obs, n_qubits, &shifted);
            shifted[k] = theta[k] - std::f64::consts::FRAC_PI_2;
            let minus = energy(obs, n_qubits, &shifted);
            shifted[k] = theta[k];
            0.5 * (plus - minus)
        })
        .collect()
}

/// Central differences with step `h`.
pub fn finite_difference_gradient(obs: &RealObservable, n_qubits: usize, theta: &[f64], h: f64) -> Vec<f64> {
    let mut shifted = theta.to_vec();
    (0..theta.len())
        .map(|k| {
            shifted[k] = theta[k] + h;
            let plus = energy(obs, n_qubits, &shifted);
            shifted[k] = theta[k] - h;
            let minus = energy(obs, n_qubits, &shifted);
            shifted[k] = theta[k];
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// Qubit count for a power-of-two dimension within the simulator cap.
pub fn qubits_for(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(SbdError::NotPowerOfTwo(dim));
    }
    let q = dim.trailing_zeros() as usize;
    if q > VQE_QUBIT_CAP {
        return Err(SbdError::CapExceeded {
            what: "VQE qubit count",
            size: q,
            cap: VQE_QUBIT_CAP,
        });
    }
    Ok(q)
}

/// Minimizes the ansatz energy of a sparse Hermitian matrix.
pub fn vqe_minimize(m: &SparseHermitian, cfg: &VqeConfig) -> Result<VqeResult> {
    check_hermitian(m.hermitian_deviation(), m.max_abs())?;
    let q = qubits_for(m.dim())?;
    optimize(&RealObservable::from_sparse(m, 1.0), q, cfg)
}

pub fn vqe_minimize_dense(m: &Block, cfg: &VqeConfig) -> Result<VqeResult> {
    let q = qubits_for(m.nrows())?;
    check_hermitian(hermitian_deviation(m), max_abs(m))?;
    optimize(&RealObservable::from_dense(m, 1.0), q, cfg)
}

/// Largest eigenvalue estimate: minimizes `⟨−m⟩` and negates.
pub fn vqe_maximize_dense(m: &Block, cfg: &VqeConfig) -> Result<VqeResult> {
    let q = qubits_for(m.nrows())?;
    check_hermitian(hermitian_deviation(m), max_abs(m))?;
    let mut r = optimize(&RealObservable::from_dense(m, -1.0), q, cfg)?;
    r.energy = -r.energy;
    r.energy_trace.iter_mut().for_each(|e| *e = -*e);
    Ok(r)
}

fn check_hermitian(dev: f64, scale: f64) -> Result<()> {
    if dev > 1e-8 * scale.max(1.0) {
        return Err(SbdError::NotHermitian(dev));
    }
    Ok(())
}

/// Runs every restart and keeps the lowest energy, ties to the earliest run.
pub fn optimize(obs: &RealObservable, n_qubits: usize, cfg: &VqeConfig) -> Result<VqeResult> {
    cfg.validate()?;
    let runs: Vec<VqeResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| single_run(obs, n_qubits, cfg, cfg.seed.wrapping_add(r as u64)))
        .collect();
    let best = runs
        .into_iter()
        .reduce(|best, r| if r.energy < best.energy { r } else { best })
        .expect("at least one run");
    debug!(
        "vqe q={n_qubits}: energy {:.10} after {} iterations (converged: {})",
        best.energy, best.iterations, best.converged
    );
    Ok(best)
}

fn single_run(obs: &RealObservable, n_qubits: usize, cfg: &VqeConfig, seed: u64) -> VqeResult {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    let n_params = cfg.layers * n_qubits;
    let mut rng = seeded_rng(seed);
    let mut theta: Vec<f64> = (0..n_params)
        .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect();
    let mut m1 = vec![0.0; n_params];
    let mut m2 = vec![0.0; n_params];

    let mut current = energy(obs, n_qubits, &theta);
    let mut best = (current, theta.clone());
    let mut trace = vec![current];
    let mut converged = false;
    let mut iterations = 0;
    for t in 1..=cfg.max_iters {
        let grad = match cfg.gradient {
            GradientMethod::ParameterShift => parameter_shift_gradient(obs, n_qubits, &theta),
            GradientMethod::FiniteDifference => finite_difference_gradient(obs, n_qubits, &theta, 1e-5),
        };
        let bc1 = 1.0 - BETA1.powi(t as i32);
        let bc2 = 1.0 - BETA2.powi(t as i32);
        for k in 0..n_params {
            m1[k] = BETA1 * m1[k] + (1.0 - BETA1) * grad[k];
            m2[k] = BETA2 * m2[k] + (1.0 - BETA2) * grad[k] * grad[k];
            theta[k] -= cfg.learning_rate * (m1[k] / bc1) / ((m2[k] / bc2).sqrt() + EPS);
        }
        let next = energy(obs, n_qubits, &theta);
        trace.push(next);
        iterations = t;
        if next < best.0 {
            best = (next, theta.clone());
        }
        let change = (next - current).abs();
        current = next;
        if change < cfg.tol {
            converged = true;
            break;
        }
    }
    VqeResult {
        energy: best.0,
        params: best.1,
        iterations,
        energy_trace: trace,
        converged,
    }
}
