//! Principal matrix square root by a fixed number of Newton steps
//! `A ← ½(A + M·A⁻¹)` from the seed `A₀ = (Tr M)^{1/4}·I`.
//!
//! The recurrence carries an explicit inverse (it is not the inverse-free
//! Newton–Schulz scheme). When enabled, a residual check reruns small inputs
//! through a dense Schur-based principal root.

use log::warn;
use nalgebra::Schur;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blockops::Factored;
use crate::error::{Result, SbdError};
use crate::linalg::{frobenius, matmul, trace, Block, ZERO};

/// Relative residual `‖A² − M‖_F / ‖M‖_F` above which the fallback triggers.
pub const RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqrtConfig {
    /// Number of Newton updates after the seed.
    pub iterations: usize,
    pub residual_check: bool,
    /// Largest dimension for which the dense fallback may run.
    pub fallback_dim_cap: usize,
}

impl Default for SqrtConfig {
    fn default() -> Self {
        SqrtConfig {
            iterations: 6,
            residual_check: true,
            fallback_dim_cap: 512,
        }
    }
}

impl SqrtConfig {
    /// Exactly the printed recurrence: no residual check, no fallback.
    pub fn strict() -> Self {
        SqrtConfig {
            residual_check: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SqrtResult {
    pub root: Block,
    /// Relative residual of the returned root.
    pub residual: f64,
    /// The dense fallback produced `root`.
    pub fallback: bool,
    /// The fallback saw eigenvalues on the negative real axis.
    pub branch_cut: bool,
}

pub fn newton_sqrt(m: &Block, cfg: &SqrtConfig) -> Result<SqrtResult> {
    if !m.is_square() || m.nrows() == 0 {
        return Err(SbdError::DimensionMismatch("square root needs a non-empty square matrix".into()));
    }
    if cfg.iterations == 0 {
        return Err(SbdError::DomainError("at least one Newton iteration is required".into()));
    }
    let n = m.nrows();
    let tr = trace(m);
    if tr.norm() < 1e-14 {
        return Err(SbdError::SeedDegenerate(tr.norm()));
    }
    let fallback_allowed = cfg.residual_check && n <= cfg.fallback_dim_cap;

    match newton_iterate(m, tr, cfg.iterations) {
        Ok(root) => {
            let residual = relative_residual(m, &root);
            if cfg.residual_check && !(residual <= RESIDUAL_TOL) {
                if fallback_allowed {
                    return dense_fallback(m);
                }
                warn!("Newton square root residual {residual:e} above tolerance at dim {n}; fallback disabled above dim {}", cfg.fallback_dim_cap);
            }
            Ok(SqrtResult {
                root,
                residual,
                fallback: false,
                branch_cut: false,
            })
        }
        Err(step) if fallback_allowed => {
            warn!("Newton square root iterate {step} singular; using dense fallback");
            dense_fallback(m)
        }
        Err(step) => Err(SbdError::IterationSingular(step)),
    }
}

/// Runs the fixed-count recurrence; returns the failing step on a singular iterate.
fn newton_iterate(m: &Block, tr: Complex64, iterations: usize) -> std::result::Result<Block, usize> {
    let n = m.nrows();
    let seed = tr.powf(0.25);
    let mut a = Block::from_diagonal_element(n, n, seed);
    let m_t = m.transpose();
    for step in 0..iterations {
        // M·A⁻¹ = X with X·A = M, i.e. Aᵀ·Xᵀ = Mᵀ.
        let fac = Factored::new(&a.transpose()).map_err(|_| step)?;
        let x = fac.solve(&m_t).map_err(|_| step)?.transpose();
        a = (a + x).scale(0.5);
        if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(step);
        }
    }
    Ok(a)
}

pub fn relative_residual(m: &Block, root: &Block) -> f64 {
    let scale = frobenius(m);
    let r = frobenius(&(matmul(root, root) - m));
    if scale == 0.0 {
        r
    } else {
        r / scale
    }
}

/// Principal square root through a complex Schur form `M = Q·T·Q†`, with the
/// triangular root built column by column.
pub fn dense_principal_sqrt(m: &Block) -> (Block, bool) {
    let n = m.nrows();
    let (q, t) = Schur::new(m.clone()).unpack();
    let scale = t.diagonal().iter().fold(0.0_f64, |acc, z| acc.max(z.norm())).max(1e-300);
    let mut branch_cut = false;
    let mut u = Block::zeros(n, n);
    for i in 0..n {
        let lam = t[(i, i)];
        if lam.re < 0.0 && lam.im.abs() <= 1e-12 * scale {
            branch_cut = true;
        }
        u[(i, i)] = lam.sqrt();
    }
    for j in 1..n {
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= u[(i, k)] * u[(k, j)];
            }
            let denom = u[(i, i)] + u[(j, j)];
            u[(i, j)] = if denom == ZERO { ZERO } else { s / denom };
        }
    }
    (matmul(&matmul(&q, &u), &q.adjoint()), branch_cut)
}

fn dense_fallback(m: &Block) -> Result<SqrtResult> {
    let (root, branch_cut) = dense_principal_sqrt(m);
    if branch_cut {
        warn!("square-root argument has eigenvalues on the negative real axis; principal branch is ambiguous");
    }
    let residual = relative_residual(m, &root);
    Ok(SqrtResult {
        root,
        residual,
        fallback: true,
        branch_cut,
    })
}
