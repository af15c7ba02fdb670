//! Explicitly restarted Lanczos with full reorthogonalization.
//!
//! Each sweep builds a Krylov basis from the current vector, diagonalizes the
//! real tridiagonal projection and restarts from the best Ritz vector. The
//! residual reported is computed explicitly from the operator, not estimated.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{
    dot, norm, start_vector, sub_scaled, EigMethod, EigResult, KrylovConfig, LinearOperator,
    Shifted, Which,
};
use crate::error::{Result, SbdError};
use crate::linalg::ZERO;

/// Hermiticity tolerance for Krylov input, relative to the Gershgorin bound.
const HERMITIAN_TOL: f64 = 1e-8;

pub fn krylov_extreme<O: LinearOperator + ?Sized>(
    op: &O,
    which: Which,
    cfg: &KrylovConfig,
) -> Result<EigResult> {
    let n = op.dim();
    if n < 2 {
        return Err(SbdError::DomainError(format!("Krylov solver needs dim >= 2, got {n}")));
    }
    let bound = op.gershgorin_bound();
    let dev = op.hermitian_deviation();
    if dev > HERMITIAN_TOL * bound.max(1.0) {
        return Err(SbdError::NotHermitian(dev));
    }
    match which {
        Which::Largest => lanczos_largest(op, cfg),
        Which::Smallest => {
            // λ_min(A) = σ − λ_max(σI − A) with σ at the Gershgorin bound.
            let shifted = Shifted { inner: op, sigma: bound };
            let r = lanczos_largest(&shifted, cfg)?;
            Ok(EigResult {
                value: bound - r.value,
                ..r
            })
        }
    }
}

/// Ground-state energy with default settings and the given seed.
pub fn smallest_eigenvalue<O: LinearOperator + ?Sized>(op: &O, seed: u64) -> Result<EigResult> {
    krylov_extreme(
        op,
        Which::Smallest,
        &KrylovConfig {
            seed,
            ..KrylovConfig::default()
        },
    )
}

fn lanczos_largest<O: LinearOperator + ?Sized>(op: &O, cfg: &KrylovConfig) -> Result<EigResult> {
    let n = op.dim();
    let m = cfg.subspace.clamp(2, n);
    let max_sweeps = cfg.max_iter.unwrap_or(10 * n).max(1);
    let scale = op.gershgorin_bound().max(f64::MIN_POSITIVE);
    let mut v = start_vector(n, cfg.seed);
    let mut iterations = 0;
    let mut last_residual = f64::INFINITY;

    for _ in 0..max_sweeps {
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
        let mut alphas = Vec::with_capacity(m);
        let mut betas: Vec<f64> = Vec::with_capacity(m);
        basis.push(v.clone());
        let mut w = vec![ZERO; n];
        for j in 0..m {
            op.apply_into(&basis[j], &mut w);
            iterations += 1;
            let alpha = dot(&basis[j], &w).re;
            alphas.push(alpha);
            // Two passes of classical Gram-Schmidt against the whole basis.
            for _ in 0..2 {
                for q in &basis {
                    let h = dot(q, &w);
                    sub_scaled(&mut w, h, q);
                }
            }
            let beta = norm(&w);
            if j + 1 == m || beta <= 1e-13 * scale {
                break;
            }
            betas.push(beta);
            basis.push(w.iter().map(|z| z / beta).collect());
        }

        let k = alphas.len();
        let t = DMatrix::<f64>::from_fn(k, k, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let best = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("non-empty projection");
        let y = eig.eigenvectors.column(best);

        let mut x = vec![ZERO; n];
        for (q, &yi) in basis.iter().zip(y.iter()) {
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi += qi * yi;
            }
        }
        let xn = norm(&x);
        x.iter_mut().for_each(|z| *z /= xn);

        let ax = op.apply(&x);
        let rayleigh = dot(&x, &ax).re;
        let residual = ax
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b * rayleigh).norm_sqr())
            .sum::<f64>()
            .sqrt();
        last_residual = residual;
        if residual <= cfg.tol {
            return Ok(EigResult {
                value: rayleigh,
                residual,
                iterations,
                method: EigMethod::Krylov,
            });
        }
        v = x;
    }
    Err(SbdError::NoConvergence {
        iterations,
        residual: last_residual,
    })
}
