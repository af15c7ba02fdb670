//! Restarted Arnoldi for general (possibly non-Hermitian) operators.
//!
//! Kept for diagnosing blocks whose Hermiticity has drifted; the compression
//! pipeline itself feeds Hermitian blocks to Lanczos.

use nalgebra::Schur;
use num_complex::Complex64;

use super::{dot, norm, start_vector, sub_scaled, EigMethod, EigResult, KrylovConfig, LinearOperator, Which};
use crate::blockops::Factored;
use crate::error::{Result, SbdError};
use crate::linalg::{Block, ZERO};

/// Extreme eigenvalue by real part. `value` is the real part of the Ritz value.
pub fn arnoldi_extreme<O: LinearOperator + ?Sized>(
    op: &O,
    which: Which,
    cfg: &KrylovConfig,
) -> Result<EigResult> {
    let n = op.dim();
    if n < 2 {
        return Err(SbdError::DomainError(format!("Arnoldi solver needs dim >= 2, got {n}")));
    }
    let m = cfg.subspace.clamp(2, n);
    let max_sweeps = cfg.max_iter.unwrap_or(10 * n).max(1);
    let scale = op.gershgorin_bound().max(f64::MIN_POSITIVE);
    let mut v = start_vector(n, cfg.seed);
    let mut iterations = 0;
    let mut last_residual = f64::INFINITY;

    for _ in 0..max_sweeps {
        let mut basis: Vec<Vec<Complex64>> = vec![v.clone()];
        let mut h = Block::zeros(m + 1, m);
        let mut k = 0;
        for j in 0..m {
            let mut w = op.apply(&basis[j]);
            iterations += 1;
            for _ in 0..2 {
                for (i, q) in basis.iter().enumerate() {
                    let hij = dot(q, &w);
                    h[(i, j)] += hij;
                    sub_scaled(&mut w, hij, q);
                }
            }
            k = j + 1;
            let beta = norm(&w);
            if j + 1 == m || beta <= 1e-13 * scale {
                break;
            }
            h[(j + 1, j)] = Complex64::new(beta, 0.0);
            basis.push(w.iter().map(|z| z / beta).collect());
        }

        let hk = h.view((0, 0), (k, k)).into_owned();
        let (_, t) = Schur::new(hk.clone()).unpack();
        let pick = t.diagonal().iter().copied().fold(None::<Complex64>, |best, z| match best {
            None => Some(z),
            Some(b) => {
                let better = match which {
                    Which::Largest => z.re > b.re,
                    Which::Smallest => z.re < b.re,
                };
                Some(if better { z } else { b })
            }
        });
        let theta = pick.expect("non-empty projection");
        let y = ritz_vector(&hk, theta);

        let mut x = vec![ZERO; n];
        for (q, &yi) in basis.iter().zip(y.iter()) {
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi += qi * yi;
            }
        }
        let xn = norm(&x);
        x.iter_mut().for_each(|z| *z /= xn);
        let ax = op.apply(&x);
        let residual = ax
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b * theta).norm_sqr())
            .sum::<f64>()
            .sqrt();
        last_residual = residual;
        if residual <= cfg.tol {
            return Ok(EigResult {
                value: theta.re,
                residual,
                iterations,
                method: EigMethod::Arnoldi,
            });
        }
        v = x;
    }
    Err(SbdError::NoConvergence {
        iterations,
        residual: last_residual,
    })
}

/// Eigenvector of the small Hessenberg matrix by two steps of inverse iteration.
fn ritz_vector(h: &Block, theta: Complex64) -> Vec<Complex64> {
    let k = h.nrows();
    let scale = h.iter().fold(0.0_f64, |acc, z| acc.max(z.norm())).max(1e-300);
    let mut shift = theta + Complex64::new(1e-10 * scale, 0.0);
    let mut y = Block::from_element(k, 1, Complex64::new(1.0, 0.0));
    for attempt in 0..3 {
        let shifted = h - Block::from_diagonal_element(k, k, shift);
        match Factored::new(&shifted) {
            Ok(f) => {
                for _ in 0..2 {
                    if let Ok(next) = f.solve(&y) {
                        let nn = next.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                        y = next.unscale(nn);
                    }
                }
                break;
            }
            Err(_) => shift += Complex64::new(1e-8 * scale * (attempt + 1) as f64, 0.0),
        }
    }
    y.iter().copied().collect()
}
