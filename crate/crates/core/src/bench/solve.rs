use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use super::{Eigensolver, RunSettings};
use crate::eig::{krylov_extreme, LinearOperator, Which, DENSE_CAP};
use crate::error::{Result, SbdError};
use crate::hammat::SparseHermitian;
use crate::linalg::{hermitian_deviation, max_abs, Block};
use crate::vqe::{ansatz_state, optimize, qubits_for, RealObservable};

#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    Sparse(&'a SparseHermitian),
    Dense(&'a Block),
}

impl Operand<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Operand::Sparse(m) => m.dim(),
            Operand::Dense(b) => b.nrows(),
        }
    }

    fn residual(&self, v: &[Complex64], value: f64) -> f64 {
        let av = match self {
            Operand::Sparse(m) => m.apply(v),
            Operand::Dense(b) => LinearOperator::apply(*b, v),
        };
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        av.iter().zip(v).map(|(a, x)| (a - x * value).norm_sqr()).sum::<f64>().sqrt() / norm
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solved {
    pub value: f64,
    /// `‖Mv − λv‖ / ‖v‖` for the vector behind `value`.
    pub residual: f64,
    pub iterations: usize,
}

/// Smallest (or largest) eigenvalue with the chosen solver.
pub fn solve_extreme(op: Operand<'_>, solver: Eigensolver, smallest: bool, s: &RunSettings) -> Result<Solved> {
    match solver {
        Eigensolver::Dense => dense(op, smallest),
        Eigensolver::Krylov => {
            let which = if smallest { Which::Smallest } else { Which::Largest };
            let r = match op {
                Operand::Sparse(m) => krylov_extreme(m, which, &s.krylov)?,
                Operand::Dense(b) => krylov_extreme(b, which, &s.krylov)?,
            };
            Ok(Solved {
                value: r.value,
                residual: r.residual,
                iterations: r.iterations,
            })
        }
        Eigensolver::Vqe => vqe(op, smallest, s),
    }
}

fn dense(op: Operand<'_>, smallest: bool) -> Result<Solved> {
    if op.dim() > DENSE_CAP {
        return Err(SbdError::CapExceeded {
            what: "dense oracle dimension",
            size: op.dim(),
            cap: DENSE_CAP,
        });
    }
    let m = match op {
        Operand::Sparse(m) => m.to_dense(),
        Operand::Dense(b) => b.clone(),
    };
    let dev = hermitian_deviation(&m);
    if dev > 1e-8 * max_abs(&m).max(1.0) {
        return Err(SbdError::NotHermitian(dev));
    }
    let eig = SymmetricEigen::new(m);
    let pick = eig
        .eigenvalues
        .iter()
        .enumerate()
        .reduce(|a, b| {
            let better = if smallest { b.1 < a.1 } else { b.1 > a.1 };
            if better {
                b
            } else {
                a
            }
        })
        .map(|(i, _)| i)
        .ok_or(SbdError::ZeroMatrix)?;
    let value = eig.eigenvalues[pick];
    let v: Vec<Complex64> = eig.eigenvectors.column(pick).iter().copied().collect();
    Ok(Solved {
        value,
        residual: op.residual(&v, value),
        iterations: 1,
    })
}

fn vqe(op: Operand<'_>, smallest: bool, s: &RunSettings) -> Result<Solved> {
    let q = qubits_for(op.dim())?;
    let scale = if smallest { 1.0 } else { -1.0 };
    let obs = match op {
        Operand::Sparse(m) => {
            if !m.is_hermitian() {
                return Err(SbdError::NotHermitian(m.hermitian_deviation()));
            }
            RealObservable::from_sparse(m, scale)
        }
        Operand::Dense(b) => {
            let dev = hermitian_deviation(b);
            if dev > 1e-8 * max_abs(b).max(1.0) {
                return Err(SbdError::NotHermitian(dev));
            }
            RealObservable::from_dense(b, scale)
        }
    };
    let r = optimize(&obs, q, &s.vqe)?;
    let value = scale * r.energy;
    let psi: Vec<Complex64> = ansatz_state(q, &r.params)
        .into_iter()
        .map(|a| Complex64::new(a, 0.0))
        .collect();
    Ok(Solved {
        value,
        residual: op.residual(&psi, value),
        iterations: r.iterations,
    })
}
