//! Extreme-eigenvalue solvers and the dense verification oracle.

mod arnoldi;
mod dense;
mod lanczos;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hammat::SparseHermitian;
use crate::linalg::{Block, ZERO};

pub use arnoldi::arnoldi_extreme;
pub use dense::{dense_oracle, dense_spectrum, dense_spectrum_general, DENSE_CAP};
pub use lanczos::{krylov_extreme, smallest_eigenvalue};

/// Anything that can apply itself to a vector.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]);

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.dim()];
        self.apply_into(x, &mut y);
        y
    }

    /// Upper bound on every eigenvalue modulus.
    fn gershgorin_bound(&self) -> f64;

    fn hermitian_deviation(&self) -> f64;
}

impl LinearOperator for SparseHermitian {
    fn dim(&self) -> usize {
        SparseHermitian::dim(self)
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.matvec(x, y)
    }

    fn gershgorin_bound(&self) -> f64 {
        SparseHermitian::gershgorin_bound(self)
    }

    fn hermitian_deviation(&self) -> f64 {
        SparseHermitian::hermitian_deviation(self)
    }
}

impl LinearOperator for Block {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.nrows();
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for j in 0..n {
                acc += self[(i, j)] * x[j];
            }
            *yi = acc;
        }
    }

    fn gershgorin_bound(&self) -> f64 {
        crate::linalg::gershgorin_bound(self)
    }

    fn hermitian_deviation(&self) -> f64 {
        crate::linalg::hermitian_deviation(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Smallest,
    Largest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigMethod {
    Krylov,
    Arnoldi,
    Dense,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigResult {
    pub value: f64,
    /// `‖Hv − λv‖ / ‖v‖` for the returned pair.
    pub residual: f64,
    pub iterations: usize,
    pub method: EigMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrylovConfig {
    pub tol: f64,
    /// Restart sweeps; `None` means `10 · dim`.
    pub max_iter: Option<usize>,
    pub seed: u64,
    /// Krylov subspace size per sweep (capped at the matrix dimension).
    pub subspace: usize,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        KrylovConfig {
            tol: 1e-8,
            max_iter: None,
            seed: 0,
            subspace: 64,
        }
    }
}

/// `σI − A`, used to turn smallest-eigenvalue queries into largest ones.
pub(crate) struct Shifted<'a, O: LinearOperator + ?Sized> {
    pub inner: &'a O,
    pub sigma: f64,
}

impl<O: LinearOperator + ?Sized> LinearOperator for Shifted<'_, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.inner.apply_into(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = xi * self.sigma - *yi;
        }
    }

    fn gershgorin_bound(&self) -> f64 {
        self.sigma.abs() + self.inner.gershgorin_bound()
    }

    fn hermitian_deviation(&self) -> f64 {
        self.inner.hermitian_deviation()
    }
}

/// Rayleigh quotient `⟨v|A|v⟩ / ⟨v|v⟩`.
pub fn rayleigh_quotient<O: LinearOperator + ?Sized>(op: &O, v: &[Complex64]) -> f64 {
    let av = op.apply(v);
    let num: Complex64 = v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    num.re / den
}

pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `y -= alpha · x`
pub(crate) fn sub_scaled(y: &mut [Complex64], alpha: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi -= alpha * xi;
    }
}

/// Seeded complex Gaussian start vector of unit norm.
pub(crate) fn start_vector(dim: usize, seed: u64) -> Vec<Complex64> {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let mut rng = crate::hammat::seeded_rng(seed);
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n = norm(&v);
    v.iter_mut().for_each(|z| *z /= n);
    v
}
