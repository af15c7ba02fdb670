//! Compressed-sparse-row complex matrix used as the numeric carrier between
//! ingestion, padding, Krylov and statevector stages.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SbdError};
use crate::linalg::{Block, ZERO};

/// Tolerance used when a matrix claims to be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Square complex matrix in CSR layout.
///
/// `hermitian` records whether the matrix passed a Hermiticity check on
/// construction; intermediate non-Hermitian blocks carry `false`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<Complex64>,
    hermitian: bool,
}

/// Serialized CSR layout with complex entries written as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsrLayout {
    pub rows: usize,
    pub cols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<[f64; 2]>,
}

impl SparseHermitian {
    /// Builds a matrix from raw CSR arrays, validating the structure.
    pub fn from_csr(
        dim: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        data: Vec<Complex64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(SbdError::DimensionMismatch("dimension must be at least 1".into()));
        }
        if indptr.len() != dim + 1 || indptr[0] != 0 {
            return Err(SbdError::DimensionMismatch(format!(
                "indptr has length {} for dimension {dim}",
                indptr.len()
            )));
        }
        if indptr.windows(2).any(|w| w[0] > w[1]) {
            return Err(SbdError::DimensionMismatch("row pointers are not monotone".into()));
        }
        let nnz = indptr[dim];
        if indices.len() != nnz || data.len() != nnz {
            return Err(SbdError::DimensionMismatch(format!(
                "nnz {nnz} disagrees with {} indices / {} values",
                indices.len(),
                data.len()
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&j| j >= dim) {
            return Err(SbdError::DimensionMismatch(format!(
                "column index {bad} out of range for dimension {dim}"
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SbdError::NonFinite("CSR data".into()));
        }
        let mut m = SparseHermitian {
            dim,
            indptr,
            indices,
            data,
            hermitian: false,
        };
        m.hermitian = m.hermitian_deviation() <= HERMITIAN_TOL * m.max_abs().max(1.0);
        Ok(m)
    }

    /// Builds a matrix from unordered `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, Complex64)]) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for &(i, j, v) in triplets {
            if i >= dim || j >= dim {
                return Err(SbdError::DimensionMismatch(format!(
                    "entry ({i},{j}) out of range for dimension {dim}"
                )));
            }
            rows[i].push((j, v));
        }
        Self::from_rows(dim, rows)
    }

    pub(crate) fn from_rows(dim: usize, rows: Vec<Vec<(usize, Complex64)>>) -> Result<Self> {
        let mut indptr = Vec::with_capacity(dim + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut acc = ZERO;
                while k < row.len() && row[k].0 == j {
                    acc += row[k].1;
                    k += 1;
                }
                if acc != ZERO {
                    indices.push(j);
                    data.push(acc);
                }
            }
            indptr.push(indices.len());
        }
        Self::from_csr(dim, indptr, indices, data)
    }

    /// Converts a dense block, dropping exact zeros.
    pub fn from_dense(m: &Block) -> Result<Self> {
        if !m.is_square() {
            return Err(SbdError::DimensionMismatch(format!(
                "{}x{} block is not square",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| m[(i, j)] != ZERO)
                    .map(|j| (j, m[(i, j)]))
                    .collect()
            })
            .collect();
        Self::from_rows(n, rows)
    }

    pub fn to_dense(&self) -> Block {
        let mut out = Block::zeros(self.dim, self.dim);
        for (i, j, v) in self.entries() {
            out[(i, j)] = v;
        }
        out
    }

    pub fn identity(dim: usize) -> Self {
        let rows = (0..dim).map(|i| vec![(i, Complex64::new(1.0, 0.0))]).collect();
        Self::from_rows(dim, rows).expect("identity is well formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Iterates stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            (self.indptr[i]..self.indptr[i + 1]).map(move |k| (i, self.indices[k], self.data[k]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let row = &self.indices[self.indptr[i]..self.indptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.data[self.indptr[i] + k],
            Err(_) => ZERO,
        }
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.data[k] * x[self.indices[k]];
            }
            *yi = acc;
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.dim];
        self.matvec(x, &mut y);
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    /// Largest absolute row sum.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                self.data[self.indptr[i]..self.indptr[i + 1]]
                    .iter()
                    .map(|z| z.norm())
                    .sum::<f64>()
            })
            .fold(0.0_f64, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.entries()
            .map(|(i, j, v)| (v - self.get(j, i).conj()).norm())
            .fold(0.0_f64, f64::max)
    }

    /// Pads with `pad_value` on new diagonal entries up to the next power of two.
    pub fn pad_to_pow2(&self, pad_value: f64) -> SparseHermitian {
        let target = self.dim.next_power_of_two();
        if target == self.dim {
            return self.clone();
        }
        let mut indptr = self.indptr.clone();
        let mut indices = self.indices.clone();
        let mut data = self.data.clone();
        for i in self.dim..target {
            indices.push(i);
            data.push(Complex64::new(pad_value, 0.0));
            indptr.push(indices.len());
            debug_assert_eq!(indptr.len(), i + 2);
        }
        SparseHermitian {
            dim: target,
            indptr,
            indices,
            data,
            hermitian: self.hermitian,
        }
    }

    /// Pads using the default value, one above the Gershgorin bound, so padded
    /// eigenvalues sit strictly above the original spectrum.
    pub fn pad_default(&self) -> SparseHermitian {
        self.pad_to_pow2(default_pad_value(self))
    }

    pub fn to_layout(&self) -> CsrLayout {
        CsrLayout {
            rows: self.dim,
            cols: self.dim,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_layout(layout: &CsrLayout) -> Result<Self> {
        if layout.rows != layout.cols {
            return Err(SbdError::DimensionMismatch(format!(
                "{}x{} layout is not square",
                layout.rows, layout.cols
            )));
        }
        Self::from_csr(
            layout.rows,
            layout.indptr.clone(),
            layout.indices.clone(),
            layout.data.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        )
    }
}

pub fn default_pad_value(m: &SparseHermitian) -> f64 {
    m.gershgorin_bound() + 1.0
}
