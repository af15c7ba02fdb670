//! Dense complex block helpers shared by the compression stages.
//!
//! The compression pipeline works on dense blocks: after the first square-root
//! iteration every block is generically full, so a sparse carrier buys nothing
//! below the matrix cap.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense complex square block.
pub type Block = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Real diagonal matrix as a complex block.
pub fn diag(values: &[f64]) -> Block {
    let n = values.len();
    Block::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { ZERO })
}

/// Builds a complex block from real row-major data.
pub fn from_real_rows(n: usize, rows: &[f64]) -> Block {
    assert_eq!(rows.len(), n * n);
    Block::from_fn(n, n, |i, j| c(rows[i * n + j], 0.0))
}

pub fn frobenius(m: &Block) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &Block) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest absolute row sum, an upper bound on every eigenvalue modulus.
pub fn gershgorin_bound(m: &Block) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0_f64, f64::max)
}

/// Largest entrywise deviation from Hermiticity, `max |m_ij - conj(m_ji)|`.
pub fn hermitian_deviation(m: &Block) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &Block, tol: f64) -> bool {
    m.is_square() && hermitian_deviation(m) <= tol
}

pub fn trace(m: &Block) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Zeroes entries whose modulus falls below `rel * max|m|`. `rel == 0` disables.
pub fn prune(m: &mut Block, rel: f64) {
    if rel <= 0.0 {
        return;
    }
    let cut = rel * max_abs(m);
    for z in m.iter_mut() {
        if z.norm() < cut {
            *z = ZERO;
        }
    }
}

/// Below this size the plain complex product is already fast.
const SPLIT_GEMM_MIN: usize = 16;

/// `a · b`, computed from real and imaginary parts with real gemm; imaginary
/// products are skipped when either side is purely real.
pub fn matmul(a: &Block, b: &Block) -> Block {
    if a.nrows().min(a.ncols()).min(b.ncols()) < SPLIT_GEMM_MIN {
        return a * b;
    }
    let (ar, ai) = parts(a);
    let (br, bi) = parts(b);
    let mut re = &ar * &br;
    let im = match (ai, bi) {
        (None, None) => None,
        (Some(ai), None) => Some(&ai * &br),
        (None, Some(bi)) => Some(&ar * &bi),
        (Some(ai), Some(bi)) => {
            re -= &ai * &bi;
            Some(&ar * &bi + &ai * &br)
        }
    };
    match im {
        None => re.map(|x| Complex64::new(x, 0.0)),
        Some(im) => re.zip_map(&im, Complex64::new),
    }
}

fn parts(m: &Block) -> (DMatrix<f64>, Option<DMatrix<f64>>) {
    let re = m.map(|z| z.re);
    let im = if m.iter().any(|z| z.im != 0.0) {
        Some(m.map(|z| z.im))
    } else {
        None
    };
    (re, im)
}

/// Product followed by fill-in pruning.
pub fn mul_pruned(a: &Block, b: &Block, drop_tol: f64) -> Block {
    let mut out = matmul(a, b);
    prune(&mut out, drop_tol);
    out
}

/// `(m + m†)/2`, used to strip rounding-level anti-Hermitian parts.
pub fn symmetrize(m: &Block) -> Block {
    (m + m.adjoint()).scale(0.5)
}
