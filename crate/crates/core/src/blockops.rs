//! Block partitioning and the non-commutative block determinants.
//!
//! Inverses are never formed: every `A^{-1}X` is an LU solve with partial
//! pivoting, and a vanishing pivot is reported as [`SbdError::Singular`] so the
//! caller can switch to [`det_prime`].

use nalgebra::{Dyn, PermutationSequence, LU};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SbdError};
use crate::linalg::{frobenius, matmul, max_abs, mul_pruned, Block};

/// Relative pivot threshold below which a block counts as singular.
pub const PIVOT_TOL: f64 = 1e-12;

/// Which product form the block determinant takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetFlavor {
    /// `A·D − A·C·A⁻¹·B`, the flexibilized determinant at Γ = 0.
    #[default]
    Verbatim,
    /// `(D − C·A⁻¹·B)·A`, the Schur complement multiplied on the right.
    SchurRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockConfig {
    /// Entries below `drop_tol · max|product|` are zeroed after each product; 0 disables.
    pub drop_tol: f64,
    pub flavor: DetFlavor,
}

impl Default for BlockConfig {
    fn default() -> Self {
        BlockConfig {
            drop_tol: 1e-14,
            flavor: DetFlavor::Verbatim,
        }
    }
}

/// The four equal quadrants of an even-dimensional square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub a: Block,
    pub b: Block,
    pub c: Block,
    pub d: Block,
}

impl BlockPartition {
    pub fn half_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn reassemble(&self) -> Block {
        let h = self.half_dim();
        let mut m = Block::zeros(2 * h, 2 * h);
        m.view_mut((0, 0), (h, h)).copy_from(&self.a);
        m.view_mut((0, h), (h, h)).copy_from(&self.b);
        m.view_mut((h, 0), (h, h)).copy_from(&self.c);
        m.view_mut((h, h), (h, h)).copy_from(&self.d);
        m
    }
}

pub fn split(m: &Block) -> Result<BlockPartition> {
    if !m.is_square() {
        return Err(SbdError::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(SbdError::OddDimension(n));
    }
    let h = n / 2;
    Ok(BlockPartition {
        a: m.view((0, 0), (h, h)).into_owned(),
        b: m.view((0, h), (h, h)).into_owned(),
        c: m.view((h, 0), (h, h)).into_owned(),
        d: m.view((h, h), (h, h)).into_owned(),
    })
}

/// LU factorization that has passed the pivot check.
pub struct Factored {
    l: Block,
    u: Block,
    p: PermutationSequence<Dyn>,
}

/// Panel width of the blocked triangular solves.
const PANEL: usize = 32;

impl Factored {
    pub fn new(a: &Block) -> Result<Self> {
        if !a.is_square() {
            return Err(SbdError::DimensionMismatch("cannot factor a non-square block".into()));
        }
        let lu = LU::new(a.clone());
        let threshold = PIVOT_TOL * max_abs(a);
        let u = lu.u();
        let pivot = u
            .diagonal()
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min);
        if !(pivot >= threshold) || pivot == 0.0 {
            return Err(SbdError::Singular { pivot, threshold });
        }
        Ok(Factored {
            l: lu.l(),
            p: lu.p().clone(),
            u,
        })
    }

    /// `X` with `A·X = rhs`.
    pub fn solve(&self, rhs: &Block) -> Result<Block> {
        if rhs.nrows() != self.l.nrows() {
            return Err(SbdError::DimensionMismatch(format!(
                "factor has {} rows, rhs has {}",
                self.l.nrows(),
                rhs.nrows()
            )));
        }
        let mut x = rhs.clone();
        self.p.permute_rows(&mut x);
        forward_unit(&self.l, &mut x);
        backward(&self.u, &mut x);
        if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SbdError::NonFinite("triangular solve".into()));
        }
        Ok(x)
    }
}

/// `x ← L⁻¹x` for unit lower-triangular `L`, panel by panel.
fn forward_unit(l: &Block, x: &mut Block) {
    let n = l.nrows();
    let k = x.ncols();
    let mut start = 0;
    while start < n {
        let end = (start + PANEL).min(n);
        for col in 0..k {
            for i in start..end {
                let mut s = x[(i, col)];
                for j in start..i {
                    s -= l[(i, j)] * x[(j, col)];
                }
                x[(i, col)] = s;
            }
        }
        if end < n {
            let panel = l.view((end, start), (n - end, end - start)).into_owned();
            let solved = x.view((start, 0), (end - start, k)).into_owned();
            let update = matmul(&panel, &solved);
            let mut rest = x.view_mut((end, 0), (n - end, k));
            rest -= update;
        }
        start = end;
    }
}

/// `x ← U⁻¹x` for upper-triangular `U`, panel by panel from the bottom.
fn backward(u: &Block, x: &mut Block) {
    let n = u.nrows();
    let k = x.ncols();
    let mut end = n;
    while end > 0 {
        let start = end.saturating_sub(PANEL);
        for col in 0..k {
            for i in (start..end).rev() {
                let mut s = x[(i, col)];
                for j in i + 1..end {
                    s -= u[(i, j)] * x[(j, col)];
                }
                x[(i, col)] = s / u[(i, i)];
            }
        }
        if start > 0 {
            let panel = u.view((0, start), (start, end - start)).into_owned();
            let solved = x.view((start, 0), (end - start, k)).into_owned();
            let update = matmul(&panel, &solved);
            let mut rest = x.view_mut((0, 0), (start, k));
            rest -= update;
        }
        end = start;
    }
}

/// Solves `a·X = rhs`.
pub fn solve_block(a: &Block, rhs: &Block) -> Result<Block> {
    if a.nrows() != rhs.nrows() {
        return Err(SbdError::DimensionMismatch(format!(
            "lhs has {} rows, rhs has {}",
            a.nrows(),
            rhs.nrows()
        )));
    }
    Factored::new(a)?.solve(rhs)
}

/// Relative residual `‖aX − rhs‖_F / ‖rhs‖_F`.
pub fn solve_residual(a: &Block, x: &Block, rhs: &Block) -> f64 {
    let r = frobenius(&(matmul(a, x) - rhs));
    let scale = frobenius(rhs);
    if scale == 0.0 {
        r
    } else {
        r / scale
    }
}

/// Block determinant in the configured flavor; errors with `Singular` when `A` is.
pub fn det_block(p: &BlockPartition, cfg: &BlockConfig) -> Result<Block> {
    let tol = cfg.drop_tol;
    let a_inv_b = solve_block(&p.a, &p.b)?;
    match cfg.flavor {
        DetFlavor::Verbatim => {
            let ad = mul_pruned(&p.a, &p.d, tol);
            let ac = mul_pruned(&p.a, &p.c, tol);
            Ok(ad - mul_pruned(&ac, &a_inv_b, tol))
        }
        DetFlavor::SchurRight => {
            let schur = &p.d - mul_pruned(&p.c, &a_inv_b, tol);
            Ok(mul_pruned(&schur, &p.a, tol))
        }
    }
}

/// Fallback determinant `A·D − C·B`.
pub fn det_prime(p: &BlockPartition, cfg: &BlockConfig) -> Block {
    mul_pruned(&p.a, &p.d, cfg.drop_tol) - mul_pruned(&p.c, &p.b, cfg.drop_tol)
}
