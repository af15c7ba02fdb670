//! One compression level: block roots, Hermitization and spectral adjustment.

use log::debug;
use serde::{Deserialize, Serialize};

use crate::blockops::{det_block, det_prime, split, BlockConfig, BlockPartition};
use crate::error::{Result, SbdError};
use crate::hammat::SparseHermitian;
use crate::linalg::{gershgorin_bound, hermitian_deviation, matmul, mul_pruned, symmetrize, Block};
use crate::matsqrt::{newton_sqrt, SqrtConfig};

/// What happened while computing one pair of block roots.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepDiagnostics {
    /// `A` was singular and `A·D − C·B` replaced the block determinant.
    pub used_det_prime: bool,
    pub sqrt_fallback: bool,
    pub sqrt_residual: f64,
    pub branch_cut: bool,
}

#[derive(Debug, Clone)]
pub struct StepOutput {
    /// Minus-sign root.
    pub gamma0: Block,
    /// Plus-sign root.
    pub gamma1: Block,
    pub diagnostics: StepDiagnostics,
}

/// Both block roots `Γ∓ = (S ∓ √(S² − 4·det))/2` with `S = A + D`.
pub fn sbd_step(m: &Block, block_cfg: &BlockConfig, sqrt_cfg: &SqrtConfig) -> Result<StepOutput> {
    if m.nrows() < 2 {
        return Err(SbdError::DomainError("block roots need dim >= 2".into()));
    }
    sbd_step_partition(&split(m)?, block_cfg, sqrt_cfg)
}

pub fn sbd_step_partition(
    p: &BlockPartition,
    block_cfg: &BlockConfig,
    sqrt_cfg: &SqrtConfig,
) -> Result<StepOutput> {
    let mut diagnostics = StepDiagnostics::default();
    let det = match det_block(p, block_cfg) {
        Ok(d) => d,
        Err(SbdError::Singular { pivot, .. }) => {
            debug!("A block singular (pivot {pivot:e}); using A·D − C·B");
            diagnostics.used_det_prime = true;
            det_prime(p, block_cfg)
        }
        Err(e) => return Err(e),
    };
    let sum = &p.a + &p.d;
    let disc = mul_pruned(&sum, &sum, block_cfg.drop_tol) - det.scale(4.0);
    let root = newton_sqrt(&disc, sqrt_cfg)?;
    diagnostics.sqrt_fallback = root.fallback;
    diagnostics.sqrt_residual = root.residual;
    diagnostics.branch_cut = root.branch_cut;
    let gamma0 = (&sum - &root.root).scale(0.5);
    let gamma1 = (&sum + &root.root).scale(0.5);
    Ok(StepOutput {
        gamma0,
        gamma1,
        diagnostics,
    })
}

/// Splits a sparse matrix straight into dense quadrants.
pub fn split_sparse(m: &SparseHermitian) -> Result<BlockPartition> {
    let n = m.dim();
    if !n.is_multiple_of(2) {
        return Err(SbdError::OddDimension(n));
    }
    let h = n / 2;
    let mut p = BlockPartition {
        a: Block::zeros(h, h),
        b: Block::zeros(h, h),
        c: Block::zeros(h, h),
        d: Block::zeros(h, h),
    };
    for (i, j, v) in m.entries() {
        let target = match (i < h, j < h) {
            (true, true) => &mut p.a,
            (true, false) => &mut p.b,
            (false, true) => &mut p.c,
            (false, false) => &mut p.d,
        };
        target[(i % h, j % h)] = v;
    }
    Ok(p)
}

/// `Γ·Γ†`, symmetrized to strip rounding-level asymmetry.
pub fn hermitize(g: &Block) -> Block {
    symmetrize(&matmul(g, &g.adjoint()))
}

/// How the scale `N` and shift `T` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NormalizePolicy {
    /// `T = 0`, `N` = Gershgorin bound.
    #[default]
    Gershgorin,
    Fixed { n_scale: f64, t_shift: f64 },
}

#[derive(Debug, Clone)]
pub struct Normalized {
    pub block: Block,
    pub n_scale: f64,
    pub t_shift: f64,
}

/// `Γ″ = Γ′/N + T·I`.
pub fn normalize(g_prime: &Block, policy: NormalizePolicy) -> Result<Normalized> {
    let bound = gershgorin_bound(g_prime);
    let dev = hermitian_deviation(g_prime);
    if dev > 1e-8 * bound.max(1.0) {
        return Err(SbdError::NotHermitian(dev));
    }
    let (n_scale, t_shift) = match policy {
        NormalizePolicy::Gershgorin => {
            if bound < 1e-300 {
                return Err(SbdError::ZeroMatrix);
            }
            (bound, 0.0)
        }
        NormalizePolicy::Fixed { n_scale, t_shift } => {
            if !(n_scale > 0.0) {
                return Err(SbdError::DomainError(format!("N must be positive, got {n_scale}")));
            }
            (n_scale, t_shift)
        }
    };
    let mut block = g_prime.unscale(n_scale);
    if t_shift != 0.0 {
        for i in 0..block.nrows() {
            block[(i, i)] += t_shift;
        }
    }
    Ok(Normalized {
        block,
        n_scale,
        t_shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eig::dense_spectrum;
    use crate::hammat::{gen_commuting_dense, random_hermitian, random_psd};
    use crate::linalg::{c, diag, frobenius, from_real_rows, trace};

    fn cfgs() -> (BlockConfig, SqrtConfig) {
        (BlockConfig::default(), SqrtConfig::default())
    }

    fn close(a: &Block, b: &Block, tol: f64) -> bool {
        frobenius(&(a - b)) <= tol
    }

    #[test]
    fn diagonal_roots_are_min_max_blocks() {
        let (b, s) = cfgs();
        let out = sbd_step(&diag(&[1.0, 2.0, 3.0, 4.0]), &b, &s).unwrap();
        assert!(close(&out.gamma0, &diag(&[1.0, 2.0]), 1e-10));
        assert!(close(&out.gamma1, &diag(&[3.0, 4.0]), 1e-10));
        assert!(!out.diagnostics.used_det_prime);
    }

    #[test]
    fn scalar_blocks_reproduce_quadratic_roots() {
        let (b, s) = cfgs();
        let out = sbd_step(&from_real_rows(2, &[2.0, 1.0, 1.0, 3.0]), &b, &s).unwrap();
        let lo = (5.0 - 5f64.sqrt()) / 2.0;
        let hi = (5.0 + 5f64.sqrt()) / 2.0;
        assert!((out.gamma0[(0, 0)] - c(lo, 0.0)).norm() < 1e-10);
        assert!((out.gamma1[(0, 0)] - c(hi, 0.0)).norm() < 1e-10);
        assert!((lo - 1.38197).abs() < 1e-5 && (hi - 3.61803).abs() < 1e-5);
    }

    #[test]
    fn commuting_roots_partition_spectrum() {
        let (b, s) = cfgs();
        let m = gen_commuting_dense(8, 4).unwrap();
        let out = sbd_step(&m, &b, &s).unwrap();
        let mut got = dense_spectrum(&symmetrize(&out.gamma0)).unwrap();
        got.extend(dense_spectrum(&symmetrize(&out.gamma1)).unwrap());
        got.sort_by(f64::total_cmp);
        let want = dense_spectrum(&m).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-6, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn trace_identity() {
        let (b, s) = cfgs();
        for seed in 0..5 {
            let m = random_hermitian(16, seed) + Block::identity(16, 16).scale(4.0);
            let p = split(&m).unwrap();
            let out = sbd_step(&m, &b, &s).unwrap();
            let sum = &out.gamma0 + &out.gamma1;
            assert!(close(&sum, &(&p.a + &p.d), 1e-10 * frobenius(&m)));
            let tr = trace(&out.gamma0) + trace(&out.gamma1);
            assert!((tr - trace(&m)).norm() <= 1e-10 * trace(&m).norm());
        }
    }

    #[test]
    fn singular_a_uses_det_prime() {
        let (b, s) = cfgs();
        let m = from_real_rows(
            4,
            &[
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                1.0, 0.0, 2.0, 0.0, //
                0.0, 1.0, 0.0, 2.0,
            ],
        );
        let out = sbd_step(&m, &b, &s).unwrap();
        assert!(out.diagnostics.used_det_prime);
        // scalar-like: roots of x^2 - 2x - 1 = 0 → 1 ± √2
        assert!((out.gamma0[(0, 0)].re - (1.0 - 2f64.sqrt())).abs() < 1e-8);
        assert!((out.gamma1[(1, 1)].re - (1.0 + 2f64.sqrt())).abs() < 1e-8);
    }

    #[test]
    fn split_sparse_matches_dense_split() {
        let m = random_hermitian(8, 2);
        let sp = SparseHermitian::from_dense(&m).unwrap();
        assert_eq!(split_sparse(&sp).unwrap(), split(&m).unwrap());
    }

    #[test]
    fn hermitize_examples() {
        let g = from_real_rows(2, &[0.0, -1.0, -1.0, 0.0]);
        assert_eq!(hermitize(&g), Block::identity(2, 2));
        assert_eq!(hermitize(&diag(&[-3.0, 2.0])), diag(&[9.0, 4.0]));
        let r = random_hermitian(6, 1) + from_real_rows(6, &[0.3; 36]);
        assert!(hermitian_deviation(&hermitize(&r)) <= 1e-12);
    }

    #[test]
    fn normalize_examples() {
        let n = normalize(&diag(&[9.0, 4.0]), NormalizePolicy::Gershgorin).unwrap();
        assert_eq!(n.n_scale, 9.0);
        assert_eq!(n.t_shift, 0.0);
        assert!(close(&n.block, &diag(&[1.0, 4.0 / 9.0]), 1e-15));
        let id = normalize(&Block::identity(3, 3), NormalizePolicy::Gershgorin).unwrap();
        assert_eq!(id.n_scale, 1.0);
        assert_eq!(id.block, Block::identity(3, 3));
        assert!(matches!(
            normalize(&Block::zeros(2, 2), NormalizePolicy::Gershgorin),
            Err(SbdError::ZeroMatrix)
        ));
        let fixed = normalize(&diag(&[2.0]), NormalizePolicy::Fixed { n_scale: 4.0, t_shift: 0.25 }).unwrap();
        assert_eq!(fixed.block[(0, 0)], c(0.75, 0.0));
    }

    #[test]
    fn normalized_psd_spectrum_in_unit_interval() {
        for seed in 0..5 {
            let n = normalize(&random_psd(16, seed), NormalizePolicy::Gershgorin).unwrap();
            let ev = dense_spectrum(&n.block).unwrap();
            assert!(ev[0] >= -1e-12 && ev[15] <= 1.0 + 1e-12, "{ev:?}");
        }
    }
}
