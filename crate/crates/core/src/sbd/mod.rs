//! Recursive block compression and eigenvalue recovery.
//!
//! Each level splits the current matrix into quadrants, takes one of the two
//! block roots, squares its magnitudes with `Γ·Γ†` and rescales the result into
//! `[0, 1]`. After `k` levels the dimension has shrunk by `2^k`, and the target
//! eigenvalue sits at the top of the final block's spectrum. Recovery walks the
//! recorded steps back outwards.

mod artifact;
mod step;

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::blockops::{split, BlockConfig, BlockPartition};
use crate::eig::{dense_spectrum, krylov_extreme, KrylovConfig, Which};
use crate::error::{Result, SbdError};
use crate::hammat::SparseHermitian;
use crate::linalg::Block;
use crate::matsqrt::SqrtConfig;

pub use artifact::{ArtifactStep, CompressedArtifact, ARTIFACT_FORMAT};
pub use step::{
    hermitize, normalize, sbd_step, sbd_step_partition, split_sparse, NormalizePolicy, Normalized,
    StepDiagnostics, StepOutput,
};

/// Blocks up to this size are eigensolved densely when comparing branches.
const DENSE_BRANCH_CAP: usize = 256;

/// How the branch at each level is chosen when no explicit path is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchPolicy {
    /// Always take `Γ₀`.
    Lower,
    /// Take the branch that holds the largest-magnitude end of the spectrum:
    /// `Γ₀` (or `Γ₁` for sign `+1`) at the first level, `Γ₁` below it, where
    /// every block is positive semidefinite.
    #[default]
    Magnitude,
    /// Expand both branches, eigensolve each candidate and keep the one whose
    /// recovered value has the larger magnitude.
    BestOfBoth,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SbdConfig {
    pub block: BlockConfig,
    pub sqrt: SqrtConfig,
    pub branch: BranchPolicy,
    pub normalize: NormalizePolicy,
}

impl SbdConfig {
    /// Literal all-`Γ₀` path with no sqrt fallback.
    pub fn strict() -> Self {
        SbdConfig {
            sqrt: SqrtConfig::strict(),
            branch: BranchPolicy::Lower,
            ..SbdConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionStep {
    pub branch: u8,
    pub n_scale: f64,
    pub t_shift: f64,
    pub used_det_prime: bool,
    pub sqrt_fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressedHamiltonian {
    pub block: Block,
    pub steps: Vec<CompressionStep>,
    pub original_dim: usize,
    pub sign: i8,
    pub label: String,
}

impl CompressedHamiltonian {
    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn path(&self) -> Vec<u8> {
        self.steps.iter().map(|s| s.branch).collect()
    }

    /// Maps an eigenvalue of the final block back to the original scale.
    pub fn recover(&self, eps: f64) -> Result<f64> {
        recover_through(eps, &self.steps, self.sign)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompressOptions {
    pub depth: usize,
    /// Explicit branch bitstring, outermost level first; overrides the policy.
    pub path: Option<Vec<u8>>,
    /// `-1` targets the most negative eigenvalue, `+1` the most positive.
    pub sign: i8,
    pub label: String,
}

impl CompressOptions {
    pub fn new(depth: usize) -> Self {
        CompressOptions {
            depth,
            path: None,
            sign: -1,
            label: String::new(),
        }
    }

    pub fn with_path(mut self, path: Vec<u8>) -> Self {
        self.path = Some(path);
        self
    }

    pub fn with_sign(mut self, sign: i8) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Compresses a sparse matrix; the first split never forms the full dense matrix.
pub fn compress(m: &SparseHermitian, opts: &CompressOptions, cfg: &SbdConfig) -> Result<CompressedHamiltonian> {
    validate(m.dim(), opts)?;
    run(split_sparse(m)?, m.dim(), opts, cfg)
}

pub fn compress_dense(m: &Block, opts: &CompressOptions, cfg: &SbdConfig) -> Result<CompressedHamiltonian> {
    if !m.is_square() {
        return Err(SbdError::DimensionMismatch("compression needs a square matrix".into()));
    }
    validate(m.nrows(), opts)?;
    run(split(m)?, m.nrows(), opts, cfg)
}

fn validate(dim: usize, opts: &CompressOptions) -> Result<()> {
    if !dim.is_power_of_two() {
        return Err(SbdError::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    if opts.depth < 1 || opts.depth + 1 > n.max(1) {
        return Err(SbdError::DepthTooLarge { depth: opts.depth, dim });
    }
    if opts.sign != 1 && opts.sign != -1 {
        return Err(SbdError::DomainError(format!("sign must be +1 or -1, got {}", opts.sign)));
    }
    if let Some(path) = &opts.path {
        if path.len() != opts.depth || path.iter().any(|&b| b > 1) {
            return Err(SbdError::DomainError(format!(
                "path must be {} bits of 0/1, got {path:?}",
                opts.depth
            )));
        }
    }
    Ok(())
}

fn run(
    first: BlockPartition,
    original_dim: usize,
    opts: &CompressOptions,
    cfg: &SbdConfig,
) -> Result<CompressedHamiltonian> {
    let mut steps = Vec::with_capacity(opts.depth);
    let mut partition = first;
    let mut block = Block::zeros(0, 0);
    for level in 0..opts.depth {
        let out = sbd_step_partition(&partition, &cfg.block, &cfg.sqrt)?;
        if out.diagnostics.branch_cut {
            warn!("level {level}: discriminant has eigenvalues on the negative real axis");
        }
        let (branch, normalized) = match opts.path.as_ref().map(|p| p[level]) {
            Some(b) => (b, reduce(&out, b, cfg)?),
            None => choose(&out, level, &steps, opts.sign, cfg)?,
        };
        debug!(
            "level {level}: branch {branch}, N = {:.6e}, det' = {}, fallback = {}, sqrt residual = {:.2e}",
            normalized.n_scale,
            out.diagnostics.used_det_prime,
            out.diagnostics.sqrt_fallback,
            out.diagnostics.sqrt_residual
        );
        steps.push(CompressionStep {
            branch,
            n_scale: normalized.n_scale,
            t_shift: normalized.t_shift,
            used_det_prime: out.diagnostics.used_det_prime,
            sqrt_fallback: out.diagnostics.sqrt_fallback,
        });
        block = normalized.block;
        if level + 1 < opts.depth {
            partition = split(&block)?;
        }
    }
    Ok(CompressedHamiltonian {
        block,
        steps,
        original_dim,
        sign: opts.sign,
        label: opts.label.clone(),
    })
}

fn reduce(out: &StepOutput, branch: u8, cfg: &SbdConfig) -> Result<Normalized> {
    let g = if branch == 0 { &out.gamma0 } else { &out.gamma1 };
    normalize(&hermitize(g), cfg.normalize)
}

fn choose(
    out: &StepOutput,
    level: usize,
    done: &[CompressionStep],
    sign: i8,
    cfg: &SbdConfig,
) -> Result<(u8, Normalized)> {
    match cfg.branch {
        BranchPolicy::Lower => Ok((0, reduce(out, 0, cfg)?)),
        BranchPolicy::Magnitude => {
            let b = if level == 0 && sign < 0 { 0 } else { 1 };
            Ok((b, reduce(out, b, cfg)?))
        }
        BranchPolicy::BestOfBoth => {
            let (lo, hi) = rayon::join(|| candidate(out, 0, done, sign, cfg), || candidate(out, 1, done, sign, cfg));
            match (lo, hi) {
                (Ok((n0, v0)), Ok((n1, v1))) => {
                    debug!("level {level}: candidates {v0:.10} / {v1:.10}");
                    if v1.abs() > v0.abs() {
                        Ok((1, n1))
                    } else {
                        Ok((0, n0))
                    }
                }
                (Ok((n0, _)), Err(e)) => {
                    debug!("level {level}: branch 1 rejected ({e})");
                    Ok((0, n0))
                }
                (Err(e), Ok((n1, _))) => {
                    debug!("level {level}: branch 0 rejected ({e})");
                    Ok((1, n1))
                }
                (Err(e), Err(_)) => Err(e),
            }
        }
    }
}

/// Normalized block for one branch together with its recovered top eigenvalue.
fn candidate(
    out: &StepOutput,
    branch: u8,
    done: &[CompressionStep],
    sign: i8,
    cfg: &SbdConfig,
) -> Result<(Normalized, f64)> {
    let normalized = reduce(out, branch, cfg)?;
    let eps = top_eigenvalue(&normalized.block, 0)?;
    let mut steps = done.to_vec();
    steps.push(CompressionStep {
        branch,
        n_scale: normalized.n_scale,
        t_shift: normalized.t_shift,
        used_det_prime: false,
        sqrt_fallback: false,
    });
    let value = recover_through(eps, &steps, sign)?;
    Ok((normalized, value))
}

/// Largest eigenvalue of a Hermitian block, densely for small blocks.
pub fn top_eigenvalue(block: &Block, seed: u64) -> Result<f64> {
    if block.nrows() <= DENSE_BRANCH_CAP {
        let ev = dense_spectrum(block)?;
        return ev.last().copied().ok_or(SbdError::ZeroMatrix);
    }
    let cfg = KrylovConfig {
        seed,
        ..KrylovConfig::default()
    };
    Ok(krylov_extreme(block, Which::Largest, &cfg)?.value)
}

/// `sign · √((ε − T)·N)` for one level.
pub fn recover_eigenvalue(eps: f64, step: &CompressionStep, sign: i8) -> Result<f64> {
    if !eps.is_finite() {
        return Err(SbdError::NonFinite(format!("eigenvalue {eps}")));
    }
    let mut radicand = eps - step.t_shift;
    if radicand < 0.0 {
        if radicand < -1e-12 {
            return Err(SbdError::NegativeRadicand(radicand));
        }
        radicand = 0.0;
    }
    Ok(f64::from(sign.signum()) * (radicand * step.n_scale).sqrt())
}

/// Recovers through every level, innermost first; only the outermost level carries `sign`.
pub fn recover_through(eps: f64, steps: &[CompressionStep], sign: i8) -> Result<f64> {
    let mut value = eps;
    for (i, step) in steps.iter().enumerate().rev() {
        let s = if i == 0 { sign } else { 1 };
        value = recover_eigenvalue(value, step, s)?;
    }
    Ok(value)
}

/// Size reduction in percent after `k` halvings.
pub fn compression_ratio(k: u32) -> Result<f64> {
    if k < 1 {
        return Err(SbdError::DomainError("compression depth must be >= 1".into()));
    }
    Ok((1.0 - 0.5f64.powi(k as i32)) * 100.0)
}

/// Smallest depth whose compression reaches `c` percent.
pub fn applications_needed(c: f64) -> Result<u32> {
    if !(c > 0.0 && c < 100.0) {
        return Err(SbdError::DomainError(format!("compression percentage must lie in (0, 100), got {c}")));
    }
    let mut k = ((-(1.0 - c / 100.0).log2()).ceil() as u32).max(1);
    // log2 can land a hair off an exact integer; settle against the forward formula.
    while k > 1 && compression_ratio(k - 1)? >= c {
        k -= 1;
    }
    while compression_ratio(k)? < c {
        k += 1;
    }
    Ok(k)
}
