//! Synthetic Hamiltonian families used by the test suites and the `gen` command.

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::pauli::{PauliTerm, QubitHamiltonian};
use super::sparse::SparseHermitian;
use crate::error::{Result, SbdError};
use crate::linalg::{c, gershgorin_bound, Block};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Open-chain transverse-field Ising model `-J Σ Z_i Z_{i+1} - h Σ X_i`.
pub fn gen_tfim(n: usize, coupling: f64, field: f64) -> Result<QubitHamiltonian> {
    if n < 2 {
        return Err(SbdError::DomainError(format!("tfim needs at least 2 qubits, got {n}")));
    }
    let word = |sites: &[usize], p: char| -> String {
        (0..n).map(|q| if sites.contains(&q) { p } else { 'I' }).collect()
    };
    let mut terms = Vec::with_capacity(2 * n - 1);
    for i in 0..n - 1 {
        terms.push(PauliTerm::new(-coupling, word(&[i, i + 1], 'Z')));
    }
    for i in 0..n {
        terms.push(PauliTerm::new(-field, word(&[i], 'X')));
    }
    Ok(QubitHamiltonian::new(
        format!("tfim-n{n}-J{coupling}-h{field}"),
        n,
        0.0,
        terms,
    ))
}

/// Dense random Hermitian matrix with complex Gaussian entries, `(G + G†)/2`.
pub fn random_hermitian(dim: usize, seed: u64) -> Block {
    let mut rng = seeded_rng(seed);
    let g = Block::from_fn(dim, dim, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    (&g + g.adjoint()).scale(0.5)
}

/// Random Hermitian positive semidefinite matrix `G G† / dim`.
pub fn random_psd(dim: usize, seed: u64) -> Block {
    let mut rng = seeded_rng(seed);
    let g = Block::from_fn(dim, dim, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    (&g * g.adjoint()).unscale(dim as f64)
}

/// Real polynomial coefficients (ascending powers) for the four blocks of a
/// commuting-block instance. `b` is used for both off-diagonal blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingCoeffs {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub d: Vec<f64>,
}

impl CommutingCoeffs {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        let a0 = -rng.random_range(6.0..8.0);
        let a1 = rng.random_range(-1.0..1.0);
        let a2 = rng.random_range(-0.5..0.5);
        // d - a = gap + tilt·K keeps the discriminant (d-a)^2 + 4b^2 at or above 1,
        // well inside the square-root iteration's convergence basin.
        let gap = rng.random_range(1.5..2.5);
        let tilt = rng.random_range(-0.5..0.5);
        let b0 = rng.random_range(-0.5..0.5);
        let b1 = rng.random_range(-0.3..0.3);
        CommutingCoeffs {
            a: vec![a0, a1, a2],
            b: vec![b0, b1],
            d: vec![a0 + gap, a1 + tilt, a2],
        }
    }
}

fn poly(k: &Block, coeffs: &[f64]) -> Block {
    let n = k.nrows();
    let mut out = Block::zeros(n, n);
    let mut power = Block::identity(n, n);
    for (i, &ci) in coeffs.iter().enumerate() {
        if i > 0 {
            power = &power * k;
        }
        out += power.scale(ci);
    }
    out
}

/// Assembles `[[p_a(K), p_b(K)], [p_b(K), p_d(K)]]` for a Hermitian `K`.
pub fn commuting_block_from(k: &Block, coeffs: &CommutingCoeffs) -> Block {
    let h = k.nrows();
    let a = poly(k, &coeffs.a);
    let b = poly(k, &coeffs.b);
    let d = poly(k, &coeffs.d);
    let mut m = Block::zeros(2 * h, 2 * h);
    m.view_mut((0, 0), (h, h)).copy_from(&a);
    m.view_mut((0, h), (h, h)).copy_from(&b);
    m.view_mut((h, 0), (h, h)).copy_from(&b.adjoint());
    m.view_mut((h, h), (h, h)).copy_from(&d);
    m
}

/// Seeded instance whose four blocks are real polynomials of one random
/// Hermitian `K` (spectral radius ≤ 1), so every block pair commutes.
pub fn gen_commuting_block(dim: usize, seed: u64) -> Result<SparseHermitian> {
    SparseHermitian::from_dense(&gen_commuting_dense(dim, seed)?)
}

pub fn gen_commuting_dense(dim: usize, seed: u64) -> Result<Block> {
    if dim < 4 || !dim.is_power_of_two() {
        return Err(SbdError::DomainError(format!(
            "commuting family needs a power-of-two dimension >= 4, got {dim}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let half = dim / 2;
    let g = Block::from_fn(half, half, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut k = (&g + g.adjoint()).scale(0.5);
    let bound = gershgorin_bound(&k);
    if bound > 0.0 {
        k.unscale_mut(bound);
    }
    let coeffs = CommutingCoeffs::draw(&mut rng);
    Ok(commuting_block_from(&k, &coeffs))
}

/// Exact spectrum of a commuting instance: per eigenvalue κ of `K`, the two
/// roots of the scalar 2×2 `[[a(κ), b(κ)], [b(κ), d(κ)]]`. Returned as
/// `(lower roots, upper roots)`.
pub fn commuting_roots(k: &Block, coeffs: &CommutingCoeffs) -> (Vec<f64>, Vec<f64>) {
    let eval = |p: &[f64], x: f64| p.iter().rev().fold(0.0, |acc, &ci| acc * x + ci);
    let kappas = SymmetricEigen::new(k.clone()).eigenvalues;
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for &kappa in kappas.iter() {
        let (a, b, d) = (eval(&coeffs.a, kappa), eval(&coeffs.b, kappa), eval(&coeffs.d, kappa));
        let disc = ((a - d) * (a - d) + 4.0 * b * b).sqrt();
        lower.push((a + d - disc) / 2.0);
        upper.push((a + d + disc) / 2.0);
    }
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hammat::realize;
    use crate::linalg::{diag, frobenius, hermitian_deviation, ZERO};

    #[test]
    fn tfim_zero_field_spectrum() {
        let m = realize(&gen_tfim(2, 1.0, 0.0).unwrap()).unwrap();
        assert_eq!(m.to_dense(), diag(&[-1.0, 1.0, 1.0, -1.0]));
    }

    #[test]
    fn tfim_zero_coupling_ground() {
        let m = realize(&gen_tfim(2, 0.0, 1.0).unwrap()).unwrap().to_dense();
        let ev = SymmetricEigen::new(m).eigenvalues;
        let min = ev.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min + 2.0).abs() < 1e-12);
    }

    #[test]
    fn tfim_rejects_single_site() {
        assert!(gen_tfim(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn commuting_blocks_commute_and_are_deterministic() {
        for seed in 0..5 {
            let m = gen_commuting_dense(16, seed).unwrap();
            assert_eq!(m, gen_commuting_dense(16, seed).unwrap());
            assert!(hermitian_deviation(&m) < 1e-14);
            let h = 8;
            let a = m.view((0, 0), (h, h)).into_owned();
            let b = m.view((0, h), (h, h)).into_owned();
            let d = m.view((h, h), (h, h)).into_owned();
            assert!(frobenius(&(&a * &d - &d * &a)) < 1e-10);
            assert!(frobenius(&(&a * &b - &b * &a)) < 1e-10);
        }
    }

    #[test]
    fn commuting_family_with_diagonal_k() {
        let k = diag(&[1.0, 2.0]);
        let coeffs = CommutingCoeffs {
            a: vec![0.0, 1.0],
            b: vec![0.5],
            d: vec![3.0, 0.0, 1.0],
        };
        let m = commuting_block_from(&k, &coeffs);
        // a = K, b = 0.5 I, d = 3 + K^2
        assert_eq!(m[(0, 0)], c(1.0, 0.0));
        assert_eq!(m[(1, 1)], c(2.0, 0.0));
        assert_eq!(m[(2, 2)], c(4.0, 0.0));
        assert_eq!(m[(3, 3)], c(7.0, 0.0));
        assert_eq!(m[(0, 2)], c(0.5, 0.0));
        assert_eq!(m[(0, 1)], ZERO);
    }

    #[test]
    fn commuting_family_is_negative_definite() {
        for seed in 0..10 {
            let m = gen_commuting_dense(32, seed).unwrap();
            let ev = SymmetricEigen::new(m).eigenvalues;
            assert!(ev.iter().all(|&x| x < 0.0), "seed {seed}: {ev}");
        }
    }

    #[test]
    fn commuting_generator_rejects_bad_dims() {
        assert!(gen_commuting_block(2, 0).is_err());
        assert!(gen_commuting_block(12, 0).is_err());
    }
}
