use num_complex::Complex64;

use crate::error::{Result, SbdError};
use crate::hammat::{PauliTerm, QubitHamiltonian, WordMasks};
use crate::linalg::Block;

pub const DECOMPOSE_QUBIT_CAP: usize = 6;

/// Expands a `2^q × 2^q` matrix over all `4^q` Pauli words.
///
/// The identity coefficient goes into `constant` when it is real.
pub fn pauli_decompose(m: &Block, label: &str) -> Result<QubitHamiltonian> {
    let dim = m.nrows();
    if !m.is_square() || dim < 2 || !dim.is_power_of_two() {
        return Err(SbdError::NotPowerOfTwo(dim));
    }
    let q = dim.trailing_zeros() as usize;
    if q > DECOMPOSE_QUBIT_CAP {
        return Err(SbdError::CapExceeded {
            what: "Pauli decomposition qubit count",
            size: q,
            cap: DECOMPOSE_QUBIT_CAP,
        });
    }
    let mut constant = 0.0;
    let mut terms = Vec::new();
    for x in 0..dim {
        for z in 0..dim {
            let masks = WordMasks {
                x,
                z,
                n_y: (x & z).count_ones(),
            };
            let tr: Complex64 = (0..dim).map(|a| m[(a, a ^ x)] * masks.phase(a)).sum();
            let coeff = tr / dim as f64;
            if coeff.norm() < 1e-12 {
                continue;
            }
            if x == 0 && z == 0 && coeff.im == 0.0 {
                constant = coeff.re;
            } else {
                terms.push(PauliTerm::new(coeff, word(x, z, q)));
            }
        }
    }
    Ok(QubitHamiltonian::new(label, q, constant, terms))
}

fn word(x: usize, z: usize, q: usize) -> String {
    (0..q)
        .map(|pos| {
            let bit = 1usize << (q - 1 - pos);
            match (x & bit != 0, z & bit != 0) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hammat::{random_hermitian, realize};
    use crate::linalg::{c, diag, frobenius, from_real_rows};

    fn find(h: &QubitHamiltonian, w: &str) -> Option<Complex64> {
        h.terms.iter().find(|t| t.word == w).map(|t| t.coeff)
    }

    #[test]
    fn z_example() {
        let h = pauli_decompose(&diag(&[1.0, -1.0]), "z").unwrap();
        assert_eq!(h.terms.len(), 1);
        assert_eq!(find(&h, "Z"), Some(c(1.0, 0.0)));
        assert_eq!(h.constant, 0.0);
    }

    #[test]
    fn two_by_two_example() {
        let h = pauli_decompose(&from_real_rows(2, &[2.0, 1.0, 1.0, 3.0]), "m").unwrap();
        assert_eq!(h.constant, 2.5);
        assert_eq!(find(&h, "X"), Some(c(1.0, 0.0)));
        assert_eq!(find(&h, "Z"), Some(c(-0.5, 0.0)));
        assert_eq!(h.terms.len(), 2);
    }

    #[test]
    fn round_trip_random() {
        for seed in 0..3 {
            let m = random_hermitian(8, seed);
            let h = pauli_decompose(&m, "r").unwrap();
            assert!(h.terms.iter().any(|t| t.word.contains('Y')));
            let back = realize(&h).unwrap().to_dense();
            assert!(frobenius(&(back - &m)) <= 1e-10);
        }
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            pauli_decompose(&Block::identity(128, 128), "big"),
            Err(SbdError::CapExceeded { .. })
        ));
        assert!(pauli_decompose(&Block::identity(3, 3), "odd").is_err());
    }
}
