//! Weighted Pauli-word Hamiltonians and their sparse realization.
//!
//! Words are read left to right: character 0 acts on the most significant bit
//! of the computational-basis index, matching `σ_{w1} ⊗ σ_{w2} ⊗ …`.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sparse::SparseHermitian;
use crate::error::{Result, SbdError};
use crate::linalg::ZERO;

/// Default qubit cap for dense/sparse realization.
pub const DEFAULT_QUBIT_CAP: usize = 14;

/// Hermiticity tolerance applied to realized matrices (relative to the largest entry).
const REALIZE_HERMITIAN_TOL: f64 = 1e-12;

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// One weighted Pauli word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    #[serde(with = "complex_pair")]
    pub coeff: Complex64,
    pub word: String,
}

impl PauliTerm {
    pub fn new(coeff: impl Into<Complex64>, word: impl Into<String>) -> Self {
        PauliTerm {
            coeff: coeff.into(),
            word: word.into(),
        }
    }
}

/// Bit masks describing a word's action on basis states: `x` flips bits,
/// `z` marks Z/Y phase bits, `n_y` counts Y factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct WordMasks {
    pub x: usize,
    pub z: usize,
    pub n_y: u32,
}

impl WordMasks {
    pub fn parse(word: &str, n_qubits: usize) -> Result<Self> {
        let bad = |reason: String| SbdError::BadWord {
            word: word.to_string(),
            reason,
        };
        let chars: Vec<char> = word.chars().collect();
        if chars.len() != n_qubits {
            return Err(bad(format!("length {} but n_qubits = {n_qubits}", chars.len())));
        }
        let mut masks = WordMasks { x: 0, z: 0, n_y: 0 };
        for (pos, ch) in chars.into_iter().enumerate() {
            let bit = 1usize << (n_qubits - 1 - pos);
            match Pauli::from_char(ch) {
                Some(Pauli::I) => {}
                Some(Pauli::X) => masks.x |= bit,
                Some(Pauli::Z) => masks.z |= bit,
                Some(Pauli::Y) => {
                    masks.x |= bit;
                    masks.z |= bit;
                    masks.n_y += 1;
                }
                None => return Err(bad(format!("symbol {ch:?} outside {{I,X,Y,Z}}"))),
            }
        }
        Ok(masks)
    }

    /// `⟨j ^ x| P |j⟩`, the phase picked up acting on basis state `j`.
    #[inline]
    pub fn phase(&self, j: usize) -> Complex64 {
        let sign = if (j & self.z).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        let i_pow = match self.n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        i_pow * sign
    }
}

/// Weighted sum of Pauli words plus a real constant offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitHamiltonian {
    pub label: String,
    pub n_qubits: usize,
    pub constant: f64,
    pub terms: Vec<PauliTerm>,
    /// Free-form metadata from the producer; carried through untouched.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl QubitHamiltonian {
    pub fn new(label: impl Into<String>, n_qubits: usize, constant: f64, terms: Vec<PauliTerm>) -> Self {
        QubitHamiltonian {
            label: label.into(),
            n_qubits,
            constant,
            terms,
            provenance: None,
        }
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    /// Checks word alphabet/length and coefficient finiteness.
    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(SbdError::DomainError("n_qubits must be positive".into()));
        }
        if !self.constant.is_finite() {
            return Err(SbdError::NonFinite("constant".into()));
        }
        for t in &self.terms {
            WordMasks::parse(&t.word, self.n_qubits)?;
            if !t.coeff.re.is_finite() || !t.coeff.im.is_finite() {
                return Err(SbdError::NonFinite(t.word.clone()));
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let h: QubitHamiltonian = serde_json::from_str(s)?;
        h.validate()?;
        Ok(h)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }
}

/// Realizes `Σ coeff·σ_w + constant·I` with the default qubit cap.
pub fn realize(h: &QubitHamiltonian) -> Result<SparseHermitian> {
    realize_capped(h, DEFAULT_QUBIT_CAP)
}

pub fn realize_capped(h: &QubitHamiltonian, qubit_cap: usize) -> Result<SparseHermitian> {
    if h.n_qubits > qubit_cap {
        return Err(SbdError::CapExceeded {
            what: "qubit count",
            size: h.n_qubits,
            cap: qubit_cap,
        });
    }
    h.validate()?;
    let dim = h.dim();

    // Terms sharing an X mask land on the same off-diagonal; group them so each
    // row gets one entry per distinct mask.
    let mut groups: BTreeMap<usize, Vec<(WordMasks, Complex64)>> = BTreeMap::new();
    for t in &h.terms {
        let m = WordMasks::parse(&t.word, h.n_qubits)?;
        groups.entry(m.x).or_default().push((m, t.coeff));
    }
    if h.constant != 0.0 {
        groups
            .entry(0)
            .or_default()
            .push((WordMasks { x: 0, z: 0, n_y: 0 }, Complex64::new(h.constant, 0.0)));
    }

    let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::with_capacity(groups.len()); dim];
    for (&x, members) in &groups {
        for (i, row) in rows.iter_mut().enumerate() {
            let j = i ^ x;
            let v: Complex64 = members.iter().map(|(m, c)| c * m.phase(j)).sum();
            if v != ZERO {
                row.push((j, v));
            }
        }
    }
    let m = SparseHermitian::from_rows(dim, rows)?;
    let dev = m.hermitian_deviation();
    if dev > REALIZE_HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(SbdError::NotHermitian(dev));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag, from_real_rows};

    fn ham(n: usize, terms: &[(f64, &str)]) -> QubitHamiltonian {
        QubitHamiltonian::new(
            "t",
            n,
            0.0,
            terms.iter().map(|&(v, w)| PauliTerm::new(v, w)).collect(),
        )
    }

    #[test]
    fn single_z() {
        let m = realize(&ham(1, &[(1.0, "Z")])).unwrap();
        assert_eq!(m.to_dense(), diag(&[1.0, -1.0]));
    }

    #[test]
    fn zz_is_parity() {
        let m = realize(&ham(2, &[(1.0, "ZZ")])).unwrap();
        assert_eq!(m.to_dense(), diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn identity_x_z_combination() {
        // a·I + b·X + c·Z with a + c = 2, a - c = 3, b = 1.
        let m = realize(&ham(1, &[(2.5, "I"), (1.0, "X"), (-0.5, "Z")])).unwrap();
        assert_eq!(m.to_dense(), from_real_rows(2, &[2.0, 1.0, 1.0, 3.0]));
    }

    #[test]
    fn word_order_is_most_significant_first() {
        // X on qubit 0 flips the high bit: |00> <-> |10>.
        let m = realize(&ham(2, &[(1.0, "XI")])).unwrap();
        assert_eq!(m.get(0, 2), c(1.0, 0.0));
        assert_eq!(m.get(0, 1), ZERO);
    }

    #[test]
    fn y_phases() {
        let m = realize(&ham(1, &[(1.0, "Y")])).unwrap();
        assert_eq!(m.get(0, 1), c(0.0, -1.0));
        assert_eq!(m.get(1, 0), c(0.0, 1.0));
        let yy = realize(&ham(2, &[(1.0, "YY")])).unwrap();
        // Y⊗Y|00> = (i)(i)|11> = -|11>
        assert_eq!(yy.get(3, 0), c(-1.0, 0.0));
        assert_eq!(yy.get(1, 2), c(1.0, 0.0));
    }

    #[test]
    fn constant_adds_identity() {
        let mut h = ham(1, &[(1.0, "Z")]);
        h.constant = -3.0;
        assert_eq!(realize(&h).unwrap().to_dense(), diag(&[-2.0, -4.0]));
    }

    #[test]
    fn bad_words_rejected() {
        assert!(matches!(
            realize(&ham(2, &[(1.0, "XQ")])),
            Err(SbdError::BadWord { .. })
        ));
        assert!(matches!(
            realize(&ham(2, &[(1.0, "XXX")])),
            Err(SbdError::BadWord { .. })
        ));
    }

    #[test]
    fn cap_enforced() {
        let h = ham(3, &[(1.0, "ZZZ")]);
        assert!(matches!(
            realize_capped(&h, 2),
            Err(SbdError::CapExceeded { .. })
        ));
    }

    #[test]
    fn complex_coefficient_on_hermitian_word_is_rejected() {
        let h = QubitHamiltonian::new("t", 1, 0.0, vec![PauliTerm::new(c(0.0, 1.0), "X")]);
        assert!(matches!(realize(&h), Err(SbdError::NotHermitian(_))));
    }

    #[test]
    fn json_round_trip_is_byte_stable() {
        let h = ham(2, &[(1.0, "ZZ"), (-0.25, "XI")]);
        let s = h.to_json_string().unwrap();
        let back = QubitHamiltonian::from_json_str(&s).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.to_json_string().unwrap(), s);
    }

    #[test]
    fn non_finite_coefficients_rejected() {
        let s = r#"{"label":"x","n_qubits":1,"constant":0.0,"terms":[{"coeff":[1e400,0.0],"word":"Z"}]}"#;
        assert!(QubitHamiltonian::from_json_str(s).is_err());
    }
}
