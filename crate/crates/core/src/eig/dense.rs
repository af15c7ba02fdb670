use nalgebra::{Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Result, SbdError};
use crate::linalg::{hermitian_deviation, max_abs, Block};

pub const DENSE_CAP: usize = 4096;

fn check_cap(m: &Block) -> Result<()> {
    if !m.is_square() {
        return Err(SbdError::DimensionMismatch("dense oracle needs a square matrix".into()));
    }
    if m.nrows() > DENSE_CAP {
        return Err(SbdError::CapExceeded {
            what: "dense oracle dimension",
            size: m.nrows(),
            cap: DENSE_CAP,
        });
    }
    Ok(())
}

/// Full spectrum of a Hermitian matrix, ascending.
pub fn dense_spectrum(m: &Block) -> Result<Vec<f64>> {
    check_cap(m)?;
    let dev = hermitian_deviation(m);
    if dev > 1e-8 * max_abs(m).max(1.0) {
        return Err(SbdError::NotHermitian(dev));
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Full spectrum of a general complex matrix, ascending by real part.
pub fn dense_spectrum_general(m: &Block) -> Result<Vec<Complex64>> {
    check_cap(m)?;
    let (_, t) = Schur::new(m.clone()).unpack();
    let mut ev: Vec<Complex64> = t.diagonal().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

/// Spectrum for either kind of input; real parts only for general matrices.
pub fn dense_oracle(m: &Block, hermitian: bool) -> Result<Vec<f64>> {
    if hermitian {
        dense_spectrum(m)
    } else {
        Ok(dense_spectrum_general(m)?.into_iter().map(|z| z.re).collect())
    }
}
