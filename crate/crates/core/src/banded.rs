//! Banded matrices with logarithmically decaying entries,
//! `d_{i,j} = b_{j-i} / (log(min(i,j) + m₀))^γ · (1 + ε_{j-i}(min(i,j) + m₀))`.
//!
//! Scaling by the smaller index keeps `b_{-j} = conj(b_j)` Hermitian.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::assembly::assemble_with_moments;
use crate::eigen::Tridiagonal;
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Matrix};
use crate::moments::MomentTable;
use crate::scalar::Real;
use crate::symbol::{AngularFactor, GammaExponent, RadialWeight, TrigPolynomial};

/// Default index offset, so that `log(m + m₀) > 0` from row 0.
pub const DEFAULT_OFFSET: usize = 2;

/// Vanishing relative perturbation `ε_j(m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Perturbation {
    #[default]
    None,
    /// `ε_j(m) = amplitude / log(m)`.
    InverseLog { amplitude: f64 },
}

impl Perturbation {
    fn eval<T: Real>(self, m: T) -> T {
        match self {
            Self::None => T::zero(),
            Self::InverseLog { amplitude } => T::lit(amplitude) / m.ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<T> {
    n: usize,
    /// `b_{-h} .. b_h`
    coeffs: Vec<Complex<T>>,
    gamma: GammaExponent<T>,
    offset: usize,
    perturbation: Perturbation,
    /// `bands[h + j][i]` holds `d_{i, i+j}`
    bands: Vec<Vec<Complex<T>>>,
}

impl<T: Real> BandedMatrix<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn gamma(&self) -> GammaExponent<T> {
        self.gamma
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn perturbation(&self) -> Perturbation {
        self.perturbation
    }

    /// `φ₁,b(θ) = Σ b_j e^{ijθ}`.
    pub fn symbol(&self) -> Result<AngularFactor<T>> {
        AngularFactor::trig(self.coeffs.clone())
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        let h = self.half_bandwidth();
        if i >= self.n || j >= self.n || i.abs_diff(j) > h {
            return Complex::new(T::zero(), T::zero());
        }
        let k = (h + j) - i;
        self.bands[k][i]
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        Matrix::from_fn(self.n, self.n, |i, j| self.entry(i, j))
    }

    /// Real symmetric tridiagonal form with the same eigenvalues, available when
    /// the matrix is Hermitian with half-bandwidth at most one. Complex
    /// off-diagonals are replaced by their moduli (a diagonal unitary similarity).
    pub fn to_tridiagonal(&self) -> Option<Tridiagonal<T>> {
        let h = self.half_bandwidth();
        if h > 1 || !self.is_hermitian() {
            return None;
        }
        let diag = self.bands[h].iter().map(|z| z.re).collect();
        let offdiag = if h == 0 {
            vec![T::zero(); self.n.saturating_sub(1)]
        } else {
            self.bands[h + 1][..self.n - 1].iter().map(|z| z.norm()).collect()
        };
        Tridiagonal::new(diag, offdiag).ok()
    }

    /// Whether `d_{j,i} = conj(d_{i,j})` holds exactly.
    pub fn is_hermitian(&self) -> bool {
        let h = self.half_bandwidth();
        (0..=h).all(|j| (0..self.n.saturating_sub(j)).all(|i| self.bands[h + j][i] == self.bands[h - j][i + j].conj()))
    }
}

/// Builds the band from `b_{-h} .. b_h` (odd length).
pub fn assemble_banded<T: Real>(
    n: usize,
    coeffs: Vec<Complex<T>>,
    gamma: GammaExponent<T>,
    offset: usize,
    perturbation: Perturbation,
) -> Result<BandedMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("banded dimension must be >= 1".into()));
    }
    if coeffs.len() % 2 == 0 {
        return Err(Error::InvalidArgument(format!("need 2h+1 coefficients, got {}", coeffs.len())));
    }
    let h = coeffs.len() / 2;
    if h > n - 1 {
        return Err(Error::InvalidArgument(format!("half-bandwidth {h} exceeds N-1 = {}", n - 1)));
    }
    if offset < 2 {
        return Err(Error::InvalidArgument(format!("offset m0 must be >= 2, got {offset}")));
    }
    let g = gamma.value();
    let bands = (0..coeffs.len())
        .map(|k| {
            let j = k as i64 - h as i64;
            let b = coeffs[k];
            (0..n)
                .map(|i| {
                    let col = i as i64 + j;
                    if col < 0 || col >= n as i64 || b == Complex::new(T::zero(), T::zero()) {
                        return Complex::new(T::zero(), T::zero());
                    }
                    let m = T::from_usize_lossy(i.min(col as usize) + offset);
                    let scale = (T::one() + perturbation.eval(m)) / m.ln().powf(g);
                    b.scale(scale)
                })
                .collect()
        })
        .collect();
    Ok(BandedMatrix { n, coeffs, gamma, offset, perturbation, bands })
}

/// `D - P_N T_φ P_N` with `φ = φ₁,b · φ₀,γ`.
///
/// `d_{i,i+j}` carries `b_j` while `T_φ(m, n)` carries `φ̂₁(m-n)`, so the
/// Toeplitz side uses the factor whose `k`-th coefficient is `b_{-k}`.
pub fn banded_minus_toeplitz<T: Real>(banded: &BandedMatrix<T>) -> Result<CMatrix<T>> {
    let reflected: Vec<Complex<T>> = banded.coefficients().iter().rev().copied().collect();
    let angular = AngularFactor::TrigPolynomial(TrigPolynomial::new(reflected)?);
    let n = banded.dim();
    let moments = MomentTable::compute((2 * n - 1) as u64, &RadialWeight::pure(banded.gamma()))?;
    let t = assemble_with_moments(&angular, &moments, n)?;
    banded.to_dense().sub(&t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> Vec<Complex<f64>> {
        v.iter().map(|&x| Complex::new(x, 0.0)).collect()
    }

    #[test]
    fn single_diagonal() {
        let g = GammaExponent::new(1.0).unwrap();
        let b = assemble_banded(4, real(&[0.0, 1.0, 0.0]), g, 2, Perturbation::None).unwrap();
        for i in 0..4 {
            assert!((b.entry(i, i).re - 1.0 / ((i + 2) as f64).ln()).abs() < 1e-15);
            for j in 0..4 {
                if i != j {
                    assert_eq!(b.entry(i, j), Complex::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn symmetric_tridiagonal_and_symbol() {
        let g = GammaExponent::new(1.0).unwrap();
        let b = assemble_banded(6, real(&[1.0, 2.0, 1.0]), g, 2, Perturbation::None).unwrap();
        assert!(b.is_hermitian());
        let t = b.to_tridiagonal().unwrap();
        assert_eq!(t.len(), 6);
        assert!((b.symbol().unwrap().sup_norm() - 4.0).abs() < 1e-10);
        assert!((t.offdiag[0] - 1.0 / 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn argument_checks() {
        let g = GammaExponent::new(1.0).unwrap();
        assert!(assemble_banded(4, real(&[1.0, 2.0]), g, 2, Perturbation::None).is_err());
        assert!(assemble_banded(1, real(&[1.0, 2.0, 1.0]), g, 2, Perturbation::None).is_err());
        assert!(assemble_banded(4, real(&[1.0]), g, 1, Perturbation::None).is_err());
    }

    #[test]
    fn zero_coefficients_give_zero_difference() {
        let g = GammaExponent::new(1.0).unwrap();
        let b = assemble_banded(5, real(&[0.0, 0.0, 0.0]), g, 2, Perturbation::None).unwrap();
        assert_eq!(banded_minus_toeplitz(&b).unwrap().max_abs(), 0.0);
    }
}
