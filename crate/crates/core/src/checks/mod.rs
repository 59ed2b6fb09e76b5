//! Numerical property checks for the operator-class calculus.
//!
//! Every check is a pure function of its parameters and seed and returns a
//! [`Verdict`]. Limit statements (`Δγ`, `δγ`) are probed through the windowed
//! estimator of [`crate::spectra::gamma_functionals`].

mod blocks;
mod classes;
mod lemma;
mod ortho;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;
use crate::spectra::{gamma_functionals, SingularSpectrum};

pub use blocks::{check_p4_blocks, check_p4_random, check_weyl_pairs, random_family};
pub use classes::{
    check_counting_equivalence, check_identity_fixture, check_p1_subadditivity, check_p2_kyfan, check_p3_products,
    Realization,
};
pub use lemma::{check_lemma44, check_psi0_bound, lemma44_sides, psi0, Psi0Form, RTuple};
pub use ortho::{check_compact_support_decay, cross_term_diagnostic, CrossTermParams, CrossTermReport, PairClass};

/// Grid size used for every `Δγ` estimate in this module.
pub const FUNCTIONAL_POINTS: usize = 256;

/// JSON verdict record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub pass: bool,
    pub metrics: Value,
}

impl Verdict {
    pub fn new(check: &str, params: Value, seed: Option<u64>, pass: bool, metrics: Value) -> Self {
        Self { check: check.to_string(), params, seed, pass, metrics }
    }
}

/// A decreasing non-negative sequence standing in for the singular values of
/// a compact operator, realized as a diagonal matrix when needed.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticOperator<T> {
    values: Vec<T>,
}

impl<T: Real> SyntheticOperator<T> {
    pub fn from_values(mut values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("synthetic operator needs at least one value".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < T::zero()) {
            return Err(Error::InvalidArgument(format!("synthetic values must be finite and >= 0, got {bad}")));
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(Self { values })
    }

    /// `s_n = C / (log(n+1))^γ`, `n = 1..=len`.
    pub fn log_decay(c: T, gamma: T, len: usize) -> Result<Self> {
        Self::from_values((1..=len).map(|n| c / T::from_usize_lossy(n + 1).ln().powf(gamma)).collect())
    }

    /// `s_n = ratio^n`.
    pub fn geometric(ratio: T, len: usize) -> Result<Self> {
        Self::from_values((1..=len).map(|n| ratio.powi(n as i32)).collect())
    }

    /// `rank` copies of `value`, then zeros.
    pub fn finite_rank(value: T, rank: usize, len: usize) -> Result<Self> {
        Self::from_values((0..len).map(|n| if n < rank { value } else { T::zero() }).collect())
    }

    pub fn zero(len: usize) -> Result<Self> {
        Self::from_values(vec![T::zero(); len])
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn diagonal(&self) -> Matrix<T> {
        Matrix::diagonal(&self.values)
    }

    pub fn spectrum(&self) -> SingularSpectrum<T> {
        SingularSpectrum { values: self.values.clone(), source_dim: None }
    }
}

/// `(Δ̂γ, δ̂γ)` of a sequence; an identically zero sequence gives `(0, 0)`.
pub(crate) fn functionals<T: Real>(spec: &SingularSpectrum<T>, gamma: T) -> Result<(T, T)> {
    if spec.values.iter().all(|v| *v == T::zero()) {
        return Ok((T::zero(), T::zero()));
    }
    let positive: Vec<T> = spec.values.iter().copied().filter(|v| *v > T::zero()).collect();
    let trimmed = SingularSpectrum { values: positive, source_dim: spec.source_dim };
    let est = gamma_functionals(&trimmed, gamma, None, FUNCTIONAL_POINTS)?;
    Ok((est.delta_upper, est.delta_lower))
}

#[inline]
pub(crate) fn f<T: Real>(x: T) -> f64 {
    x.to_f64_lossy()
}
