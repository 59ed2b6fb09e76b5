//! Finite sections of Bergman-space Toeplitz operators whose symbols decay
//! like `(1 + log(1/(1-r)))^{-γ}` at the boundary, and the spectral
//! statistics used to study their singular value asymptotics.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix `f64`, which is what the command line tool uses.

pub mod assembly;
pub mod banded;
pub mod checks;
pub mod eigen;
pub mod error;
pub mod matrix;
pub mod moments;
pub mod quadrature;
pub mod scalar;
pub mod spectra;
pub mod symbol;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

/// `f64` instances of the generic types.
pub type GammaExponent = symbol::GammaExponent<f64>;
pub type AngularFactor = symbol::AngularFactor<f64>;
pub type RadialWeight = symbol::RadialWeight<f64>;
pub type SeparableSymbol = symbol::SeparableSymbol<f64>;
pub type MomentTable = moments::MomentTable<f64>;
pub type ToeplitzTruncation = assembly::ToeplitzTruncation<f64>;
pub type BlockFamily = assembly::BlockFamily<f64>;
pub type BandedMatrix = banded::BandedMatrix<f64>;
pub type Tridiagonal = eigen::Tridiagonal<f64>;
pub type RealMatrix = matrix::Matrix<f64>;
pub type ComplexMatrix = matrix::CMatrix<f64>;
pub type SingularSpectrum = spectra::SingularSpectrum<f64>;
pub type SignedSpectrum = spectra::SignedSpectrum<f64>;
pub type AsymptoticFit = spectra::AsymptoticFit<f64>;
pub type GammaFunctionalEstimate = spectra::GammaFunctionalEstimate<f64>;
pub type CountingProfile = spectra::CountingProfile<f64>;
pub type SyntheticOperator = checks::SyntheticOperator<f64>;
