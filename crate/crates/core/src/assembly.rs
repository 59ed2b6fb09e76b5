//! Finite sections of Toeplitz operators in the Bergman basis `e_n = √(n+1) zⁿ`.
//!
//! For a separable symbol the basis matrix is
//!
//! ```text
//! T(m, n) = 2 √((m+1)(n+1)) · φ̂₁(m-n) · M(m+n+1),   M(p) = ∫₀¹ r^p φ₀,γ(r) g(r) dr
//! ```
//!
//! so one moment table of length `2N-1` serves every entry.

use std::io::Write;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::Tridiagonal;
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Matrix};
use crate::moments::MomentTable;
use crate::scalar::Real;
use crate::symbol::{AngularFactor, ArcPartition, GammaExponent, RadialWeight, SeparableSymbol};

/// Largest dimension exported as CSV.
pub const CSV_EXPORT_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolMeta {
    pub angular: String,
    pub gamma: f64,
    pub profile: String,
}

impl SymbolMeta {
    pub fn of<T: Real>(sym: &SeparableSymbol<T>) -> Self {
        Self {
            angular: sym.angular.describe(),
            gamma: sym.gamma().value().to_f64_lossy(),
            profile: sym.radial.profile.label(),
        }
    }
}

/// `P_N T_φ P_N` in the Bergman basis.
#[derive(Debug, Clone)]
pub struct ToeplitzTruncation<T> {
    pub matrix: CMatrix<T>,
    pub meta: SymbolMeta,
    /// Set iff the angular factor is real-valued.
    pub hermitian: bool,
}

#[derive(Serialize)]
struct BinaryHeader<'a> {
    n: usize,
    layout: &'static str,
    dtype: &'static str,
    symbol: &'a SymbolMeta,
    gamma: f64,
}

impl<T: Real> ToeplitzTruncation<T> {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Binary export: an 8-byte little-endian header length, the JSON header,
    /// then `N²` entries row-major as little-endian `f64` pairs `(re, im)`.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        let header = serde_json::to_vec(&BinaryHeader {
            n: self.dim(),
            layout: "row-major complex pairs, little-endian",
            dtype: "f64",
            symbol: &self.meta,
            gamma: self.meta.gamma,
        })?;
        out.write_all(&(header.len() as u64).to_le_bytes())?;
        out.write_all(&header)?;
        let mut buf = Vec::with_capacity(16 * self.dim());
        for i in 0..self.dim() {
            buf.clear();
            for z in self.matrix.row(i) {
                buf.extend_from_slice(&z.re.to_f64_lossy().to_le_bytes());
                buf.extend_from_slice(&z.im.to_f64_lossy().to_le_bytes());
            }
            out.write_all(&buf)?;
        }
        Ok(())
    }

    /// CSV with columns `m, n, re, im`; refused above [`CSV_EXPORT_LIMIT`].
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        if self.dim() > CSV_EXPORT_LIMIT {
            return Err(Error::Budget(format!("CSV export is limited to N <= {CSV_EXPORT_LIMIT}, got {}", self.dim())));
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["m", "n", "re", "im"])?;
        for i in 0..self.dim() {
            for (j, z) in self.matrix.row(i).iter().enumerate() {
                w.write_record([i.to_string(), j.to_string(), format!("{:e}", z.re), format!("{:e}", z.im)])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Moment table covering powers `1 ..= 2N-1`.
pub fn moment_table_for<T: Real>(radial: &RadialWeight<T>, n: usize) -> Result<MomentTable<T>> {
    MomentTable::compute((2 * n).saturating_sub(1) as u64, radial)
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("truncation dimension must be >= 1".into()));
    }
    Ok(())
}

/// Sampled factors need `M >= 4N` so that `|k| <= 2N-2` is alias-free.
fn check_grid<T: Real>(angular: &AngularFactor<T>, n: usize) -> Result<()> {
    if let AngularFactor::Sampled(s) = angular {
        if s.len() < 4 * n {
            return Err(Error::Precondition(format!("sampled grid M={} is below 4N={}", s.len(), 4 * n)));
        }
    }
    Ok(())
}

/// Entry matrix from a precomputed moment table.
pub fn assemble_with_moments<T: Real>(
    angular: &AngularFactor<T>,
    moments: &MomentTable<T>,
    n: usize,
) -> Result<CMatrix<T>> {
    check_dimension(n)?;
    check_grid(angular, n)?;
    if moments.max_power() + 1 < 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n - 1, found: moments.max_power() });
    }
    let kmax = n - 1;
    let coeffs = angular.fourier_table(kmax)?;
    let roots: Vec<T> = (0..n).map(|i| T::from_usize_lossy(i + 1).sqrt()).collect();
    let two = T::lit(2.0);
    let zero = Complex::new(T::zero(), T::zero());
    let mut data = vec![zero; n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(m, row)| {
        for (k, out) in row.iter_mut().enumerate() {
            let c = coeffs[m + kmax - k];
            if c != zero {
                *out = c.scale(two * roots[m] * roots[k] * moments.get(m + k + 1));
            }
        }
    });
    Matrix::from_vec(n, n, data)
}

pub fn assemble_toeplitz<T: Real>(sym: &SeparableSymbol<T>, n: usize) -> Result<ToeplitzTruncation<T>> {
    check_dimension(n)?;
    check_grid(&sym.angular, n)?;
    let moments = moment_table_for(&sym.radial, n)?;
    Ok(ToeplitzTruncation {
        matrix: assemble_with_moments(&sym.angular, &moments, n)?,
        meta: SymbolMeta::of(sym),
        hermitian: sym.angular.is_real(),
    })
}

/// Real symmetric tridiagonal matrix with the spectrum of `P_N T_φ P_N`, for
/// real angular factors of degree at most one (constants and `a + b cos(θ - θ₀)`).
///
/// The off-diagonal phase is removed by a diagonal unitary, so no dense
/// matrix is formed and `N` is limited only by the moment table.
pub fn assemble_tridiagonal<T: Real>(
    angular: &AngularFactor<T>,
    moments: &MomentTable<T>,
    n: usize,
) -> Result<Option<Tridiagonal<T>>> {
    check_dimension(n)?;
    let degree_one = match angular {
        AngularFactor::Constant(_) => true,
        AngularFactor::TrigPolynomial(p) => p.degree() <= 1,
        _ => false,
    };
    if !degree_one || !angular.is_real() {
        return Ok(None);
    }
    if moments.max_power() + 1 < 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n - 1, found: moments.max_power() });
    }
    let c0 = angular.fourier_coefficient(0)?.re;
    let c1 = angular.fourier_coefficient(1)?.norm();
    let two = T::lit(2.0);
    let diag = (0..n).map(|m| two * T::from_usize_lossy(m + 1) * c0 * moments.get(2 * m + 1)).collect();
    let offdiag = (0..n.saturating_sub(1))
        .map(|m| {
            let root = (T::from_usize_lossy(m + 1) * T::from_usize_lossy(m + 2)).sqrt();
            two * root * c1 * moments.get(2 * m + 2)
        })
        .collect();
    Ok(Some(Tridiagonal::new(diag, offdiag)?))
}

/// Operators `A₁ .. A_L` acting on a common `N`-dimensional space.
#[derive(Debug, Clone)]
pub struct BlockFamily<T> {
    blocks: Vec<CMatrix<T>>,
}

impl<T: Real> BlockFamily<T> {
    pub fn new(blocks: Vec<CMatrix<T>>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::InvalidArgument("block family needs at least one block".into()));
        };
        let n = first.rows();
        for b in &blocks {
            if b.rows() != n || b.cols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: if b.rows() != n { b.rows() } else { b.cols() },
                });
            }
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[CMatrix<T>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].rows()
    }

    /// `A₀ = diag(A₁, .., A_L)`.
    pub fn block_diagonal(&self) -> CMatrix<T> {
        Matrix::block_diagonal(&self.blocks)
    }
}

/// `T_{χ̃_j}` for the equal arcs of an `L`-partition, sharing one moment table.
pub fn assemble_arc_family<T: Real>(parts: usize, gamma: GammaExponent<T>, n: usize) -> Result<BlockFamily<T>> {
    let partition = ArcPartition::new(parts)?;
    check_dimension(n)?;
    let moments = moment_table_for(&RadialWeight::pure(gamma), n)?;
    let blocks = (1..=parts)
        .map(|j| assemble_with_moments(&partition.indicator(j)?, &moments, n))
        .collect::<Result<Vec<_>>>()?;
    BlockFamily::new(blocks)
}

/// Products of the embedding `J(f₁, .., f_L) = f₁ + .. + f_L` composed with `A₀`.
#[derive(Debug, Clone)]
pub struct BlockProducts<T> {
    /// `A = Σ A_k`.
    pub sum: CMatrix<T>,
    /// `J A₀ = [A₁ .. A_L]`, an `N × LN` matrix.
    pub ja0: CMatrix<T>,
    /// `(J A₀)* (J A₀)`, the block matrix `[A_j* A_k]`.
    pub gram: CMatrix<T>,
    /// `(J A₀)(J A₀)* = Σ A_k A_k*`.
    pub cogram: CMatrix<T>,
}

pub fn block_embed_products<T: Real>(family: &BlockFamily<T>) -> Result<BlockProducts<T>> {
    let n = family.dim();
    let l = family.len();
    let mut sum = Matrix::zeros(n, n);
    let mut ja0 = Matrix::zeros(n, l * n);
    for (k, a) in family.blocks().iter().enumerate() {
        sum = sum.add(a)?;
        ja0.set_block(0, k * n, a);
    }
    let gram = ja0.adjoint_mul(&ja0)?;
    let cogram = ja0.matmul(&ja0.adjoint())?;
    Ok(BlockProducts { sum, ja0, gram, cogram })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::diag_entry;

    fn radial(gamma: f64) -> SeparableSymbol<f64> {
        SeparableSymbol::radial_only(GammaExponent::new(gamma).unwrap())
    }

    #[test]
    fn identity_when_gamma_zero() {
        let t = assemble_toeplitz(&radial(0.0), 8).unwrap();
        let id = CMatrix::<f64>::identity(8);
        assert!(t.matrix.sub(&id).unwrap().max_abs() <= 1e-12);
        assert!(t.hermitian);
    }

    #[test]
    fn radial_is_diagonal_with_diag_entries() {
        let t = assemble_toeplitz(&radial(1.0), 4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(t.matrix[(i, j)], Complex::new(0.0, 0.0));
                }
            }
            let d = diag_entry(i as u64, GammaExponent::new(1.0).unwrap()).unwrap();
            assert!((t.matrix[(i, i)].re - d).abs() <= 1e-14 * d);
        }
    }

    #[test]
    fn shift_symbol_fills_one_subdiagonal() {
        let angular = AngularFactor::trig_real(&[0.0, 0.0, 1.0]).unwrap();
        let sym = SeparableSymbol::new(angular, RadialWeight::pure(GammaExponent::new(1.0).unwrap()));
        let t = assemble_toeplitz(&sym, 6).unwrap();
        let moments = moment_table_for(&sym.radial, 6).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let z = t.matrix[(i, j)];
                if i == j + 1 {
                    let want = 2.0 * ((j + 1) as f64 * (j + 2) as f64).sqrt() * moments.get(2 * j + 2);
                    assert!((z.re - want).abs() <= 1e-15 && z.im == 0.0);
                } else {
                    assert_eq!(z, Complex::new(0.0, 0.0));
                }
            }
        }
        assert!(!t.hermitian);
    }

    #[test]
    fn sampled_grid_guard() {
        let angular = AngularFactor::sampled(vec![Complex::new(1.0, 0.0); 16]).unwrap();
        let sym = SeparableSymbol::new(angular, RadialWeight::pure(GammaExponent::new(1.0).unwrap()));
        assert!(assemble_toeplitz(&sym, 4).is_ok());
        assert!(matches!(assemble_toeplitz(&sym, 5), Err(Error::Precondition(_))));
    }

    #[test]
    fn identical_identity_blocks() {
        let id = CMatrix::<f64>::identity(2);
        let fam = BlockFamily::new(vec![id.clone(), id.clone()]).unwrap();
        let p = block_embed_products(&fam).unwrap();
        assert_eq!(p.cogram, id.scaled(Complex::new(2.0, 0.0)));
        assert_eq!(p.gram.rows(), 4);
        assert!(BlockFamily::new(vec![id, CMatrix::<f64>::identity(3)]).is_err());
    }

    #[test]
    fn binary_layout() {
        let t = assemble_toeplitz(&radial(0.0), 2).unwrap();
        let mut buf = Vec::new();
        t.write_binary(&mut buf).unwrap();
        let hlen = u64::from_le_bytes(buf[..8].try_into().unwrap()) as usize;
        let header: serde_json::Value = serde_json::from_slice(&buf[8..8 + hlen]).unwrap();
        assert_eq!(header["n"], 2);
        let data = &buf[8 + hlen..];
        assert_eq!(data.len(), 4 * 16);
        let first = f64::from_le_bytes(data[..8].try_into().unwrap());
        assert!((first - 1.0).abs() < 1e-12);
        let mut csv = Vec::new();
        t.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("m,n,re,im\n0,0,"));
    }
}
