//! Block-embedding identities and Weyl-type inequalities on random matrices.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{f, Verdict};
use crate::assembly::{block_embed_products, BlockFamily};
use crate::error::Result;
use crate::matrix::{CMatrix, Matrix};
use crate::scalar::Real;
use crate::spectra::{counting, hermitian_spectrum, singular_values};

fn random_matrix<T: Real>(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix<T> {
    Matrix::from_fn(rows, cols, |_, _| Complex::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0))))
}

/// `L` random complex `dim × dim` blocks with entries uniform in the unit square.
pub fn random_family<T: Real>(parts: usize, dim: usize, rng: &mut ChaCha8Rng) -> Result<BlockFamily<T>> {
    BlockFamily::new((0..parts).map(|_| random_matrix(dim, dim, rng)).collect())
}

/// Geometric midpoints between consecutive distinct values, plus one point
/// above the largest; counts at these points are insensitive to rounding.
fn separating_grid<T: Real>(values: &[T]) -> Vec<T> {
    let mut v: Vec<T> = values.iter().copied().filter(|x| *x > T::zero()).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() <= T::lit(1e-9) * *b);
    let mut grid: Vec<T> = v.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
    if let (Some(lo), Some(hi)) = (v.first(), v.last()) {
        grid.push(*lo * T::lit(0.5));
        grid.push(*hi * T::lit(2.0));
    }
    grid
}

struct BlockMetrics {
    cogram_err: f64,
    gram_err: f64,
    spectrum_err: f64,
    counting_mismatches: usize,
}

fn block_metrics<T: Real>(family: &BlockFamily<T>) -> Result<BlockMetrics> {
    let products = block_embed_products(family)?;
    let n = family.dim();
    let blocks = family.blocks();

    let mut direct = CMatrix::<T>::zeros(n, n);
    for a in blocks {
        direct = direct.add(&a.matmul(&a.adjoint())?)?;
    }
    let scale = T::one().max(direct.max_abs());
    let cogram_err = f(direct.sub(&products.cogram)?.max_abs() / scale);

    let mut gram_err = T::zero();
    for (j, aj) in blocks.iter().enumerate() {
        for (k, ak) in blocks.iter().enumerate() {
            let want = aj.adjoint_mul(ak)?;
            let got = products.gram.block(j * n, k * n, n, n);
            gram_err = gram_err.max(got.sub(&want)?.max_abs());
        }
    }
    let gram_err = f(gram_err / scale);

    let mut g = hermitian_spectrum(&products.gram)?;
    let mut c = hermitian_spectrum(&products.cogram)?;
    g.sort_by(|a, b| b.partial_cmp(a).unwrap());
    c.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut spectrum_err = T::zero();
    for (i, gi) in g.iter().enumerate() {
        let ci = c.get(i).copied().unwrap_or(T::zero());
        spectrum_err = spectrum_err.max((*gi - ci).abs());
    }
    let spectrum_err = f(spectrum_err / scale);

    let s0 = singular_values(&family.block_diagonal())?;
    let parts = blocks.iter().map(singular_values).collect::<Result<Vec<_>>>()?;
    let all: Vec<T> = parts.iter().flat_map(|p| p.values.iter().copied()).collect();
    let counting_mismatches = separating_grid(&all)
        .into_iter()
        .filter(|&s| {
            let whole = counting(&s0.values, s).0;
            let sum: usize = parts.iter().map(|p| counting(&p.values, s).0).sum();
            whole != sum
        })
        .count();

    Ok(BlockMetrics { cogram_err, gram_err, spectrum_err, counting_mismatches })
}

/// The four block assertions for one family: `Σ A_k A_k*` against the cogram,
/// the Gram blocks against `A_j* A_k`, equal nonzero spectra of Gram and
/// cogram, and additivity of counting functions over `A₀ = diag(A_k)`.
pub fn check_p4_blocks<T: Real>(family: &BlockFamily<T>, product_tol: f64, spectrum_tol: f64) -> Result<Verdict> {
    let m = block_metrics(family)?;
    let pass = m.cogram_err <= product_tol
        && m.gram_err <= product_tol
        && m.spectrum_err <= spectrum_tol
        && m.counting_mismatches == 0;
    Ok(Verdict::new(
        "p4_blocks",
        json!({ "parts": family.len(), "dim": family.dim(), "product_tol": product_tol, "spectrum_tol": spectrum_tol }),
        None,
        pass,
        json!({
            "cogram_err": m.cogram_err, "gram_err": m.gram_err,
            "spectrum_err": m.spectrum_err, "counting_mismatches": m.counting_mismatches,
        }),
    ))
}

/// [`check_p4_blocks`] over `count` random families with `L ≤ max_parts`,
/// `dim ≤ max_dim`.
pub fn check_p4_random<T: Real>(
    count: usize,
    max_parts: usize,
    max_dim: usize,
    seed: u64,
    product_tol: f64,
    spectrum_tol: f64,
) -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_cogram, mut worst_gram, mut worst_spectrum) = (0.0f64, 0.0f64, 0.0f64);
    let (mut mismatches, mut failures) = (0usize, 0usize);
    for _ in 0..count {
        let parts = rng.gen_range(1..=max_parts.max(1));
        let dim = rng.gen_range(1..=max_dim.max(1));
        let family = random_family::<T>(parts, dim, &mut rng)?;
        let m = block_metrics(&family)?;
        worst_cogram = worst_cogram.max(m.cogram_err);
        worst_gram = worst_gram.max(m.gram_err);
        worst_spectrum = worst_spectrum.max(m.spectrum_err);
        mismatches += m.counting_mismatches;
        if m.cogram_err > product_tol
            || m.gram_err > product_tol
            || m.spectrum_err > spectrum_tol
            || m.counting_mismatches > 0
        {
            failures += 1;
        }
    }
    Ok(Verdict::new(
        "p4_blocks_random",
        json!({
            "families": count, "max_parts": max_parts, "max_dim": max_dim,
            "product_tol": product_tol, "spectrum_tol": spectrum_tol,
        }),
        Some(seed),
        failures == 0,
        json!({
            "failures": failures, "max_cogram_err": worst_cogram, "max_gram_err": worst_gram,
            "max_spectrum_err": worst_spectrum, "counting_mismatches": mismatches,
        }),
    ))
}

/// `s_n(BA) ≤ ‖B‖ s_n(A)` and `n(s₁s₂, AB) ≤ n(s₁, A) + n(s₂, B)` on random
/// pairs. `A` has columns damped by `1/(k+1)` so its singular values spread out.
pub fn check_weyl_pairs<T: Real>(count: usize, max_dim: usize, seed: u64, rel_tol: f64) -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eta = T::lit(rel_tol);
    let (mut product_violations, mut counting_violations) = (0usize, 0usize);
    let mut worst_ratio = 0.0f64;
    for _ in 0..count {
        let dim = rng.gen_range(1..=max_dim.max(1));
        let raw = random_matrix::<T>(dim, dim, &mut rng);
        let a = Matrix::from_fn(dim, dim, |i, j| raw[(i, j)].scale(T::one() / T::from_usize_lossy(j + 1)));
        let b = random_matrix::<T>(dim, dim, &mut rng);
        let sa = singular_values(&a)?;
        let sb = singular_values(&b)?;
        let sba = singular_values(&b.matmul(&a)?)?;
        let sab = singular_values(&a.matmul(&b)?)?;
        let norm_b = sb.s(1);
        let floor = eta * norm_b * sa.s(1);
        for n in 1..=dim {
            let bound = norm_b * sa.s(n);
            if sba.s(n) > bound * (T::one() + eta) + floor {
                product_violations += 1;
            }
            if bound > T::zero() {
                worst_ratio = worst_ratio.max(f(sba.s(n) / bound));
            }
        }
        let grid_a = log_grid(&sa.values);
        let grid_b = log_grid(&sb.values);
        for &s1 in &grid_a {
            for &s2 in &grid_b {
                let lhs = counting(&sab.values, s1 * s2 * (T::one() + eta)).0;
                let rhs = counting(&sa.values, s1 * (T::one() - eta)).0 + counting(&sb.values, s2 * (T::one() - eta)).0;
                if lhs > rhs {
                    counting_violations += 1;
                }
            }
        }
    }
    Ok(Verdict::new(
        "weyl_pairs",
        json!({ "pairs": count, "max_dim": max_dim, "rel_tol": rel_tol }),
        Some(seed),
        product_violations == 0 && counting_violations == 0,
        json!({
            "product_violations": product_violations,
            "counting_violations": counting_violations,
            "max_product_ratio": worst_ratio,
        }),
    ))
}

/// 12 log-spaced points spanning the positive values with a factor 2 margin.
fn log_grid<T: Real>(values: &[T]) -> Vec<T> {
    let pos: Vec<T> = values.iter().copied().filter(|v| *v > T::zero()).collect();
    let (Some(hi), Some(lo)) = (pos.first(), pos.last()) else {
        return vec![T::one()];
    };
    let (a, b) = ((*lo * T::lit(0.5)).ln(), (*hi * T::lit(2.0)).ln());
    (0..12).map(|i| (a + (b - a) * T::from_usize_lossy(i) / T::lit(11.0)).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_unitary_blocks() {
        let u =
            CMatrix::<f64>::from_fn(2, 2, |i, j| if i != j { Complex::new(1.0, 0.0) } else { Complex::new(0.0, 0.0) });
        let family = BlockFamily::new(vec![u.clone(), u]).unwrap();
        let p = block_embed_products(&family).unwrap();
        let two = CMatrix::<f64>::identity(2).scaled(Complex::new(2.0, 0.0));
        assert!(p.cogram.sub(&two).unwrap().max_abs() < 1e-15);
        assert!(check_p4_blocks(&family, 1e-12, 1e-10).unwrap().pass);
    }

    #[test]
    fn orthogonal_ranges_have_zero_gram_off_blocks() {
        let e = |k: usize| {
            CMatrix::<f64>::from_fn(3, 3, |i, j| {
                if i == k && j == k {
                    Complex::new(1.0, 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                }
            })
        };
        let family = BlockFamily::new(vec![e(0), e(1), e(2)]).unwrap();
        let p = block_embed_products(&family).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                if j != k {
                    assert_eq!(p.gram.block(3 * j, 3 * k, 3, 3).max_abs(), 0.0);
                }
            }
        }
    }

    #[test]
    fn random_families_and_pairs() {
        assert!(check_p4_random::<f64>(20, 4, 8, 1, 1e-12, 1e-10).unwrap().pass);
        assert!(check_weyl_pairs::<f64>(20, 16, 2, 1e-10).unwrap().pass);
    }

    #[test]
    fn grid_separates_values() {
        let g = separating_grid(&[1.0f64, 4.0, 4.0]);
        assert_eq!(g.len(), 3);
        assert!((g[0] - 2.0).abs() < 1e-15);
    }
}
