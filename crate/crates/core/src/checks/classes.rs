//! Checks on `Σγ` membership and the functionals `Δγ`, `δγ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{f, functionals, SyntheticOperator, Verdict};
use crate::assembly::assemble_toeplitz;
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Matrix};
use crate::scalar::Real;
use crate::spectra::{singular_values_real, SingularSpectrum};
use crate::symbol::{GammaExponent, SeparableSymbol};

/// How two synthetic operators are combined into `A + B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Realization {
    /// Both diagonal in one basis, largest entries aligned.
    Aligned,
    /// `diag(a) + U diag(b) Uᵀ` with a random orthogonal `U`, on the leading
    /// `dim` entries.
    Rotated { dim: usize },
}

/// `γ = 0`, `φ₁ ≡ 1`: the truncation must be the identity.
pub fn check_identity_fixture<T: Real>(n: usize, tol: f64) -> Result<Verdict> {
    let sym = SeparableSymbol::<T>::radial_only(GammaExponent::new(T::zero())?);
    let t = assemble_toeplitz(&sym, n)?;
    let err = f(t.matrix.sub(&CMatrix::identity(n))?.max_abs());
    Ok(Verdict::new(
        "identity_fixture",
        json!({ "n": n, "tol": tol }),
        None,
        err <= tol,
        json!({ "max_abs_error": err }),
    ))
}

/// `s_n = C/(log(n+1))^γ` over `len` terms: both functionals should be `C^{1/γ}`.
pub fn check_counting_equivalence<T: Real>(cases: &[(f64, f64)], len: usize, tol: f64) -> Result<Verdict> {
    let mut rows = Vec::new();
    let mut pass = true;
    for &(c, gamma) in cases {
        let op = SyntheticOperator::log_decay(T::lit(c), T::lit(gamma), len)?;
        let (upper, lower) = functionals(&op.spectrum(), T::lit(gamma))?;
        let target = c.powf(1.0 / gamma);
        let err_upper = (f(upper) / target - 1.0).abs();
        let err_lower = (f(lower) / target - 1.0).abs();
        let ok = err_upper <= tol && err_lower <= tol;
        pass &= ok;
        rows.push(json!({
            "c": c, "gamma": gamma, "target": target,
            "delta_upper": f(upper), "delta_lower": f(lower),
            "rel_err_upper": err_upper, "rel_err_lower": err_lower, "pass": ok,
        }));
    }
    Ok(Verdict::new(
        "counting_equivalence",
        json!({ "cases": cases, "len": len, "tol": tol }),
        None,
        pass,
        json!({ "cases": rows }),
    ))
}

/// Random orthogonal matrix as a product of `dim` Householder reflections.
fn random_orthogonal<T: Real>(dim: usize, rng: &mut ChaCha8Rng) -> Matrix<T> {
    let mut q = Matrix::<T>::identity(dim);
    for _ in 0..dim {
        let v: Vec<T> = (0..dim).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
        let nn: T = v.iter().map(|x| *x * *x).sum();
        if !(nn > T::zero()) {
            continue;
        }
        let two = T::lit(2.0) / nn;
        for i in 0..dim {
            let dot: T = (0..dim).map(|j| q[(i, j)] * v[j]).sum();
            for j in 0..dim {
                q[(i, j)] -= two * dot * v[j];
            }
        }
    }
    q
}

fn combine<T: Real>(
    a: &SyntheticOperator<T>,
    b: &SyntheticOperator<T>,
    sign: T,
    how: Realization,
    seed: u64,
) -> Result<SingularSpectrum<T>> {
    match how {
        Realization::Aligned => {
            if a.len() != b.len() {
                return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
            }
            let v = a.values().iter().zip(b.values()).map(|(x, y)| (*x + sign * *y).abs()).collect();
            SingularSpectrum::from_values(v, None)
        }
        Realization::Rotated { dim } => {
            if dim == 0 || dim > a.len().min(b.len()) {
                return Err(Error::InvalidArgument(format!(
                    "rotated realization needs 1 <= dim <= {}",
                    a.len().min(b.len())
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_orthogonal::<T>(dim, &mut rng);
            let db = Matrix::diagonal(&b.values()[..dim]);
            let rotated = u.matmul(&db)?.matmul(&u.adjoint())?;
            let sum = Matrix::diagonal(&a.values()[..dim]).add(&rotated.scaled(sign))?;
            singular_values_real(&sum)
        }
    }
}

/// Spectrum of the leading part used by a realization.
fn realized<T: Real>(op: &SyntheticOperator<T>, how: Realization) -> SingularSpectrum<T> {
    match how {
        Realization::Aligned => op.spectrum(),
        Realization::Rotated { dim } => SingularSpectrum { values: op.values()[..dim].to_vec(), source_dim: Some(dim) },
    }
}

/// `(Δγ(A+B))^p ≤ (Δγ(A))^p + (Δγ(B))^p`, `p = γ/(1+γ)`.
pub fn check_p1_subadditivity<T: Real>(
    a: &SyntheticOperator<T>,
    b: &SyntheticOperator<T>,
    gamma: f64,
    how: Realization,
    seed: u64,
    tol: f64,
) -> Result<Verdict> {
    let g = T::lit(gamma);
    let sum = combine(a, b, T::one(), how, seed)?;
    let (da, _) = functionals(&realized(a, how), g)?;
    let (db, _) = functionals(&realized(b, how), g)?;
    let (ds, _) = functionals(&sum, g)?;
    let p = gamma / (1.0 + gamma);
    let lhs = f(ds).powf(p);
    let rhs = f(da).powf(p) + f(db).powf(p);
    let pass = lhs <= (1.0 + tol) * rhs;
    Ok(Verdict::new(
        "p1_subadditivity",
        json!({ "gamma": gamma, "realization": how, "len": a.len(), "tol": tol }),
        Some(seed),
        pass,
        json!({
            "delta_a": f(da), "delta_b": f(db), "delta_sum": f(ds),
            "lhs": lhs, "rhs": rhs, "ratio": if rhs > 0.0 { lhs / rhs } else { f64::NAN },
        }),
    ))
}

fn rel_gap(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        (x - y).abs() / x.abs().max(y.abs())
    }
}

/// `Δγ(A+B) = Δγ(A)` and `δγ(A+B) = δγ(A)` for `B ∈ Σ⁰γ`, with aligned diagonals.
pub fn check_p2_kyfan<T: Real>(
    a: &SyntheticOperator<T>,
    b: &SyntheticOperator<T>,
    gamma: f64,
    tol: f64,
) -> Result<Verdict> {
    let g = T::lit(gamma);
    let sum = combine(a, b, T::one(), Realization::Aligned, 0)?;
    let (ua, la) = functionals(&a.spectrum(), g)?;
    let (us, ls) = functionals(&sum, g)?;
    let gap_upper = rel_gap(f(us), f(ua));
    let gap_lower = rel_gap(f(ls), f(la));
    Ok(Verdict::new(
        "p2_kyfan",
        json!({ "gamma": gamma, "len": a.len(), "tol": tol }),
        None,
        gap_upper <= tol && gap_lower <= tol,
        json!({
            "delta_a": f(ua), "delta_lower_a": f(la),
            "delta_sum": f(us), "delta_lower_sum": f(ls),
            "rel_gap_upper": gap_upper, "rel_gap_lower": gap_lower,
        }),
    ))
}

/// `Δ_{2γ}(AB) ≤ Δγ(A) + Δγ(B)` for commuting diagonal realizations.
///
/// A factor counts as `Σ⁰γ` when its scaled functional at the small-`s` end
/// of the window (the window minimum) is below `vanishing` times the other
/// factor's `Δ̂γ`; the product's window minimum must then vanish to the
/// same relative level.
pub fn check_p3_products<T: Real>(
    a: &SyntheticOperator<T>,
    b: &SyntheticOperator<T>,
    gamma: f64,
    tol: f64,
    vanishing: f64,
) -> Result<Verdict> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let g = T::lit(gamma);
    let prod: Vec<T> = a.values().iter().zip(b.values()).map(|(x, y)| *x * *y).collect();
    let prod = SingularSpectrum::from_values(prod, None)?;
    let (da, la) = functionals(&a.spectrum(), g)?;
    let (db, lb) = functionals(&b.spectrum(), g)?;
    let (dp, lp) = functionals(&prod, g + g)?;
    let (da, db, dp, la, lb, lp) = (f(da), f(db), f(dp), f(la), f(lb), f(lp));
    let rhs = da + db;
    let factor_vanishes = la.min(lb) <= vanishing * da.max(db);
    let mut pass = dp <= (1.0 + tol) * rhs;
    if factor_vanishes {
        pass &= lp <= vanishing * da.max(db);
    }
    Ok(Verdict::new(
        "p3_products",
        json!({ "gamma": gamma, "len": a.len(), "tol": tol, "vanishing": vanishing }),
        None,
        pass,
        json!({
            "delta_a": da, "delta_b": db, "delta_2gamma_product": dp,
            "window_min_a": la, "window_min_b": lb, "window_min_product": lp,
            "rhs": rhs, "ratio": if rhs > 0.0 { dp / rhs } else { f64::NAN },
            "factor_in_sigma0": factor_vanishes,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_seq(c: f64, len: usize) -> SyntheticOperator<f64> {
        SyntheticOperator::log_decay(c, 1.0, len).unwrap()
    }

    #[test]
    fn identity_fixture_is_exact() {
        assert!(check_identity_fixture::<f64>(16, 1e-12).unwrap().pass);
    }

    #[test]
    fn counting_equivalence_short() {
        assert!(check_counting_equivalence::<f64>(&[(1.0, 1.0), (2.0, 1.0)], 100_000, 0.05).unwrap().pass);
    }

    #[test]
    fn zero_summand_gives_equality() {
        let a = log_seq(1.0, 50_000);
        let z = SyntheticOperator::zero(50_000).unwrap();
        let v = check_p1_subadditivity(&a, &z, 1.0, Realization::Aligned, 0, 0.1).unwrap();
        assert!(v.pass);
        assert_eq!(v.metrics["ratio"], 1.0);
    }

    #[test]
    fn doubling_scales_by_two() {
        let a = log_seq(1.0, 50_000);
        let v = check_p1_subadditivity(&a, &a, 1.0, Realization::Aligned, 0, 0.1).unwrap();
        let (da, ds) = (v.metrics["delta_a"].as_f64().unwrap(), v.metrics["delta_sum"].as_f64().unwrap());
        assert!((ds / da - 2.0).abs() < 1e-9);
        assert!(v.metrics["ratio"].as_f64().unwrap() < 1.0);
    }

    #[test]
    fn rotated_sum_within_tolerance() {
        let a = log_seq(1.0, 256);
        let b = log_seq(1.5, 256);
        assert!(check_p1_subadditivity(&a, &b, 1.0, Realization::Rotated { dim: 128 }, 9, 0.1).unwrap().pass);
    }

    #[test]
    fn kyfan_perturbations() {
        let a = log_seq(1.0, 100_000);
        let rank3 = SyntheticOperator::finite_rank(10.0, 3, 100_000).unwrap();
        let geo = SyntheticOperator::geometric(0.5, 100_000).unwrap();
        assert!(check_p2_kyfan(&a, &rank3, 1.0, 0.1).unwrap().pass);
        assert!(check_p2_kyfan(&a, &geo, 1.0, 0.1).unwrap().pass);
    }

    #[test]
    fn squares_sit_at_half_the_bound() {
        let a = log_seq(1.0, 100_000);
        let v = check_p3_products(&a, &a, 1.0, 0.1, 0.05).unwrap();
        assert!(v.pass);
        assert!((v.metrics["ratio"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn exponential_factor_flags_sigma0() {
        let a = log_seq(1.0, 100_000);
        let geo = SyntheticOperator::geometric(0.5, 100_000).unwrap();
        let v = check_p3_products(&a, &geo, 1.0, 0.1, 0.05).unwrap();
        assert!(v.pass);
        assert_eq!(v.metrics["factor_in_sigma0"], true);
    }
}
