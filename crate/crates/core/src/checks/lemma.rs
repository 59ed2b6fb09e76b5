//! The combinatorial inequality for cyclic products of pairwise sums, and the
//! lens bound `φ₀(|z|) ≤ ψ₀(|1 - z|)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::Verdict;
use crate::error::{Error, Result};

/// `2l` positive reals, `l ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RTuple {
    r: Vec<f64>,
}

impl RTuple {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.len() < 4 || r.len() % 2 != 0 {
            return Err(Error::InvalidArgument(format!("need 2l entries with l >= 2, got {}", r.len())));
        }
        if let Some(bad) = r.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("entries must be positive and finite, got {bad}")));
        }
        Ok(Self { r })
    }

    pub fn l(&self) -> usize {
        self.r.len() / 2
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }
}

/// `(LHS, RHS)` of the inequality, 1-based indices as in
/// `(r₁+r₂) ∏_{j=2}^{l-1}(r_j+r_{j+1}) (r_l+r_{l+1}) · (r₁+r_{l+2}) ∏_{j=l+2}^{2l-1}(r_j+r_{j+1}) (r_{2l}+r_{l+1})`
/// against `(max r)² ∏″ r_j`, where `∏″` drops one maximal and one minimal factor.
pub fn lemma44_sides(t: &RTuple) -> (f64, f64) {
    let l = t.l();
    let r = |i: usize| t.r[i - 1];
    let mut lhs = (r(1) + r(2)) * (r(l) + r(l + 1));
    for j in 2..l {
        lhs *= r(j) + r(j + 1);
    }
    lhs *= (r(1) + r(l + 2)) * (r(2 * l) + r(l + 1));
    for j in (l + 2)..(2 * l) {
        lhs *= r(j) + r(j + 1);
    }
    let mut sorted = t.r.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max = sorted[sorted.len() - 1];
    let inner: f64 = sorted[1..sorted.len() - 1].iter().product();
    (lhs, max * max * inner)
}

/// `samples` tuples per `l`, radii log-uniform on `[r_min, 1]`.
pub fn check_lemma44(ls: &[usize], samples: usize, r_min: f64, seed: u64) -> Result<Verdict> {
    if !(r_min > 0.0 && r_min < 1.0) {
        return Err(Error::InvalidArgument(format!("r_min must lie in (0, 1), got {r_min}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_min = r_min.ln();
    let mut rows = Vec::new();
    let mut total = 0usize;
    for &l in ls {
        if l < 2 {
            return Err(Error::InvalidArgument(format!("l must be >= 2, got {l}")));
        }
        let mut violations = 0usize;
        let mut min_ratio = f64::INFINITY;
        for _ in 0..samples {
            let r = (0..2 * l).map(|_| (log_min * rng.gen::<f64>()).exp()).collect();
            let (lhs, rhs) = lemma44_sides(&RTuple::new(r)?);
            let ratio = lhs / rhs;
            min_ratio = min_ratio.min(ratio);
            if !(ratio >= 1.0) {
                violations += 1;
            }
        }
        total += violations;
        rows.push(json!({ "l": l, "samples": samples, "violations": violations, "min_ratio": min_ratio }));
    }
    Ok(Verdict::new(
        "lemma44",
        json!({ "l": ls, "samples_per_l": samples, "r_min": r_min }),
        Some(seed),
        total == 0,
        json!({ "violations": total, "per_l": rows }),
    ))
}

/// Which formula for `ψ₀` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Psi0Form {
    /// `ψ₀(r) = (1 + log(1/r))^{-γ}`.
    #[default]
    Corrected,
    /// `ψ₀(r) = (1 + 1/log r)^{-γ}`; not real for `1/e < r < 1` unless `γ` is an integer.
    Printed,
}

pub fn psi0(r: f64, gamma: f64, form: Psi0Form) -> f64 {
    match form {
        Psi0Form::Corrected => (1.0 + (1.0 / r).ln()).powf(-gamma),
        Psi0Form::Printed => (1.0 + 1.0 / r.ln()).powf(-gamma),
    }
}

fn phi0(modulus: f64, gamma: f64) -> f64 {
    (1.0 + (1.0 / (1.0 - modulus)).ln()).powf(-gamma)
}

/// `φ₀(|z|) ≤ ψ₀(r)` for `z = 1 - r e^{iθ}` in the lens
/// `0 < r < min(√2 δ, 2 cos θ)`, `θ ∈ (0, π/2)`, plus the two fixed points
/// `θ = 0` (equality) and `θ = π/4` (strict).
pub fn check_psi0_bound(gamma: f64, delta: f64, samples: usize, form: Psi0Form, seed: u64) -> Result<Verdict> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1/2], got {delta}")));
    }
    let radius = std::f64::consts::SQRT_2 * delta;
    let eval = |r: f64, theta: f64| {
        let z_re = 1.0 - r * theta.cos();
        let z_im = -r * theta.sin();
        let modulus = z_re.hypot(z_im);
        (phi0(modulus, gamma), psi0(r, gamma, form))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut violations, mut undefined) = (0usize, 0usize);
    let mut max_ratio = 0.0f64;
    for _ in 0..samples {
        let theta = rng.gen::<f64>() * std::f64::consts::FRAC_PI_2;
        let r = rng.gen::<f64>() * radius.min(2.0 * theta.cos());
        if r == 0.0 {
            continue;
        }
        let (lhs, rhs) = eval(r, theta);
        if !rhs.is_finite() {
            undefined += 1;
            continue;
        }
        max_ratio = max_ratio.max(lhs / rhs);
        if lhs > rhs * (1.0 + 1e-14) {
            violations += 1;
        }
    }
    let r0 = 0.5 * radius;
    let (eq_lhs, eq_rhs) = eval(r0, 0.0);
    let (st_lhs, st_rhs) = eval(r0, std::f64::consts::FRAC_PI_4);
    let equality_gap = (eq_lhs - eq_rhs).abs() / eq_rhs;
    let strict = st_lhs < st_rhs;
    let pass = violations == 0 && undefined == 0 && equality_gap <= 1e-12 && strict;
    Ok(Verdict::new(
        "psi0_bound",
        json!({ "gamma": gamma, "delta": delta, "samples": samples, "form": form }),
        Some(seed),
        pass,
        json!({
            "violations": violations, "undefined": undefined, "max_ratio": max_ratio,
            "real_axis_gap": equality_gap, "diagonal_strict": strict,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_evaluations() {
        let (lhs, rhs) = lemma44_sides(&RTuple::new(vec![1.0; 4]).unwrap());
        assert_eq!((lhs, rhs), (16.0, 1.0));
        let (lhs, rhs) = lemma44_sides(&RTuple::new(vec![2.0, 1.0, 1.0, 1.0]).unwrap());
        assert_eq!((lhs, rhs), (36.0, 4.0));
    }

    #[test]
    fn l3_expands_cycle() {
        // (r1+r2)(r2+r3)(r3+r4)(r1+r5)(r5+r6)(r6+r4)
        let r = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let (lhs, rhs) = lemma44_sides(&RTuple::new(r).unwrap());
        assert_eq!(lhs, 3.0 * 5.0 * 7.0 * 6.0 * 11.0 * 10.0);
        assert_eq!(rhs, 36.0 * 2.0 * 3.0 * 4.0 * 5.0);
    }

    #[test]
    fn rejects_bad_tuples() {
        assert!(RTuple::new(vec![1.0, 1.0]).is_err());
        assert!(RTuple::new(vec![1.0, 1.0, 1.0]).is_err());
        assert!(RTuple::new(vec![1.0, 0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn corrected_psi0_passes_and_printed_is_undefined() {
        assert!(check_psi0_bound(1.5, 0.3, 2000, Psi0Form::Corrected, 1).unwrap().pass);
        let printed = check_psi0_bound(1.5, 0.3, 2000, Psi0Form::Printed, 1).unwrap();
        assert!(!printed.pass);
    }
}
