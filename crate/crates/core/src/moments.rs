//! Radial moments `M(p) = ∫₀¹ r^p φ₀,γ(r) g(r) dr` and their large-`p` asymptotics.
//!
//! The quadrature works in `u = -log(1-r)`, where the integrand becomes
//! `(1-e^{-u})^p e^{-u} (1+u)^{-γ} g(1-e^{-u})`: bounded by `e^{-u}`, with a
//! single bump of unit width near `u = log p`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::scalar::Real;
use crate::symbol::{GammaExponent, RadialWeight};

/// Relative accuracy requested from the moment quadrature.
pub const MOMENT_REL_TOL: f64 = 1e-12;
/// Maximum number of adaptive panels per moment.
pub const MOMENT_PANEL_BUDGET: usize = 2000;
/// Quadrature is refused from this power on.
pub const QUADRATURE_POWER_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    Quadrature,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentResult<T> {
    pub value: T,
    pub method: MomentMethod,
    /// Self-reported bound of the method; a heuristic, not a guarantee.
    pub error_estimate: T,
    pub converged: bool,
}

/// Truncation point of the `u` domain.
pub fn u_max(power: u64) -> f64 {
    60f64.max(40.0 + 2.0 * ((power + 2) as f64).ln())
}

/// `(1 - e^{-u})^p` evaluated without cancellation.
#[inline]
fn power_of_one_minus_exp<T: Real>(u: T, p: T) -> T {
    if p == T::zero() {
        return T::one();
    }
    let e = (-u).exp();
    let log_base = if e < T::lit(0.5) { (-e).ln_1p() } else { (-(-u).exp_m1()).ln() };
    (p * log_base).exp()
}

/// `∫₀¹ r^p φ₀,γ(r) g(r) dr` by adaptive quadrature in `u = -log(1-r)`.
pub fn moment_quadrature<T: Real>(power: u64, weight: &RadialWeight<T>) -> Result<MomentResult<T>> {
    if power >= QUADRATURE_POWER_LIMIT {
        return Err(Error::Budget(format!(
            "quadrature refused for power {power} >= {QUADRATURE_POWER_LIMIT}; use the asymptotic"
        )));
    }
    let p = T::from_u64(power).unwrap();
    let mut upper = T::lit(u_max(power));
    let mut tail = (-upper).exp() * weight.profile.limit().abs().max(T::one());
    if let Some(radius) = weight.profile.support_radius() {
        let uc = -(-radius).ln_1p();
        if uc < upper {
            upper = uc;
            tail = T::zero();
        }
    }
    let integrand = |u: T| {
        let r = -(-u).exp_m1();
        power_of_one_minus_exp(u, p) * (-u).exp() * weight.log_weight_u(u) * weight.profile.eval(r)
    };
    let breakpoints = panel_schedule(upper, T::lit(4.0));
    let q = integrate_adaptive(
        &integrand,
        &breakpoints,
        T::tol(MOMENT_REL_TOL),
        T::min_positive_value(),
        MOMENT_PANEL_BUDGET,
    );
    Ok(MomentResult {
        value: q.value,
        method: MomentMethod::Quadrature,
        error_estimate: q.error_estimate + tail,
        converged: q.converged,
    })
}

fn panel_schedule<T: Real>(upper: T, width: T) -> Vec<T> {
    let count = (upper / width).ceil().to_usize().unwrap_or(1).max(1);
    let mut bp: Vec<T> = (0..count).map(|i| width * T::from_usize_lossy(i)).collect();
    bp.push(upper);
    bp
}

/// Same integral over `s = 1 - r` with dyadically graded panels toward `s = 0`.
///
/// Independent of the `u` substitution; used for cross-validation.
pub fn moment_quadrature_graded<T: Real>(power: u64, weight: &RadialWeight<T>) -> MomentResult<T> {
    let p = T::from_u64(power).unwrap();
    let integrand = |s: T| {
        if s <= T::zero() {
            return T::zero();
        }
        let r = T::one() - s;
        let rp = if power == 0 { T::one() } else { (p * (-s).ln_1p()).exp() };
        let u = -s.ln();
        rp * weight.log_weight_u(u) * weight.profile.eval(r)
    };
    let levels = 100usize;
    let mut breakpoints: Vec<T> = (0..=levels).rev().map(|k| T::lit(0.5f64.powi(k as i32))).collect();
    breakpoints.insert(0, T::zero());
    let q = integrate_adaptive(&integrand, &breakpoints, T::tol(MOMENT_REL_TOL), T::min_positive_value(), 20_000);
    MomentResult {
        value: q.value,
        method: MomentMethod::Quadrature,
        error_estimate: q.error_estimate,
        converged: q.converged,
    }
}

/// Leading term `g(1) / (p (log p)^γ)` for large `p`.
pub fn moment_asymptotic<T: Real>(power: u64, weight: &RadialWeight<T>) -> Result<MomentResult<T>> {
    if power < 2 {
        return Err(Error::Domain(format!("asymptotic needs power >= 2, got {power}")));
    }
    let g1 = weight.profile.limit();
    if g1 == T::zero() {
        return Err(Error::Domain("asymptotic needs g(1) != 0".into()));
    }
    let p = T::from_u64(power).unwrap();
    let gamma = weight.gamma.value();
    let lp = p.ln();
    let value = g1 / (p * lp.powf(gamma));
    // next-order scale: relative correction γ / log p
    let error_estimate = (g1 * gamma / (p * lp.powf(gamma + T::one()))).abs();
    Ok(MomentResult { value, method: MomentMethod::Asymptotic, error_estimate, converged: true })
}

/// Diagonal entry `(T_{φ₀} e_n, e_n) = 2(n+1) ∫₀¹ r^{2n+1} φ₀,γ(r) dr`.
pub fn diag_entry<T: Real>(n: u64, gamma: GammaExponent<T>) -> Result<T> {
    let m = moment_quadrature(2 * n + 1, &RadialWeight::pure(gamma))?;
    if !m.converged {
        return Err(Error::Quadrature {
            value: m.value.to_f64_lossy(),
            error_estimate: m.error_estimate.to_f64_lossy(),
        });
    }
    Ok(T::from_u64(2 * (n + 1)).unwrap() * m.value)
}

/// Power-weight diagonal `2(n+1) ∫₀¹ r^{2n+1} (1-r)^γ dr = 2(n+1) B(2n+2, γ+1)`.
pub fn power_weight_moment<T: Real>(n: u64, gamma: T) -> Result<T> {
    if !(gamma > T::zero()) {
        return Err(Error::InvalidArgument(format!("power weight needs gamma > 0, got {gamma}")));
    }
    use statrs::function::gamma::ln_gamma;
    let a = (2 * n + 2) as f64;
    let b = gamma.to_f64_lossy() + 1.0;
    let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    Ok(T::lit(2.0 * (n + 1) as f64 * ln_beta.exp()))
}

/// Moments `M(p)` for `p = 1 ..= max_power`, stored at index `p - 1`.
///
/// Computed in parallel, one power per task; the merge is by index so the
/// table does not depend on scheduling.
#[derive(Debug, Clone)]
pub struct MomentTable<T> {
    values: Vec<MomentResult<T>>,
}

impl<T: Real> MomentTable<T> {
    pub fn compute(max_power: u64, weight: &RadialWeight<T>) -> Result<Self> {
        let values = (1..=max_power)
            .into_par_iter()
            .map(|p| {
                let m = moment_quadrature(p, weight)?;
                if !m.converged {
                    return Err(Error::Quadrature {
                        value: m.value.to_f64_lossy(),
                        error_estimate: m.error_estimate.to_f64_lossy(),
                    });
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    /// `M(p)` for `1 <= p <= max_power`.
    #[inline]
    pub fn get(&self, power: usize) -> T {
        self.values[power - 1].value
    }

    pub fn max_power(&self) -> usize {
        self.values.len()
    }

    /// RFC-4180 CSV with columns `n, gamma, value, method, error_estimate`.
    pub fn write_csv<W: Write>(&self, gamma: T, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "gamma", "value", "method", "error_estimate"])?;
        for (i, m) in self.values.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                format!("{gamma:e}"),
                format!("{:e}", m.value),
                "quadrature".to_string(),
                format!("{:e}", m.error_estimate),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::RadialProfile;

    fn weight(gamma: f64) -> RadialWeight<f64> {
        RadialWeight::pure(GammaExponent::new(gamma).unwrap())
    }

    #[test]
    fn power_moment_exact_when_gamma_zero() {
        let m = moment_quadrature(5, &weight(0.0)).unwrap();
        assert!(m.converged);
        assert!((m.value - 1.0 / 6.0).abs() / (1.0 / 6.0) < 1e-14);
        for p in [0u64, 1, 17, 1000, 123_456] {
            let m = moment_quadrature(p, &weight(0.0)).unwrap();
            let exact = 1.0 / (p as f64 + 1.0);
            assert!(((m.value - exact) / exact).abs() < 1e-13, "p={p}: {} vs {exact}", m.value);
        }
    }

    #[test]
    fn large_power_within_band_of_leading_term() {
        let n = 1_000_000u64;
        let m = moment_quadrature(n, &weight(1.0)).unwrap();
        let lead = 1.0 / (n as f64 * (n as f64).ln());
        assert!(((m.value - lead) / lead).abs() < 0.15);
    }

    #[test]
    fn asymptotic_examples() {
        let n = 1_000_000u64;
        let a = moment_asymptotic(n, &weight(1.0)).unwrap();
        assert!((a.value - 7.238_241_365_054_197e-8).abs() < 1e-20);
        assert_eq!(a.method, MomentMethod::Asymptotic);
        let half = RadialWeight::new(GammaExponent::new(1.0).unwrap(), RadialProfile::Constant(0.5));
        assert_eq!(moment_asymptotic(n, &half).unwrap().value, a.value * 0.5);
        let flat = moment_asymptotic(n, &weight(0.0)).unwrap();
        assert!((flat.value * (n as f64 + 1.0) - 1.0).abs() < 2e-6);
        assert!(moment_asymptotic(1, &weight(1.0)).is_err());
        let cut = RadialWeight::new(GammaExponent::new(1.0).unwrap(), RadialProfile::Cutoff { radius: 0.5 });
        assert!(moment_asymptotic(100, &cut).is_err());
    }

    #[test]
    fn diag_entry_identity_and_decay() {
        for n in [0u64, 3, 100, 10_000] {
            assert!((diag_entry(n, GammaExponent::new(0.0f64).unwrap()).unwrap() - 1.0).abs() < 1e-13);
        }
        let g = GammaExponent::new(1.0).unwrap();
        let big = 1_000_000u64;
        let d = diag_entry(big, g).unwrap();
        let lead = 1.0 / ((2 * big + 1) as f64).ln();
        assert!(((d - lead) / lead).abs() < 0.15);
        let mut prev = f64::INFINITY;
        for n in 0..200 {
            let d = diag_entry(n, g).unwrap();
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn power_weight_examples() {
        assert!((power_weight_moment::<f64>(0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!((power_weight_moment::<f64>(10, 1.0).unwrap() - 1.0 / 23.0).abs() < 1e-13);
        assert!(power_weight_moment::<f64>(10, 0.0).is_err());
        // n^γ · value → Γ(γ+1)/2^γ
        let n = 100_000u64;
        let v = power_weight_moment::<f64>(n, 1.0).unwrap() * n as f64;
        assert!((v - 0.5).abs() < 1e-4);
    }

    #[test]
    fn refuses_huge_powers() {
        assert!(matches!(moment_quadrature(QUADRATURE_POWER_LIMIT, &weight(1.0)), Err(Error::Budget(_))));
    }

    #[test]
    fn cutoff_profile_truncates_domain() {
        let cut = RadialWeight::new(GammaExponent::new(0.0).unwrap(), RadialProfile::Cutoff { radius: 0.5 });
        let m = moment_quadrature(3, &cut).unwrap();
        assert!((m.value - 0.5f64.powi(4) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn table_and_csv() {
        let t = MomentTable::compute(6, &weight(0.0)).unwrap();
        assert_eq!(t.max_power(), 6);
        assert!((t.get(3) - 0.25).abs() < 1e-15);
        let mut buf = Vec::new();
        t.write_csv(0.0, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,gamma,value,method,error_estimate\n1,"));
        assert_eq!(text.lines().count(), 7);
    }
}
