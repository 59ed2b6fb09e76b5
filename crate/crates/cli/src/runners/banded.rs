//! Banded matrices with log-decaying diagonals.

use anyhow::{ensure, Result};
use bergspec::banded::{assemble_banded, banded_minus_toeplitz, Perturbation};
use bergspec::checks::Verdict;
use bergspec::spectra::{singular_values, tridiagonal_leading, IndexWindow};
use bergspec::{GammaExponent, SingularSpectrum};
use num_complex::Complex;
use serde_json::{json, Value};

use super::timed;
use crate::config::{BandedConfig, DENSE_LIMIT};
use crate::output::{num, RunOutput};
use crate::plot::{Axis, Plot, Series};

fn scaled_at(spec: &SingularSpectrum, gamma: f64, n: usize) -> f64 {
    ((n + 1) as f64).ln().powf(gamma) * spec.s(n)
}

pub fn banded(cfg: &BandedConfig, out: &mut RunOutput) -> Result<()> {
    let gamma = GammaExponent::new(cfg.gamma)?;
    let coeffs: Vec<Complex<f64>> = cfg.coeffs.iter().map(|c| c.value()).collect();
    let h = coeffs.len() / 2;
    let diagonal_only = coeffs.iter().enumerate().all(|(k, b)| k == h || b.norm() == 0.0);
    let d = assemble_banded(cfg.n, coeffs.clone(), gamma, cfg.offset, cfg.perturbation)?;
    let k = *cfg.check_indices.last().unwrap();
    let (spec, solver) = timed("banded spectrum", || match d.to_tridiagonal() {
        Some(t) => Ok((tridiagonal_leading(&t, k)?, "tridiagonal")),
        None => {
            ensure!(cfg.n <= DENSE_LIMIT, "N = {} exceeds the dense limit for a non-tridiagonal band", cfg.n);
            Ok((singular_values(&d.to_dense())?, "dense"))
        }
    })?;
    let scaled = spec.scaled(cfg.gamma);
    out.write_csv(
        "spectrum.csv",
        &["n", "s_n", "scaled"],
        spec.values.iter().zip(&scaled).enumerate().map(|(i, (s, sc))| [(i + 1).to_string(), num(*s), num(*sc)]),
    )?;
    let at: Vec<f64> = cfg.check_indices.iter().map(|&n| scaled_at(&spec, cfg.gamma, n)).collect();
    let symbol_sup = d.symbol()?.sup_norm();
    let params = json!({
        "coeffs": cfg.coeffs, "gamma": cfg.gamma, "n": cfg.n, "offset": cfg.offset,
        "perturbation": cfg.perturbation, "check_indices": cfg.check_indices,
    });

    if diagonal_only {
        // s_n are the sorted moduli |b_0| (1 + ε(m)) / (log m)^γ, m = m₀ .. m₀+N-1
        let b0 = coeffs[h].norm();
        let mut analytic: Vec<f64> = (0..cfg.n)
            .map(|i| {
                let m = (i + cfg.offset) as f64;
                let eps = match cfg.perturbation {
                    Perturbation::None => 0.0,
                    Perturbation::InverseLog { amplitude } => amplitude / m.ln(),
                };
                (b0 * (1.0 + eps) / m.ln().powf(cfg.gamma)).abs()
            })
            .collect();
        analytic.sort_by(|a, b| b.total_cmp(a));
        let worst = spec
            .values
            .iter()
            .zip(&analytic)
            .map(|(s, a)| if s == a { 0.0 } else { (s - a).abs() / a.abs().max(s.abs()) })
            .fold(0.0, f64::max);
        out.verdict(Verdict::new(
            "banded_diagonal_analytic",
            json!({ "params": params, "analytic_tol": cfg.analytic_tol }),
            None,
            worst <= cfg.analytic_tol,
            json!({ "solver": solver, "max_rel_diff": worst, "compared": spec.len(), "scaled_at": at }),
        ));
    } else {
        let increasing = at.windows(2).all(|w| w[1] > w[0]);
        let last = *at.last().unwrap();
        let band_ok = last >= cfg.band_at_last[0] && last <= cfg.band_at_last[1];
        let difference = if cfg.difference_n > 0 { difference_diagnostic(cfg, &coeffs, out)? } else { Value::Null };
        out.verdict(Verdict::new(
            "banded_trend",
            json!({ "params": params, "band_at_last": cfg.band_at_last }),
            None,
            increasing && band_ok,
            json!({
                "solver": solver, "scaled_at": at, "increasing": increasing, "last_in_band": band_ok,
                "symbol_sup_norm": symbol_sup, "difference": difference,
            }),
        ));
    }

    let upto = k.min(scaled.len());
    let plot = Plot::new("banded: (log(n+1))^gamma s_n", "n", "scaled", Axis::Log, Axis::Linear)
        .series(Series::new(format!("N = {}", cfg.n), (1..=upto).map(|n| (n as f64, scaled[n - 1])).collect()))
        .guide("sup |phi_1,b|", symbol_sup);
    out.write("scaled.svg", plot.to_svg().as_bytes())
}

/// Singular values of `D - P_N T_φ P_N` at a small dimension; the scaled
/// sequence should fall along the window.
fn difference_diagnostic(cfg: &BandedConfig, coeffs: &[Complex<f64>], out: &mut RunOutput) -> Result<Value> {
    let n = cfg.difference_n;
    let d = assemble_banded(n, coeffs.to_vec(), GammaExponent::new(cfg.gamma)?, cfg.offset, cfg.perturbation)?;
    let spec = timed("difference spectrum", || Ok(singular_values(&banded_minus_toeplitz(&d)?)?))?;
    let scaled = spec.scaled(cfg.gamma);
    out.write_csv(
        "difference.csv",
        &["n", "s_n", "scaled"],
        spec.values.iter().zip(&scaled).enumerate().map(|(i, (s, sc))| [(i + 1).to_string(), num(*s), num(*sc)]),
    )?;
    let w = IndexWindow::default_for(n);
    let (lo, hi) = (scaled[w.lo - 1], scaled[w.hi - 1]);
    Ok(
        json!({ "n": n, "window": [w.lo, w.hi], "scaled_lo": lo, "scaled_hi": hi, "decreasing": hi < lo, "s_1": spec.s(1) }),
    )
}
