//! Limit `(log n)^γ s_n → g(1)‖φ₁‖∞` and its signed version.

use anyhow::{ensure, Result};
use bergspec::assembly::assemble_toeplitz;
use bergspec::checks::Verdict;
use bergspec::spectra::{fit_limit, gamma_functionals, s_window_for, singular_values, IndexWindow};
use bergspec::symbol::{AngularSpec, ArcPartition};
use bergspec::{AsymptoticFit, CountingProfile, GammaExponent, RadialWeight, SeparableSymbol, SingularSpectrum};
use serde_json::{json, Value};

use super::{timed, toeplitz_signed, toeplitz_spectrum};
use crate::config::{SignedConfig, Theorem1Config};
use crate::output::{num, RunOutput};
use crate::plot::{Axis, Plot, Series};

fn window_of(w: Option<[usize; 2]>) -> Option<IndexWindow> {
    w.map(|[lo, hi]| IndexWindow { lo, hi })
}

fn fit_json(fit: &AsymptoticFit) -> Value {
    json!({
        "c_hat": fit.c_hat, "window": [fit.window.lo, fit.window.hi], "residual": fit.residual,
        "endpoint_lo": fit.endpoint_lo, "endpoint_hi": fit.endpoint_hi,
    })
}

fn in_band(value: f64, target: f64, band: [f64; 2]) -> bool {
    value >= band[0] * target && value <= band[1] * target
}

/// `n, s_n, (log(n+1))^γ s_n` rows.
fn spectrum_rows(spec: &SingularSpectrum, gamma: f64) -> Vec<[String; 3]> {
    spec.values
        .iter()
        .zip(spec.scaled(gamma))
        .enumerate()
        .map(|(i, (s, sc))| [(i + 1).to_string(), num(*s), num(sc)])
        .collect()
}

fn scaled_series(label: &str, spec: &SingularSpectrum, gamma: f64, upto: usize) -> Series {
    let scaled = spec.scaled(gamma);
    Series::new(label, (1..=upto.min(scaled.len())).map(|n| (n as f64, scaled[n - 1])).collect())
}

pub fn theorem1(cfg: &Theorem1Config, out: &mut RunOutput) -> Result<()> {
    let angular = cfg.symbol.build()?;
    let profile = cfg.profile.build()?;
    let target = profile.limit() * angular.sup_norm();
    let (spec, solver) = toeplitz_spectrum(&angular, profile.clone(), cfg.gamma, cfg.n)?;
    let window = window_of(cfg.window);
    let fit = fit_limit(&spec, cfg.gamma, window)?;
    let s_window = window.map(|w| s_window_for(&spec, w)).transpose()?;

    out.write_csv("spectrum.csv", &["n", "s_n", "scaled"], spectrum_rows(&spec, cfg.gamma))?;
    let mut functionals = Value::Null;
    if cfg.gamma > 0.0 {
        let est = gamma_functionals(&spec, cfg.gamma, s_window, cfg.functional_points)?;
        let profile = CountingProfile::compute(&spec.values, cfg.gamma, est.window.lo, est.window.hi, est.points)?;
        let mut buf = Vec::new();
        profile.write_csv(&mut buf)?;
        out.write("counting.csv", &buf)?;
        functionals = json!({
            "delta_upper": est.delta_upper, "delta_lower": est.delta_lower,
            "s_window": [est.window.lo, est.window.hi], "floor": est.floor, "points": est.points,
        });
    }

    let ratio = if target > 0.0 { fit.c_hat / target } else { f64::NAN };
    let band_ok = if target > 0.0 { in_band(fit.c_hat, target, cfg.band) } else { fit.c_hat.abs() <= 1e-12 };
    let increasing = fit.endpoint_hi > fit.endpoint_lo;
    let pass = band_ok && (!cfg.require_endpoint_increase || increasing);
    let params = json!({
        "symbol": cfg.symbol, "profile": cfg.profile, "gamma": cfg.gamma, "n": cfg.n,
        "band": cfg.band, "require_endpoint_increase": cfg.require_endpoint_increase,
    });
    let metrics = json!({
        "solver": solver.label(), "target": target, "fit": fit_json(&fit), "c_hat_over_target": ratio,
        "in_band": band_ok, "endpoint_increasing": increasing, "functionals": functionals,
    });
    out.write_json("fit.json", &metrics)?;
    out.verdict(Verdict::new("theorem1_limit", params, None, pass, metrics));

    let mut plot = Plot::new("(log(n+1))^gamma s_n", "n", "scaled", Axis::Log, Axis::Linear)
        .series(scaled_series(&format!("N = {}", cfg.n), &spec, cfg.gamma, cfg.n / 8))
        .guide("target", target)
        .guide("c_hat", fit.c_hat);

    if cfg.arc_compare {
        let merged = timed("arc pieces", || arc_merged(cfg))?;
        let arc_fit = fit_limit(&merged, cfg.gamma, window)?;
        let rel = (arc_fit.c_hat - fit.c_hat).abs() / fit.c_hat.abs();
        out.verdict(Verdict::new(
            "arc_decomposition",
            json!({ "symbol": cfg.symbol, "gamma": cfg.gamma, "n": cfg.n, "arc_tol": cfg.arc_tol }),
            None,
            rel <= cfg.arc_tol,
            json!({ "c_hat_whole": fit.c_hat, "c_hat_arcs": arc_fit.c_hat, "rel_change": rel, "fit_arcs": fit_json(&arc_fit) }),
        ));
        plot = plot.series(scaled_series("arc pieces", &merged, cfg.gamma, cfg.n / 8));
    }

    if let Some(m) = cfg.compare_n {
        let (other, _) = toeplitz_spectrum(&angular, profile, cfg.gamma, m)?;
        let k = cfg.stability_leading;
        let worst = (1..=k)
            .map(|i| {
                let (a, b) = (spec.s(i), other.s(i));
                if a == b {
                    0.0
                } else {
                    (a - b).abs() / a.abs().max(b.abs())
                }
            })
            .fold(0.0, f64::max);
        out.verdict(Verdict::new(
            "truncation_stability",
            json!({ "n": cfg.n, "compare_n": m, "leading": k, "tol": cfg.stability_tol }),
            None,
            worst <= cfg.stability_tol,
            json!({ "max_rel_diff": worst }),
        ));
        plot = plot.series(scaled_series(&format!("N = {m}"), &other, cfg.gamma, m / 8));
    }
    out.write("scaled.svg", plot.to_svg().as_bytes())
}

/// Spectrum of `⊕_j P_N T_{c_j χ_j φ₀} P_N`. Rotation by `2πj/L` is a
/// diagonal unitary similarity, so every arc piece has the singular values
/// of the first one scaled by `|c_j|`.
fn arc_merged(cfg: &Theorem1Config) -> Result<SingularSpectrum> {
    let AngularSpec::EqualSteps { values } = &cfg.symbol else {
        anyhow::bail!("arc comparison needs an equal_steps symbol");
    };
    let arcs = ArcPartition::new(values.len())?;
    let weight = RadialWeight::new(GammaExponent::new(cfg.gamma)?, cfg.profile.build()?);
    let sym = SeparableSymbol::new(arcs.indicator(1)?, weight);
    let base = singular_values(&assemble_toeplitz(&sym, cfg.n)?.matrix)?;
    let merged = values.iter().flat_map(|c| base.values.iter().map(move |s| c.abs() * s)).collect();
    Ok(SingularSpectrum::from_values(merged, Some(cfg.n))?)
}

pub fn signed(cfg: &SignedConfig, out: &mut RunOutput) -> Result<()> {
    let angular = cfg.symbol.build()?;
    let (pos, neg) = angular.pos_neg_parts()?;
    let (spec, solver) = toeplitz_signed(&angular, cfg.gamma, cfg.n)?;
    let norm = spec.positives.first().copied().unwrap_or(0.0).max(spec.negatives.first().copied().unwrap_or(0.0));
    let window = window_of(cfg.window).unwrap_or_else(|| IndexWindow::default_for(cfg.n));
    ensure!(norm > 0.0, "the truncation is zero");

    let mut branches = Vec::new();
    let mut fitted = Vec::new();
    let mut pass = true;
    let mut plot = Plot::new("signed branches", "n", "(log(n+1))^gamma lambda_n", Axis::Log, Axis::Linear);
    for (label, part, branch) in
        [("positive", &pos, spec.positive_spectrum()), ("negative", &neg, spec.negative_spectrum())]
    {
        let target = part.sup_norm();
        let above_noise = branch.values.iter().filter(|v| **v > cfg.noise * norm).count();
        let entry = if target > 0.0 {
            if branch.len() >= window.hi {
                let fit = fit_limit(&branch, cfg.gamma, Some(window))?;
                let ok = in_band(fit.c_hat, target, cfg.band);
                let increasing = fit.endpoint_hi > fit.endpoint_lo;
                pass &= ok && increasing;
                fitted.push((fit.c_hat, target));
                json!({
                    "branch": label, "target": target, "fit": fit_json(&fit), "c_hat_over_target": fit.c_hat / target,
                    "in_band": ok, "endpoint_increasing": increasing, "len": branch.len(),
                })
            } else {
                pass = false;
                json!({ "branch": label, "target": target, "len": branch.len(), "in_band": false, "note": "branch shorter than the fit window" })
            }
        } else {
            let ok = above_noise == 0;
            pass &= ok;
            json!({ "branch": label, "target": 0.0, "above_noise": above_noise, "empty": ok })
        };
        branches.push(entry);
        plot.series.push(scaled_series(label, &branch, cfg.gamma, cfg.n / 8));
        let rows: Vec<[String; 3]> = spectrum_rows(&branch, cfg.gamma);
        out.write_csv(&format!("{label}.csv"), &["n", "lambda_n", "scaled"], rows)?;
    }
    // both branches approach their limits at the same rate, so their ratio
    // is much closer to the target ratio than either fit is to its target
    let mut branch_ratio = Value::Null;
    if let [(cp, tp), (cn, tn)] = fitted[..] {
        let (got, want) = (cp / cn, tp / tn);
        let ok = (got / want - 1.0).abs() <= cfg.ratio_tol;
        pass &= ok;
        branch_ratio = json!({ "fitted": got, "target": want, "within_tol": ok });
    }
    out.verdict(Verdict::new(
        "signed_limits",
        json!({
            "symbol": cfg.symbol, "gamma": cfg.gamma, "n": cfg.n, "band": cfg.band,
            "ratio_tol": cfg.ratio_tol, "noise": cfg.noise,
        }),
        None,
        pass,
        json!({
            "solver": solver.label(), "norm": norm, "window": [window.lo, window.hi],
            "branches": branches, "branch_ratio": branch_ratio,
        }),
    ));
    out.write("signed.svg", plot.to_svg().as_bytes())
}
