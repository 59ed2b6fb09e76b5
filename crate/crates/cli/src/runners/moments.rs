//! Diagonal-entry and moment asymptotics, and the power-weight comparison.

use anyhow::{ensure, Result};
use bergspec::checks::Verdict;
use bergspec::moments::{moment_asymptotic, moment_quadrature, power_weight_moment};
use bergspec::symbol::ProfileSpec;
use bergspec::{GammaExponent, RadialWeight};
use serde_json::json;
use statrs::function::gamma::gamma as gamma_fn;

use super::timed;
use crate::config::{PushnitskiConfig, RadialConfig, WatsonConfig};
use crate::output::{num, RunOutput};
use crate::plot::{Axis, Plot, Series};

/// `|r_k - 1|` strictly decreases along the grid.
fn approaches_one(ratios: &[f64]) -> bool {
    ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs())
}

fn quadrature(power: u64, weight: &RadialWeight) -> Result<f64> {
    let m = moment_quadrature(power, weight)?;
    ensure!(m.converged, "moment quadrature for p = {power} did not converge (error {:e})", m.error_estimate);
    Ok(m.value)
}

pub fn radial(cfg: &RadialConfig, out: &mut RunOutput) -> Result<()> {
    let weight = RadialWeight::new(GammaExponent::new(cfg.gamma)?, cfg.profile.build()?);
    let g1 = weight.profile.limit();
    ensure!(g1 != 0.0, "radial mode needs g(1) != 0");
    let rows = timed("diagonal entries", || {
        cfg.n_grid
            .iter()
            .map(|&n| {
                let diag = 2.0 * (n + 1) as f64 * quadrature(2 * n + 1, &weight)?;
                let asym = g1 / ((2 * n + 1) as f64).ln().powf(cfg.gamma);
                Ok((n, diag, asym, diag / asym))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    out.write_csv(
        "radial.csv",
        &["n", "diagonal", "asymptote", "ratio"],
        rows.iter().map(|&(n, d, a, r)| [n.to_string(), num(d), num(a), num(r)]),
    )?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.3).collect();
    let last = *ratios.last().unwrap();
    let monotone = approaches_one(&ratios);
    let within = (last - 1.0).abs() <= cfg.tol_at_max;
    out.verdict(Verdict::new(
        "radial_diagonal_ratio",
        json!({ "gamma": cfg.gamma, "profile": cfg.profile, "n_grid": cfg.n_grid, "tol_at_max": cfg.tol_at_max }),
        None,
        monotone && within,
        json!({ "ratios": ratios, "ratio_at_max": last, "monotone": monotone, "within_tol": within }),
    ));
    let plot = Plot::new("diagonal entry / asymptote", "n", "ratio", Axis::Log, Axis::Linear)
        .series(Series::new(format!("gamma = {}", cfg.gamma), rows.iter().map(|r| (r.0 as f64, r.3)).collect()))
        .guide("1", 1.0);
    out.write("radial_ratio.svg", plot.to_svg().as_bytes())
}

fn profile_label(p: &ProfileSpec) -> &'static str {
    match p {
        ProfileSpec::Unit => "g=1",
        ProfileSpec::Constant { .. } => "g=const",
        ProfileSpec::InvOnePlusR => "g=1/(1+r)",
        ProfileSpec::Cutoff { .. } => "g=cutoff",
    }
}

pub fn watson(cfg: &WatsonConfig, out: &mut RunOutput) -> Result<()> {
    let mut rows = Vec::new();
    let mut combos = Vec::new();
    let mut plot = Plot::new("moment / Watson asymptote", "p", "ratio", Axis::Log, Axis::Linear).guide("1", 1.0);
    timed("moments", || {
        for &gamma in &cfg.gammas {
            for profile in &cfg.profiles {
                let weight = RadialWeight::new(GammaExponent::new(gamma)?, profile.build()?);
                let mut ratios = Vec::new();
                for &p in &cfg.n_grid {
                    let q = quadrature(p, &weight)?;
                    let a = moment_asymptotic(p, &weight)?.value;
                    ratios.push(q / a);
                    rows.push([
                        num(gamma),
                        profile_label(profile).to_string(),
                        p.to_string(),
                        num(q),
                        num(a),
                        num(q / a),
                    ]);
                }
                let last = *ratios.last().unwrap();
                let monotone = approaches_one(&ratios);
                let within = (last - 1.0).abs() <= cfg.tol_at_max;
                plot.series.push(Series::new(
                    format!("gamma={gamma} {}", profile_label(profile)),
                    cfg.n_grid.iter().zip(&ratios).map(|(&p, &r)| (p as f64, r)).collect(),
                ));
                combos.push(json!({
                    "gamma": gamma, "profile": profile, "ratios": ratios, "ratio_at_max": last,
                    "monotone": monotone, "within_tol": within, "pass": monotone && within,
                }));
            }
        }
        Ok(())
    })?;
    out.write_csv("watson.csv", &["gamma", "profile", "p", "quadrature", "asymptotic", "ratio"], rows)?;
    let pass = combos.iter().all(|c| c["pass"] == true);
    out.verdict(Verdict::new(
        "watson_ratio",
        json!({ "gammas": cfg.gammas, "profiles": cfg.profiles, "n_grid": cfg.n_grid, "tol_at_max": cfg.tol_at_max }),
        None,
        pass,
        json!({ "cases": combos }),
    ));
    out.write("watson_ratio.svg", plot.to_svg().as_bytes())
}

/// Power weight `(1-r)^γ`: `n^γ s_n → Γ(γ+1)/2^γ` (the factor `‖1‖_{L^{1/γ}} = 1`).
pub fn pushnitski(cfg: &PushnitskiConfig, out: &mut RunOutput) -> Result<()> {
    let gamma = cfg.gamma;
    let constant = gamma_fn(gamma + 1.0) / 2f64.powf(gamma);
    let rows = cfg
        .n_grid
        .iter()
        .map(|&n| {
            // s_n with 1-based n is the diagonal entry of index n - 1
            let s = power_weight_moment(n.max(1) - 1, gamma)?;
            let scaled = (n as f64).powf(gamma) * s;
            Ok((n, s, scaled, scaled / constant))
        })
        .collect::<Result<Vec<_>>>()?;
    out.write_csv(
        "power_weight.csv",
        &["n", "s_n", "n_gamma_s_n", "ratio_to_constant"],
        rows.iter().map(|&(n, s, sc, r)| [n.to_string(), num(s), num(sc), num(r)]),
    )?;
    let last = rows.last().unwrap();
    let rel = (last.3 - 1.0).abs();
    out.verdict(Verdict::new(
        "power_weight_constant",
        json!({ "gamma": gamma, "n_grid": cfg.n_grid, "tol": cfg.tol }),
        None,
        rel <= cfg.tol,
        json!({ "constant": constant, "n": last.0, "n_gamma_s_n": last.2, "rel_error": rel }),
    ));
    let plot = Plot::new("power weight: n^gamma s_n", "n", "n^gamma s_n", Axis::Log, Axis::Linear)
        .series(Series::new("n^gamma s_n", rows.iter().map(|r| (r.0 as f64, r.2)).collect()))
        .guide("Gamma(gamma+1)/2^gamma", constant);
    out.write("power_weight.svg", plot.to_svg().as_bytes())
}
