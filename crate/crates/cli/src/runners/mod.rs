//! One runner per experiment kind. Each writes its files and verdicts into a
//! [`RunOutput`]; the manifest is written last.

mod banded;
mod checks;
mod moments;
mod ortho;
mod theorem1;

use std::path::Path;
use std::time::Instant;

use anyhow::{ensure, Result};
use bergspec::assembly::{assemble_tridiagonal, assemble_with_moments, moment_table_for};
use bergspec::spectra::{eigen_signed, singular_values, tridiagonal_signed};
use bergspec::symbol::RadialProfile;
use bergspec::{AngularFactor, GammaExponent, RadialWeight, SignedSpectrum, SingularSpectrum};

use crate::config::{Experiment, ExperimentConfig, DENSE_LIMIT};
use crate::output::{Manifest, RunOutput};

/// Runs `cfg` into `dir` with the effective `seed`.
pub fn run(cfg: &ExperimentConfig, dir: &Path, seed: u64) -> Result<Manifest> {
    cfg.validate()?;
    let mut out = RunOutput::create(dir)?;
    let kind = cfg.experiment.kind();
    eprintln!("[{kind}] {}", cfg.name());
    let start = Instant::now();
    match &cfg.experiment {
        Experiment::Radial(c) => moments::radial(c, &mut out)?,
        Experiment::Watson(c) => moments::watson(c, &mut out)?,
        Experiment::PushnitskiCompare(c) => moments::pushnitski(c, &mut out)?,
        Experiment::Theorem1(c) => theorem1::theorem1(c, &mut out)?,
        Experiment::Signed(c) => theorem1::signed(c, &mut out)?,
        Experiment::Banded(c) => banded::banded(c, &mut out)?,
        Experiment::Ortho(c) => ortho::ortho(c, &mut out)?,
        Experiment::Checks(c) => checks::checks(c, seed, &mut out)?,
    }
    eprintln!("[{kind}] total {:.2}s", start.elapsed().as_secs_f64());
    out.finish(&cfg.name(), kind, seed, serde_json::to_value(cfg)?)
}

/// Runs `f`, reporting its wall time on stderr only.
pub(crate) fn timed<R>(label: &str, f: impl FnOnce() -> Result<R>) -> Result<R> {
    let t = Instant::now();
    let r = f();
    eprintln!("  {label}: {:.2}s", t.elapsed().as_secs_f64());
    r
}

/// Which solver produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Solver {
    Tridiagonal,
    Dense,
}

impl Solver {
    pub(crate) fn label(self) -> &'static str {
        match self {
            Solver::Tridiagonal => "tridiagonal",
            Solver::Dense => "dense",
        }
    }
}

/// Singular values of `P_N T_φ P_N`, through the tridiagonal form when the
/// angular factor allows it.
pub(crate) fn toeplitz_spectrum(
    angular: &AngularFactor,
    profile: RadialProfile<f64>,
    gamma: f64,
    n: usize,
) -> Result<(SingularSpectrum, Solver)> {
    let weight = RadialWeight::new(GammaExponent::new(gamma)?, profile);
    let moments = timed(&format!("moments N={n}"), || Ok(moment_table_for(&weight, n)?))?;
    if let Some(t) = assemble_tridiagonal(angular, &moments, n)? {
        let spec = timed(&format!("tridiagonal spectrum N={n}"), || {
            let ev = t.eigenvalues()?;
            Ok(SingularSpectrum::from_values(ev.iter().map(|v| v.abs()).collect(), Some(n))?)
        })?;
        return Ok((spec, Solver::Tridiagonal));
    }
    ensure!(n <= DENSE_LIMIT, "N = {n} exceeds the dense limit {DENSE_LIMIT} for this symbol");
    let m = timed(&format!("assemble N={n}"), || Ok(assemble_with_moments(angular, &moments, n)?))?;
    let spec = timed(&format!("singular values N={n}"), || Ok(singular_values(&m)?))?;
    Ok((spec, Solver::Dense))
}

/// Signed eigenvalues of `P_N T_φ P_N` for a real angular factor.
pub(crate) fn toeplitz_signed(angular: &AngularFactor, gamma: f64, n: usize) -> Result<(SignedSpectrum, Solver)> {
    let weight = RadialWeight::pure(GammaExponent::new(gamma)?);
    let moments = timed(&format!("moments N={n}"), || Ok(moment_table_for(&weight, n)?))?;
    if let Some(t) = assemble_tridiagonal(angular, &moments, n)? {
        let spec = timed("tridiagonal eigenvalues", || Ok(tridiagonal_signed(&t)?))?;
        return Ok((spec, Solver::Tridiagonal));
    }
    ensure!(n <= DENSE_LIMIT, "N = {n} exceeds the dense limit {DENSE_LIMIT} for this symbol");
    let m = timed(&format!("assemble N={n}"), || Ok(assemble_with_moments(angular, &moments, n)?))?;
    let spec = timed("eigenvalues", || Ok(eigen_signed(&m)?))?;
    Ok((spec, Solver::Dense))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::*;
    use bergspec::moments::diag_entry;
    use bergspec::symbol::{AngularSpec, ComplexSpec};

    fn cfg(e: Experiment) -> ExperimentConfig {
        ExperimentConfig::new(e)
    }

    fn run_in(c: &ExperimentConfig, seed: u64) -> (tempfile::TempDir, Manifest) {
        let dir = tempfile::tempdir().unwrap();
        let m = run(c, dir.path(), seed).unwrap();
        for f in &m.files {
            let meta = std::fs::metadata(dir.path().join(&f.path)).unwrap();
            assert_eq!(meta.len(), f.bytes, "{}", f.path);
        }
        assert!(dir.path().join(crate::output::MANIFEST).exists());
        (dir, m)
    }

    fn small_checks() -> ChecksConfig {
        ChecksConfig {
            sequence_len: 20_000,
            families: 10,
            lemma_samples: 2_000,
            weyl_pairs: 10,
            decay_n: 64,
            psi0_samples: 1_000,
            ..ChecksConfig::default()
        }
    }

    #[test]
    fn radial_small_grid() {
        let c = RadialConfig { n_grid: vec![10, 100, 1000], tol_at_max: 0.2, ..RadialConfig::default() };
        let (_d, m) = run_in(&cfg(Experiment::Radial(c)), 0);
        assert!(m.pass, "{:?}", m.verdicts);
        assert!(m.files.iter().any(|f| f.path == "radial.csv"));
        assert!(m.files.iter().any(|f| f.path == "radial_ratio.svg"));
    }

    #[test]
    fn degenerate_gamma_gives_ratio_one() {
        let c = RadialConfig { gamma: 0.0, n_grid: vec![10, 100], ..RadialConfig::default() };
        let (d, _) = run_in(&cfg(Experiment::Radial(c)), 0);
        let text = std::fs::read_to_string(d.path().join("radial.csv")).unwrap();
        for line in text.lines().skip(1) {
            let ratio: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
            assert!((ratio - 1.0).abs() < 1e-12, "{line}");
        }
    }

    #[test]
    fn constant_symbol_reduces_to_diagonal() {
        let (spec, solver) = toeplitz_spectrum(&AngularFactor::constant(1.0), RadialProfile::Unit, 1.0, 64).unwrap();
        assert_eq!(solver, Solver::Tridiagonal);
        for (k, s) in spec.values.iter().enumerate() {
            let d = diag_entry(k as u64, GammaExponent::new(1.0).unwrap()).unwrap();
            assert!((s - d).abs() <= 1e-13 * d, "n={k}");
        }
    }

    #[test]
    fn checks_are_deterministic_per_seed() {
        let c = cfg(Experiment::Checks(small_checks()));
        let (a, ma) = run_in(&c, 7);
        let (b, _) = run_in(&c, 7);
        assert!(ma.verdicts.iter().all(|v| v.pass), "{:?}", ma.verdicts.iter().filter(|v| !v.pass).collect::<Vec<_>>());
        for f in &ma.files {
            assert_eq!(std::fs::read(a.path().join(&f.path)).unwrap(), std::fs::read(b.path().join(&f.path)).unwrap());
        }
        assert_eq!(
            std::fs::read(a.path().join(crate::output::MANIFEST)).unwrap(),
            std::fs::read(b.path().join(crate::output::MANIFEST)).unwrap()
        );
        let (_c, mc) = run_in(&c, 8);
        assert_eq!(mc.seed, 8);
        assert_eq!(mc.verdict("weyl_pairs").unwrap().seed, Some(12));
    }

    #[test]
    fn theorem1_trig_small() {
        let mut t = Theorem1Config::new(
            AngularSpec::TrigPolynomial {
                coeffs: vec![ComplexSpec::Real(0.5), ComplexSpec::Real(2.0), ComplexSpec::Real(0.5)],
            },
            512,
        );
        t.band = [0.4, 1.2];
        t.compare_n = Some(256);
        t.stability_leading = 16;
        let (d, m) = run_in(&cfg(Experiment::Theorem1(t)), 0);
        assert!(m.pass, "{:?}", m.verdicts);
        let fit = &m.verdict("theorem1_limit").unwrap().metrics;
        assert_eq!(fit["solver"], "tridiagonal");
        assert_eq!(fit["target"], 3.0);
        for f in ["spectrum.csv", "counting.csv", "fit.json", "scaled.svg"] {
            assert!(d.path().join(f).exists(), "{f}");
        }
    }

    #[test]
    fn step_arcs_match_whole() {
        let mut t = Theorem1Config::new(AngularSpec::EqualSteps { values: vec![1.0, 0.5] }, 256);
        t.arc_compare = true;
        t.band = [0.3, 1.2];
        let (_d, m) = run_in(&cfg(Experiment::Theorem1(t)), 0);
        let arcs = m.verdict("arc_decomposition").unwrap();
        assert!(arcs.pass, "{}", arcs.metrics);
        assert_eq!(m.verdict("theorem1_limit").unwrap().metrics["solver"], "dense");
    }

    #[test]
    fn signed_branches() {
        let s = SignedConfig {
            symbol: AngularSpec::EqualSteps { values: vec![1.0, -2.0] },
            gamma: 1.0,
            n: 256,
            window: None,
            band: [0.3, 1.2],
            ratio_tol: 0.05,
            noise: 1e-10,
        };
        let (_d, m) = run_in(&cfg(Experiment::Signed(s)), 0);
        let v = m.verdict("signed_limits").unwrap();
        assert!(v.pass, "{}", v.metrics);
        assert_eq!(v.metrics["branch_ratio"]["target"], 0.5);

        let nonneg = SignedConfig {
            symbol: AngularSpec::TrigPolynomial {
                coeffs: vec![ComplexSpec::Real(0.5), ComplexSpec::Real(1.0), ComplexSpec::Real(0.5)],
            },
            gamma: 1.0,
            n: 512,
            window: None,
            band: [0.3, 1.2],
            ratio_tol: 0.05,
            noise: 1e-10,
        };
        let (_d, m) = run_in(&cfg(Experiment::Signed(nonneg)), 0);
        let v = m.verdict("signed_limits").unwrap();
        assert_eq!(v.metrics["branches"][1]["empty"], true, "{}", v.metrics);
    }

    #[test]
    fn banded_diagonal_and_trend() {
        let diag = BandedConfig { difference_n: 0, ..BandedConfig::new(vec![0.0, -2.5, 0.0], 2000) };
        let (_d, m) = run_in(&cfg(Experiment::Banded(diag)), 0);
        assert!(m.verdict("banded_diagonal_analytic").unwrap().pass);

        let mut tri = BandedConfig::new(vec![1.0, 2.0, 1.0], 4000);
        tri.check_indices = vec![50, 400];
        tri.band_at_last = [2.0, 4.5];
        tri.difference_n = 128;
        let (d, m) = run_in(&cfg(Experiment::Banded(tri)), 0);
        let v = m.verdict("banded_trend").unwrap();
        assert!(v.pass, "{}", v.metrics);
        assert_eq!(v.metrics["difference"]["decreasing"], true);
        assert!(d.path().join("difference.csv").exists());
    }

    #[test]
    fn power_weight_constant() {
        let (_d, m) = run_in(&cfg(Experiment::PushnitskiCompare(PushnitskiConfig::default())), 0);
        let v = m.verdict("power_weight_constant").unwrap();
        assert!(v.pass);
        assert!((v.metrics["constant"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn watson_small_grid() {
        let w = WatsonConfig { n_grid: vec![100, 10_000, 1_000_000], ..WatsonConfig::default() };
        let (_d, m) = run_in(&cfg(Experiment::Watson(w)), 0);
        assert!(m.pass, "{:?}", m.verdicts);
    }
}
