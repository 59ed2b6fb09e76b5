//! Versioned JSON experiment configuration.
//!
//! Every tolerance and band a runner asserts is a config field; defaults are
//! the acceptance values.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use bergspec::banded::{Perturbation, DEFAULT_OFFSET};
use bergspec::checks::{CrossTermParams, Psi0Form};
use bergspec::symbol::{AngularSpec, ComplexSpec, ProfileSpec};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "bergspec.experiment.v1";

/// Largest dimension accepted for dense eigen/singular value problems.
pub const DENSE_LIMIT: usize = 8192;
/// Largest dimension accepted on the tridiagonal path.
pub const TRIDIAGONAL_LIMIT: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Radial(RadialConfig),
    Theorem1(Theorem1Config),
    Signed(SignedConfig),
    Banded(BandedConfig),
    Ortho(OrthoConfig),
    Checks(ChecksConfig),
    Watson(WatsonConfig),
    PushnitskiCompare(PushnitskiConfig),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Radial(_) => "radial",
            Self::Theorem1(_) => "theorem1",
            Self::Signed(_) => "signed",
            Self::Banded(_) => "banded",
            Self::Ortho(_) => "ortho",
            Self::Checks(_) => "checks",
            Self::Watson(_) => "watson",
            Self::PushnitskiCompare(_) => "pushnitski-compare",
        }
    }
}

fn gamma_one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialConfig {
    #[serde(default = "gamma_one")]
    pub gamma: f64,
    #[serde(default = "RadialConfig::default_grid")]
    pub n_grid: Vec<u64>,
    #[serde(default)]
    pub profile: ProfileSpec,
    /// `|ratio - 1|` allowed at the largest `n`.
    #[serde(default = "RadialConfig::default_tol")]
    pub tol_at_max: f64,
}

impl RadialConfig {
    fn default_grid() -> Vec<u64> {
        vec![1_000, 10_000, 100_000, 1_000_000]
    }
    fn default_tol() -> f64 {
        0.15
    }
}

impl Default for RadialConfig {
    fn default() -> Self {
        Self { gamma: 1.0, n_grid: Self::default_grid(), profile: ProfileSpec::Unit, tol_at_max: Self::default_tol() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WatsonConfig {
    #[serde(default = "WatsonConfig::default_gammas")]
    pub gammas: Vec<f64>,
    #[serde(default = "WatsonConfig::default_profiles")]
    pub profiles: Vec<ProfileSpec>,
    #[serde(default = "WatsonConfig::default_grid")]
    pub n_grid: Vec<u64>,
    #[serde(default = "WatsonConfig::default_tol")]
    pub tol_at_max: f64,
}

impl WatsonConfig {
    fn default_gammas() -> Vec<f64> {
        vec![0.5, 1.0, 2.0]
    }
    fn default_profiles() -> Vec<ProfileSpec> {
        vec![ProfileSpec::Unit, ProfileSpec::InvOnePlusR]
    }
    fn default_grid() -> Vec<u64> {
        vec![100, 1_000, 10_000, 100_000, 1_000_000]
    }
    fn default_tol() -> f64 {
        0.2
    }
}

impl Default for WatsonConfig {
    fn default() -> Self {
        Self {
            gammas: Self::default_gammas(),
            profiles: Self::default_profiles(),
            n_grid: Self::default_grid(),
            tol_at_max: Self::default_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PushnitskiConfig {
    #[serde(default = "gamma_one")]
    pub gamma: f64,
    #[serde(default = "PushnitskiConfig::default_grid")]
    pub n_grid: Vec<u64>,
    /// Relative tolerance of `n^γ s_n` against the constant at the last grid point.
    #[serde(default = "PushnitskiConfig::default_tol")]
    pub tol: f64,
}

impl PushnitskiConfig {
    fn default_grid() -> Vec<u64> {
        vec![10, 100, 1_000, 10_000, 100_000]
    }
    fn default_tol() -> f64 {
        0.02
    }
}

impl Default for PushnitskiConfig {
    fn default() -> Self {
        Self { gamma: 1.0, n_grid: Self::default_grid(), tol: Self::default_tol() }
    }
}

fn default_band() -> [f64; 2] {
    [0.7, 1.2]
}

fn default_points() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem1Config {
    pub symbol: AngularSpec,
    #[serde(default)]
    pub profile: ProfileSpec,
    #[serde(default = "gamma_one")]
    pub gamma: f64,
    pub n: usize,
    /// Fit window `[n_lo, n_hi]`; defaults to `[max(8, N/256), N/8]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[usize; 2]>,
    /// Band for `c_hat` relative to the target `g(1)·‖φ₁‖∞`.
    #[serde(default = "default_band")]
    pub band: [f64; 2],
    #[serde(default = "Theorem1Config::default_true")]
    pub require_endpoint_increase: bool,
    /// For equal-step symbols: compare against the merged spectrum of the
    /// per-arc pieces `c_j T_{χ_j}`.
    #[serde(default)]
    pub arc_compare: bool,
    #[serde(default = "Theorem1Config::default_arc_tol")]
    pub arc_tol: f64,
    /// Also compute the `compare_n` truncation and compare leading values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare_n: Option<usize>,
    #[serde(default = "Theorem1Config::default_leading")]
    pub stability_leading: usize,
    #[serde(default = "Theorem1Config::default_stability_tol")]
    pub stability_tol: f64,
    #[serde(default = "default_points")]
    pub functional_points: usize,
}

impl Theorem1Config {
    fn default_true() -> bool {
        true
    }
    fn default_arc_tol() -> f64 {
        0.10
    }
    fn default_leading() -> usize {
        64
    }
    fn default_stability_tol() -> f64 {
        0.01
    }

    pub fn new(symbol: AngularSpec, n: usize) -> Self {
        Self {
            symbol,
            profile: ProfileSpec::Unit,
            gamma: 1.0,
            n,
            window: None,
            band: default_band(),
            require_endpoint_increase: true,
            arc_compare: false,
            arc_tol: Self::default_arc_tol(),
            compare_n: None,
            stability_leading: Self::default_leading(),
            stability_tol: Self::default_stability_tol(),
            functional_points: default_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignedConfig {
    pub symbol: AngularSpec,
    #[serde(default = "gamma_one")]
    pub gamma: f64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[usize; 2]>,
    /// Band for each branch's `c_hat` relative to `‖φ₁±‖∞`; the default is a
    /// desk-scale band, since the fitted values approach the limit from below.
    #[serde(default = "SignedConfig::default_band")]
    pub band: [f64; 2],
    /// Tolerance on `c_hat₊/c_hat₋` against `‖φ₁₊‖∞/‖φ₁₋‖∞` when both are nonzero.
    #[serde(default = "SignedConfig::default_ratio_tol")]
    pub ratio_tol: f64,
    /// Eigenvalues below `noise · ‖T‖` count as zero when a branch target vanishes.
    #[serde(default = "SignedConfig::default_noise")]
    pub noise: f64,
}

impl SignedConfig {
    fn default_band() -> [f64; 2] {
        [0.5, 1.2]
    }
    fn default_ratio_tol() -> f64 {
        0.05
    }
    fn default_noise() -> f64 {
        1e-10
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandedConfig {
    /// `b_{-h} .. b_h`.
    pub coeffs: Vec<ComplexSpec>,
    #[serde(default = "gamma_one")]
    pub gamma: f64,
    pub n: usize,
    #[serde(default = "BandedConfig::default_offset")]
    pub offset: usize,
    #[serde(default)]
    pub perturbation: Perturbation,
    /// Indices at which the scaled values must increase.
    #[serde(default = "BandedConfig::default_checks")]
    pub check_indices: Vec<usize>,
    /// Absolute band for the scaled value at the last check index.
    #[serde(default = "BandedConfig::default_band")]
    pub band_at_last: [f64; 2],
    /// Tolerance of the diagonal case against its analytic sequence.
    #[serde(default = "BandedConfig::default_analytic_tol")]
    pub analytic_tol: f64,
    /// Dimension of the dense `D - T_φ` diagnostic; 0 disables it.
    #[serde(default = "BandedConfig::default_diff_n")]
    pub difference_n: usize,
}

impl BandedConfig {
    fn default_offset() -> usize {
        DEFAULT_OFFSET
    }
    fn default_checks() -> Vec<usize> {
        vec![100, 1_000]
    }
    fn default_band() -> [f64; 2] {
        [2.0, 4.5]
    }
    fn default_analytic_tol() -> f64 {
        1e-10
    }
    fn default_diff_n() -> usize {
        256
    }

    pub fn new(coeffs: Vec<f64>, n: usize) -> Self {
        Self {
            coeffs: coeffs.into_iter().map(ComplexSpec::Real).collect(),
            gamma: 1.0,
            n,
            offset: Self::default_offset(),
            perturbation: Perturbation::None,
            check_indices: Self::default_checks(),
            band_at_last: Self::default_band(),
            analytic_tol: Self::default_analytic_tol(),
            difference_n: Self::default_diff_n(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrthoConfig {
    #[serde(default = "OrthoConfig::default_parts")]
    pub parts: usize,
    #[serde(default = "gamma_one")]
    pub gamma: f64,
    #[serde(default = "OrthoConfig::default_n")]
    pub n: usize,
    #[serde(default = "OrthoConfig::default_lo")]
    pub window_lo: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_hi: Option<usize>,
    #[serde(default = "OrthoConfig::default_hs_tol")]
    pub hs_tol: f64,
    #[serde(default = "OrthoConfig::default_drop")]
    pub adjacent_drop: f64,
    #[serde(default = "OrthoConfig::default_keep")]
    pub control_keep: f64,
}

impl OrthoConfig {
    fn default_parts() -> usize {
        4
    }
    fn default_n() -> usize {
        512
    }
    fn default_lo() -> usize {
        16
    }
    fn default_hs_tol() -> f64 {
        0.10
    }
    fn default_drop() -> f64 {
        0.25
    }
    fn default_keep() -> f64 {
        0.5
    }

    pub fn params(&self) -> CrossTermParams {
        CrossTermParams {
            parts: self.parts,
            gamma: self.gamma,
            n: self.n,
            window_lo: self.window_lo,
            window_hi: self.window_hi,
            hs_tol: self.hs_tol,
            adjacent_drop: self.adjacent_drop,
            control_keep: self.control_keep,
        }
    }
}

impl Default for OrthoConfig {
    fn default() -> Self {
        Self {
            parts: Self::default_parts(),
            gamma: 1.0,
            n: Self::default_n(),
            window_lo: Self::default_lo(),
            window_hi: None,
            hs_tol: Self::default_hs_tol(),
            adjacent_drop: Self::default_drop(),
            control_keep: Self::default_keep(),
        }
    }
}

/// Parameters of the property-check battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksConfig {
    pub identity_n: usize,
    pub identity_tol: f64,
    /// `(C, γ)` pairs of the synthetic sequences `C/(log(n+1))^γ`.
    pub counting_cases: Vec<(f64, f64)>,
    pub sequence_len: usize,
    pub counting_tol: f64,
    /// Tolerance of the windowed `Δγ` estimator in the class checks.
    pub estimator_tol: f64,
    /// Relative level below which a functional counts as vanishing.
    pub vanishing: f64,
    pub random_pairs: usize,
    pub rotated_dim: usize,
    pub families: usize,
    pub max_parts: usize,
    pub max_dim: usize,
    pub product_tol: f64,
    pub spectrum_tol: f64,
    pub lemma_l: Vec<usize>,
    pub lemma_samples: usize,
    pub lemma_r_min: f64,
    pub weyl_pairs: usize,
    pub weyl_max_dim: usize,
    pub weyl_rel_tol: f64,
    pub decay_delta: f64,
    pub decay_n: usize,
    pub decay_tol: f64,
    pub decay_noise: f64,
    /// Arc count of the one-sided decay bound check.
    pub decay_parts: usize,
    pub psi0_gamma: f64,
    pub psi0_delta: f64,
    pub psi0_samples: usize,
    pub psi0_form: Psi0Form,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        Self {
            identity_n: 64,
            identity_tol: 1e-12,
            counting_cases: vec![(1.0, 1.0), (2.0, 1.0), (1.0, 2.0)],
            sequence_len: 1_000_000,
            counting_tol: 0.05,
            estimator_tol: 0.10,
            vanishing: 0.05,
            random_pairs: 20,
            rotated_dim: 256,
            families: 100,
            max_parts: 4,
            max_dim: 8,
            product_tol: 1e-12,
            spectrum_tol: 1e-10,
            lemma_l: vec![2, 3, 4, 5],
            lemma_samples: 100_000,
            lemma_r_min: 1e-6,
            weyl_pairs: 100,
            weyl_max_dim: 16,
            weyl_rel_tol: 1e-10,
            decay_delta: 0.5,
            decay_n: 128,
            decay_tol: 0.10,
            decay_noise: 1e-12,
            decay_parts: 4,
            psi0_gamma: 1.0,
            psi0_delta: 0.25,
            psi0_samples: 10_000,
            psi0_form: Psi0Form::Corrected,
        }
    }
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self { schema: SCHEMA.to_string(), name: None, seed: None, output_dir: None, experiment }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).context("config does not match the schema")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.experiment.kind().to_string())
    }

    /// Range checks on every numeric field; runs before any computation.
    pub fn validate(&self) -> Result<()> {
        ensure!(self.schema == SCHEMA, "unsupported schema {:?}, expected {SCHEMA:?}", self.schema);
        if let Some(name) = &self.name {
            ensure!(
                !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)),
                "name must be non-empty and use [A-Za-z0-9._-]"
            );
        }
        match &self.experiment {
            Experiment::Radial(c) => {
                gamma_ok(c.gamma)?;
                grid_ok(&c.n_grid)?;
                ensure!(c.n_grid[0] >= 1, "radial grid starts at n >= 1");
                tol_ok("tol_at_max", c.tol_at_max)?;
                ensure!(c.profile.build()?.limit() != 0.0, "radial mode needs g(1) != 0");
            }
            Experiment::Watson(c) => {
                ensure!(!c.gammas.is_empty() && !c.profiles.is_empty(), "watson needs gammas and profiles");
                for g in &c.gammas {
                    ensure!(*g > 0.0 && g.is_finite(), "watson gamma must be > 0, got {g}");
                }
                for p in &c.profiles {
                    ensure!(p.build()?.limit() != 0.0, "watson profiles need g(1) != 0");
                }
                grid_ok(&c.n_grid)?;
                ensure!(c.n_grid[0] >= 2, "watson grid starts at n >= 2");
                tol_ok("tol_at_max", c.tol_at_max)?;
            }
            Experiment::PushnitskiCompare(c) => {
                ensure!(c.gamma > 0.0 && c.gamma.is_finite(), "power weight needs gamma > 0");
                grid_ok(&c.n_grid)?;
                ensure!(c.n_grid[0] >= 1, "power-weight grid starts at n >= 1");
                tol_ok("tol", c.tol)?;
            }
            Experiment::Theorem1(c) => {
                gamma_ok(c.gamma)?;
                c.symbol.build()?;
                c.profile.build()?;
                dim_ok(c.n, TRIDIAGONAL_LIMIT)?;
                window_ok(c.window, c.n)?;
                band_ok(c.band)?;
                tol_ok("arc_tol", c.arc_tol)?;
                tol_ok("stability_tol", c.stability_tol)?;
                ensure!(c.functional_points >= 2, "functional_points must be >= 2");
                if c.arc_compare {
                    ensure!(
                        matches!(c.symbol, AngularSpec::EqualSteps { .. }),
                        "arc_compare needs an equal_steps symbol"
                    );
                }
                if let Some(m) = c.compare_n {
                    dim_ok(m, TRIDIAGONAL_LIMIT)?;
                    ensure!(c.stability_leading >= 1, "stability_leading must be >= 1");
                    ensure!(c.stability_leading <= m.min(c.n), "stability_leading exceeds a truncation size");
                }
            }
            Experiment::Signed(c) => {
                gamma_ok(c.gamma)?;
                ensure!(c.symbol.build()?.is_real(), "signed mode needs a real angular factor");
                dim_ok(c.n, TRIDIAGONAL_LIMIT)?;
                window_ok(c.window, c.n)?;
                band_ok(c.band)?;
                tol_ok("ratio_tol", c.ratio_tol)?;
                tol_ok("noise", c.noise)?;
            }
            Experiment::Banded(c) => {
                gamma_ok(c.gamma)?;
                ensure!(c.coeffs.len() % 2 == 1, "banded coefficients need odd length 2h+1");
                ensure!(
                    c.coeffs.iter().all(|z| z.value().re.is_finite() && z.value().im.is_finite()),
                    "non-finite coefficient"
                );
                dim_ok(c.n, TRIDIAGONAL_LIMIT)?;
                ensure!(c.coeffs.len() / 2 < c.n, "half-bandwidth must be below N");
                ensure!(c.offset >= 2, "offset must be >= 2");
                ensure!(!c.check_indices.is_empty(), "check_indices must be non-empty");
                ensure!(c.check_indices.windows(2).all(|w| w[0] < w[1]), "check_indices must increase");
                ensure!(
                    c.check_indices[0] >= 1 && *c.check_indices.last().unwrap() <= c.n,
                    "check index outside 1..=N"
                );
                ensure!(c.band_at_last[0] <= c.band_at_last[1], "band must be ordered");
                tol_ok("analytic_tol", c.analytic_tol)?;
                ensure!(
                    c.difference_n == 0 || (128..=2048).contains(&c.difference_n),
                    "difference_n must be 0 or lie in [128, 2048]"
                );
                if let Perturbation::InverseLog { amplitude } = c.perturbation {
                    ensure!(amplitude.is_finite(), "perturbation amplitude must be finite");
                }
            }
            Experiment::Ortho(c) => {
                gamma_ok(c.gamma)?;
                ensure!(c.parts >= 3, "ortho needs L >= 3");
                ensure!(c.n >= 256, "ortho needs N >= 256");
                ensure!(2 * c.n <= DENSE_LIMIT, "2N exceeds the dense limit {DENSE_LIMIT}");
                let hi = c.window_hi.unwrap_or(c.n / 8);
                ensure!(c.window_lo >= 1 && c.window_lo < hi && hi <= c.n, "window [{}, {hi}] invalid", c.window_lo);
                tol_ok("hs_tol", c.hs_tol)?;
                ensure!((0.0..1.0).contains(&c.adjacent_drop), "adjacent_drop must lie in [0, 1)");
                ensure!((0.0..=1.0).contains(&c.control_keep), "control_keep must lie in [0, 1]");
            }
            Experiment::Checks(c) => {
                ensure!(c.identity_n >= 1 && c.identity_n <= DENSE_LIMIT, "identity_n out of range");
                ensure!(!c.counting_cases.is_empty(), "counting_cases must be non-empty");
                for (cc, g) in &c.counting_cases {
                    ensure!(*cc > 0.0 && *g > 0.0, "counting cases need C > 0 and gamma > 0");
                }
                ensure!(c.sequence_len >= 1024, "sequence_len must be >= 1024");
                ensure!(
                    c.rotated_dim >= 64 && c.rotated_dim <= 2048 && c.rotated_dim <= c.sequence_len,
                    "rotated_dim must lie in [64, 2048]"
                );
                ensure!(c.max_parts >= 1 && c.max_dim >= 1 && c.max_dim <= 64, "block family sizes out of range");
                ensure!(c.lemma_l.iter().all(|l| *l >= 2), "lemma l must be >= 2");
                ensure!(c.lemma_r_min > 0.0 && c.lemma_r_min < 1.0, "lemma_r_min must lie in (0, 1)");
                ensure!(c.weyl_max_dim >= 1 && c.weyl_max_dim <= 256, "weyl_max_dim out of range");
                ensure!(c.decay_delta > 0.0 && c.decay_delta <= 0.5, "decay_delta must lie in (0, 1/2]");
                ensure!(c.decay_n >= 8 && c.decay_n <= DENSE_LIMIT, "decay_n out of range");
                ensure!(c.decay_parts >= 1, "decay_parts must be >= 1");
                ensure!(c.psi0_gamma > 0.0, "psi0_gamma must be > 0");
                ensure!(c.psi0_delta > 0.0 && c.psi0_delta <= 0.5, "psi0_delta must lie in (0, 1/2]");
                for (name, t) in [
                    ("identity_tol", c.identity_tol),
                    ("counting_tol", c.counting_tol),
                    ("estimator_tol", c.estimator_tol),
                    ("vanishing", c.vanishing),
                    ("product_tol", c.product_tol),
                    ("spectrum_tol", c.spectrum_tol),
                    ("weyl_rel_tol", c.weyl_rel_tol),
                    ("decay_tol", c.decay_tol),
                    ("decay_noise", c.decay_noise),
                ] {
                    tol_ok(name, t)?;
                }
            }
        }
        Ok(())
    }
}

fn gamma_ok(g: f64) -> Result<()> {
    ensure!(g.is_finite() && g >= 0.0, "gamma must be finite and >= 0, got {g}");
    Ok(())
}

fn grid_ok(grid: &[u64]) -> Result<()> {
    ensure!(!grid.is_empty(), "n_grid must be non-empty");
    ensure!(grid.windows(2).all(|w| w[0] < w[1]), "n_grid must be strictly increasing");
    ensure!(*grid.last().unwrap() < 100_000_000, "n_grid entries must be < 1e8");
    Ok(())
}

fn tol_ok(name: &str, t: f64) -> Result<()> {
    ensure!(t.is_finite() && t >= 0.0, "{name} must be finite and >= 0, got {t}");
    Ok(())
}

fn band_ok(b: [f64; 2]) -> Result<()> {
    ensure!(b[0].is_finite() && b[1].is_finite() && b[0] <= b[1], "band must be finite and ordered, got {b:?}");
    Ok(())
}

fn dim_ok(n: usize, limit: usize) -> Result<()> {
    if n < 16 || n > limit {
        bail!("N = {n} outside [16, {limit}]");
    }
    Ok(())
}

fn window_ok(w: Option<[usize; 2]>, n: usize) -> Result<()> {
    if let Some([lo, hi]) = w {
        ensure!(lo >= 8 && lo < hi && hi <= n / 8, "window [{lo}, {hi}] must lie in [8, N/8 = {}]", n / 8);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(experiment: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::parse(&format!(r#"{{"schema": "{SCHEMA}", "experiment": {experiment}}}"#))
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = parse(r#"{"kind": "radial"}"#).unwrap();
        assert_eq!(cfg.experiment, Experiment::Radial(RadialConfig::default()));
        assert_eq!(cfg.name(), "radial");
        let Experiment::Checks(c) = parse(r#"{"kind": "checks", "families": 5}"#).unwrap().experiment else {
            panic!("wrong kind")
        };
        assert_eq!(c.families, 5);
        assert_eq!(c.lemma_samples, 100_000);
    }

    #[test]
    fn schema_and_unknown_fields_rejected() {
        assert!(ExperimentConfig::parse(r#"{"schema": "bergspec.experiment.v0", "experiment": {"kind": "radial"}}"#)
            .is_err());
        assert!(ExperimentConfig::parse(r#"{"experiment": {"kind": "radial"}}"#).is_err());
        assert!(parse(r#"{"kind": "radial", "gama": 1}"#).is_err());
        assert!(parse(r#"{"kind": "nonsense"}"#).is_err());
        assert!(ExperimentConfig::parse(&format!(
            r#"{{"schema": "{SCHEMA}", "extra": 1, "experiment": {{"kind": "radial"}}}}"#
        ))
        .is_err());
    }

    #[test]
    fn ranges_checked() {
        assert!(parse(r#"{"kind": "radial", "gamma": -1}"#).is_err());
        assert!(parse(r#"{"kind": "radial", "n_grid": [100, 10]}"#).is_err());
        assert!(parse(r#"{"kind": "radial", "n_grid": [0, 10]}"#).is_err());
        assert!(parse(r#"{"kind": "theorem1", "symbol": {"type": "constant", "re": 1}, "n": 100000}"#).is_ok());
        assert!(parse(r#"{"kind": "theorem1", "symbol": {"type": "constant", "re": 1}, "n": 1000000}"#).is_err());
        assert!(parse(
            r#"{"kind": "theorem1", "symbol": {"type": "constant", "re": 1}, "n": 1024, "window": [4, 64]}"#
        )
        .is_err());
        assert!(parse(
            r#"{"kind": "theorem1", "symbol": {"type": "constant", "re": 1}, "n": 1024, "arc_compare": true}"#
        )
        .is_err());
        assert!(parse(r#"{"kind": "signed", "symbol": {"type": "constant", "re": 0, "im": 1}, "n": 64}"#).is_err());
        assert!(parse(r#"{"kind": "banded", "coeffs": [1, 2], "n": 64}"#).is_err());
        assert!(parse(r#"{"kind": "banded", "coeffs": [1, 2, 1], "n": 64, "check_indices": [10, 5]}"#).is_err());
        assert!(parse(r#"{"kind": "ortho", "parts": 2}"#).is_err());
        assert!(parse(r#"{"kind": "ortho", "n": 8192}"#).is_err());
        assert!(parse(r#"{"kind": "checks", "decay_delta": 0.75}"#).is_err());
        assert!(parse(r#"{"kind": "watson", "profiles": [{"type": "cutoff", "radius": 0.5}]}"#).is_err());
        assert!(ExperimentConfig::parse(&format!(
            r#"{{"schema": "{SCHEMA}", "name": "a b", "experiment": {{"kind": "radial"}}}}"#
        ))
        .is_err());
    }

    #[test]
    fn shipped_configs_validate() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        let mut count = 0;
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "json") {
                ExperimentConfig::load(&path).unwrap();
                count += 1;
            }
        }
        assert!(count >= 8);
    }
}
