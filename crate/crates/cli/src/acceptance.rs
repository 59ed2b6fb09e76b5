//! The acceptance battery: fixed experiment configs, judged from their
//! manifests alone.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{Context, Result};
use bergspec::symbol::{AngularSpec, ComplexSpec};
use serde::Serialize;
use serde_json::Value;

use crate::config::{
    BandedConfig, ChecksConfig, Experiment, ExperimentConfig, OrthoConfig, PushnitskiConfig, RadialConfig,
    Theorem1Config, WatsonConfig,
};
use crate::output::{Manifest, RunOutput};
use crate::runners;

/// One criterion: the verdicts that must pass, as `(run, check)` pairs, and
/// the metrics quoted in its report line as `(run, check, pointer, label)`.
struct Criterion {
    id: u8,
    title: &'static str,
    checks: &'static [(&'static str, &'static str)],
    quote: &'static [(&'static str, &'static str, &'static str, &'static str)],
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "radial diagonal ratio",
        checks: &[("radial", "radial_diagonal_ratio")],
        quote: &[("radial", "radial_diagonal_ratio", "/metrics/ratio_at_max", "ratio@1e6")],
    },
    Criterion {
        id: 2,
        title: "Watson moment asymptotics",
        checks: &[("watson", "watson_ratio")],
        quote: &[
            ("watson", "watson_ratio", "/metrics/cases/4/ratio_at_max", "ratio@1e6 gamma=2 g=1"),
            ("watson", "watson_ratio", "/metrics/cases/5/ratio_at_max", "ratio@1e6 gamma=2 g=1/(1+r)"),
        ],
    },
    Criterion {
        id: 3,
        title: "identity fixture",
        checks: &[("checks", "identity_fixture")],
        quote: &[("checks", "identity_fixture", "/metrics/max_abs_error", "max|T-I|")],
    },
    Criterion {
        id: 4,
        title: "counting-function equivalence",
        checks: &[("checks", "counting_equivalence")],
        quote: &[
            ("checks", "counting_equivalence", "/metrics/cases/0/rel_err_upper", "rel err (1,1)"),
            ("checks", "counting_equivalence", "/metrics/cases/2/rel_err_lower", "rel err lower (1,2)"),
        ],
    },
    Criterion {
        id: 5,
        title: "block-family identities",
        checks: &[("checks", "p4_blocks_random")],
        quote: &[("checks", "p4_blocks_random", "/metrics/failures", "failures")],
    },
    Criterion {
        id: 6,
        title: "cycle-product inequality",
        checks: &[("checks", "lemma44")],
        quote: &[
            ("checks", "lemma44", "/metrics/violations", "violations"),
            ("checks", "lemma44", "/metrics/per_l/0/min_ratio", "min ratio l=2"),
        ],
    },
    Criterion {
        id: 7,
        title: "Weyl inequalities",
        checks: &[("checks", "weyl_pairs")],
        quote: &[
            ("checks", "weyl_pairs", "/metrics/product_violations", "product violations"),
            ("checks", "weyl_pairs", "/metrics/counting_violations", "counting violations"),
        ],
    },
    Criterion {
        id: 8,
        title: "limit trend, 2+cos(theta), N=4096",
        checks: &[("theorem1-trig", "theorem1_limit")],
        quote: &[
            ("theorem1-trig", "theorem1_limit", "/metrics/fit/c_hat", "c_hat"),
            ("theorem1-trig", "theorem1_limit", "/metrics/fit/endpoint_lo", "endpoint@32"),
            ("theorem1-trig", "theorem1_limit", "/metrics/fit/endpoint_hi", "endpoint@512"),
        ],
    },
    Criterion {
        id: 9,
        title: "two-step symbol (1, 1/2), N=4096",
        checks: &[("theorem1-step", "theorem1_limit"), ("theorem1-step", "arc_decomposition")],
        quote: &[
            ("theorem1-step", "theorem1_limit", "/metrics/fit/c_hat", "c_hat"),
            ("theorem1-step", "arc_decomposition", "/metrics/rel_change", "arc change"),
        ],
    },
    Criterion {
        id: 10,
        title: "asymptotic orthogonality of arc pieces",
        checks: &[("ortho", "cross_term")],
        quote: &[
            ("ortho", "cross_term", "/metrics/classes/2/hs_rel_change", "HS change"),
            ("ortho", "cross_term", "/metrics/non_adjacent_ok", "non-adjacent"),
            ("ortho", "cross_term", "/metrics/adjacent_ok", "adjacent"),
            ("ortho", "cross_term", "/metrics/control_ok", "control"),
        ],
    },
    Criterion {
        id: 11,
        title: "compact-support exponential decay",
        checks: &[("checks", "compact_support_radial"), ("checks", "compact_support_arcs")],
        quote: &[
            ("checks", "compact_support_radial", "/metrics/slope", "slope L=1"),
            ("checks", "compact_support_arcs", "/metrics/slope", "slope L=4"),
            ("checks", "compact_support_radial", "/metrics/target", "target"),
        ],
    },
    Criterion {
        id: 12,
        title: "banded corollary",
        checks: &[("banded", "banded_trend"), ("banded-diagonal", "banded_diagonal_analytic")],
        quote: &[
            ("banded", "banded_trend", "/metrics/scaled_at", "scaled@{1e2,1e3}"),
            ("banded-diagonal", "banded_diagonal_analytic", "/metrics/max_rel_diff", "diagonal max rel diff"),
        ],
    },
    Criterion {
        id: 13,
        title: "power-weight comparison",
        checks: &[("pushnitski-compare", "power_weight_constant")],
        quote: &[("pushnitski-compare", "power_weight_constant", "/metrics/n_gamma_s_n", "n s_n@1e5")],
    },
    Criterion {
        id: 14,
        title: "truncation stability, N=1024 vs 2048",
        checks: &[("theorem1-stability", "truncation_stability")],
        quote: &[("theorem1-stability", "truncation_stability", "/metrics/max_rel_diff", "max rel diff")],
    },
];

fn trig_2_plus_cos() -> AngularSpec {
    AngularSpec::TrigPolynomial { coeffs: vec![ComplexSpec::Real(0.5), ComplexSpec::Real(2.0), ComplexSpec::Real(0.5)] }
}

/// The battery's experiment configs, keyed by run name.
pub fn configs() -> Vec<ExperimentConfig> {
    let named = |name: &str, e: Experiment| {
        let mut c = ExperimentConfig::new(e);
        c.name = Some(name.to_string());
        c
    };
    let mut trig = Theorem1Config::new(trig_2_plus_cos(), 4096);
    trig.window = Some([32, 512]);
    let mut step = Theorem1Config::new(AngularSpec::EqualSteps { values: vec![1.0, 0.5] }, 4096);
    step.window = Some([32, 512]);
    step.arc_compare = true;
    let mut stability = Theorem1Config::new(trig_2_plus_cos(), 2048);
    stability.compare_n = Some(1024);
    let diagonal = BandedConfig { difference_n: 0, ..BandedConfig::new(vec![0.0, 3.0, 0.0], 20_000) };
    vec![
        named("radial", Experiment::Radial(RadialConfig::default())),
        named("watson", Experiment::Watson(WatsonConfig::default())),
        named("checks", Experiment::Checks(ChecksConfig::default())),
        named("theorem1-trig", Experiment::Theorem1(trig)),
        named("theorem1-step", Experiment::Theorem1(step)),
        named("theorem1-stability", Experiment::Theorem1(stability)),
        named("ortho", Experiment::Ortho(OrthoConfig::default())),
        named("banded", Experiment::Banded(BandedConfig::new(vec![1.0, 2.0, 1.0], 20_000))),
        named("banded-diagonal", Experiment::Banded(diagonal)),
        named("pushnitski-compare", Experiment::PushnitskiCompare(PushnitskiConfig::default())),
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: String,
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!("{} [{:02}] {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.title, self.detail)
    }
}

fn show(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.4e}"),
            _ => n.to_string(),
        },
        Value::Array(a) => format!("[{}]", a.iter().map(show).collect::<Vec<_>>().join(", ")),
        Value::Null => "n/a".into(),
        other => other.to_string(),
    }
}

/// Judges one criterion from the manifests of the runs it reads; a missing
/// manifest (failed run) fails the criterion.
fn judge(c: &Criterion, manifests: &BTreeMap<String, Result<Manifest, String>>) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (run, check) in c.checks {
        match manifests.get(*run) {
            Some(Ok(m)) => match m.verdict(check) {
                Some(v) => pass &= v.pass,
                None => {
                    pass = false;
                    parts.push(format!("{check} missing"));
                }
            },
            Some(Err(e)) => {
                pass = false;
                parts.push(format!("{run} failed: {e}"));
            }
            None => {
                pass = false;
                parts.push(format!("{run} not run"));
            }
        }
    }
    for (run, check, pointer, label) in c.quote {
        if let Some(Ok(m)) = manifests.get(*run) {
            if let Some(v) = m.verdict(check) {
                let record = serde_json::json!({ "metrics": v.metrics, "params": v.params });
                parts.push(format!("{label}={}", show(record.pointer(pointer).unwrap_or(&Value::Null))));
            }
        }
    }
    parts.dedup();
    Outcome { id: c.id, title: c.title.to_string(), pass, detail: parts.join(" ") }
}

/// Runs every config into `out_dir/<name>`, then judges the criteria in
/// order from the manifests alone; `report` sees each outcome.
pub fn run_suite(out_dir: &Path, seed: u64, mut report: impl FnMut(&Outcome)) -> Result<Vec<Outcome>> {
    let mut manifests = BTreeMap::new();
    for cfg in configs() {
        let name = cfg.name();
        let dir = out_dir.join(&name);
        let loaded = runners::run(&cfg, &dir, seed).and_then(|_| Manifest::load(&dir)).map_err(|e| format!("{e:#}"));
        manifests.insert(name, loaded);
    }
    let outcomes: Vec<Outcome> = CRITERIA.iter().map(|c| judge(c, &manifests)).collect();
    outcomes.iter().for_each(&mut report);
    let mut summary = RunOutput::create(out_dir)?;
    summary.write_json("acceptance.json", &outcomes).context("writing the acceptance summary")?;
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_criterion_has_a_run() {
        let names: Vec<String> = configs().iter().map(|c| c.name()).collect();
        for c in CRITERIA {
            for (run, _) in c.checks {
                assert!(names.iter().any(|n| n == run), "criterion {} reads missing run {run}", c.id);
            }
        }
        let ids: Vec<u8> = CRITERIA.iter().map(|c| c.id).collect();
        assert_eq!(ids, (1..=14).collect::<Vec<u8>>());
    }

    #[test]
    fn configs_validate_and_round_trip() {
        for cfg in configs() {
            cfg.validate().unwrap();
            let text = serde_json::to_string(&cfg).unwrap();
            assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg);
        }
    }

    #[test]
    fn judge_reads_manifest_verdicts() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = RunOutput::create(dir.path()).unwrap();
        out.verdict(bergspec::checks::Verdict::new(
            "weyl_pairs",
            Value::Null,
            Some(1),
            true,
            serde_json::json!({ "product_violations": 0, "counting_violations": 0 }),
        ));
        out.finish("checks", "checks", 1, Value::Null).unwrap();
        let mut manifests = BTreeMap::new();
        manifests.insert("checks".to_string(), Manifest::load(dir.path()).map_err(|e| e.to_string()));
        manifests.insert("radial".to_string(), Err("boom".to_string()));
        let c = CRITERIA.iter().find(|c| c.id == 7).unwrap();
        let o = judge(c, &manifests);
        assert!(o.pass);
        assert_eq!(o.detail, "product violations=0 counting violations=0");
        let c3 = CRITERIA.iter().find(|c| c.id == 3).unwrap();
        assert!(!judge(c3, &manifests).pass);
        let c1 = judge(&CRITERIA[0], &manifests);
        assert!(!c1.pass && c1.detail.contains("boom"));
        assert!(!judge(&CRITERIA[7], &manifests).pass);
    }
}
