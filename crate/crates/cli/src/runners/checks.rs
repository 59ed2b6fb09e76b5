//! Property-check battery. Random checks take seeds derived from the run seed.

use anyhow::Result;
use bergspec::checks::{
    check_compact_support_decay, check_counting_equivalence, check_identity_fixture, check_lemma44,
    check_p1_subadditivity, check_p2_kyfan, check_p3_products, check_p4_random, check_psi0_bound, check_weyl_pairs,
    Realization, Verdict,
};
use bergspec::SyntheticOperator;

use super::timed;
use crate::config::ChecksConfig;
use crate::output::RunOutput;

fn named(mut v: Verdict, name: &str) -> Verdict {
    v.check = name.to_string();
    v
}

pub fn checks(cfg: &ChecksConfig, seed: u64, out: &mut RunOutput) -> Result<()> {
    let len = cfg.sequence_len;
    let mut push = |v: Verdict| {
        eprintln!("  {}: {}", v.check, if v.pass { "pass" } else { "FAIL" });
        out.verdict(v);
    };

    push(check_identity_fixture::<f64>(cfg.identity_n, cfg.identity_tol)?);
    push(timed("counting", || Ok(check_counting_equivalence::<f64>(&cfg.counting_cases, len, cfg.counting_tol)?))?);

    let a = SyntheticOperator::log_decay(1.0, 1.0, len)?;
    let b = SyntheticOperator::log_decay(2.0, 1.0, len)?;
    let zero = SyntheticOperator::zero(len)?;
    let geometric = SyntheticOperator::geometric(0.5, len)?;
    let rank = SyntheticOperator::finite_rank(10.0, 3, len)?;
    let tol = cfg.estimator_tol;
    timed("class checks", || {
        push(named(check_p1_subadditivity(&a, &zero, 1.0, Realization::Aligned, seed, tol)?, "p1_subadditivity_zero"));
        push(named(check_p1_subadditivity(&a, &a, 1.0, Realization::Aligned, seed, tol)?, "p1_subadditivity_self"));
        let rotated = Realization::Rotated { dim: cfg.rotated_dim };
        push(named(
            check_p1_subadditivity(&a, &b, 1.0, rotated, seed.wrapping_add(1), tol)?,
            "p1_subadditivity_rotated",
        ));
        push(named(check_p2_kyfan(&a, &geometric, 1.0, tol)?, "p2_kyfan_exponential"));
        push(named(check_p2_kyfan(&a, &rank, 1.0, tol)?, "p2_kyfan_finite_rank"));
        push(named(check_p3_products(&a, &a, 1.0, tol, cfg.vanishing)?, "p3_products_log"));
        push(named(check_p3_products(&a, &geometric, 1.0, tol, cfg.vanishing)?, "p3_products_exponential"));
        Ok(())
    })?;

    push(timed("block identities", || {
        Ok(check_p4_random::<f64>(
            cfg.families,
            cfg.max_parts,
            cfg.max_dim,
            seed.wrapping_add(2),
            cfg.product_tol,
            cfg.spectrum_tol,
        )?)
    })?);
    push(timed("lemma inequality", || {
        Ok(check_lemma44(&cfg.lemma_l, cfg.lemma_samples, cfg.lemma_r_min, seed.wrapping_add(3))?)
    })?);
    push(timed("weyl", || {
        Ok(check_weyl_pairs::<f64>(cfg.weyl_pairs, cfg.weyl_max_dim, seed.wrapping_add(4), cfg.weyl_rel_tol)?)
    })?);
    timed("compact support", || {
        let sharp = check_compact_support_decay::<f64>(
            cfg.decay_delta,
            1,
            1.0,
            cfg.decay_n,
            cfg.decay_tol,
            cfg.decay_noise,
            true,
        )?;
        push(named(sharp, "compact_support_radial"));
        let arcs = check_compact_support_decay::<f64>(
            cfg.decay_delta,
            cfg.decay_parts,
            1.0,
            cfg.decay_n,
            cfg.decay_tol,
            cfg.decay_noise,
            false,
        )?;
        push(named(arcs, "compact_support_arcs"));
        Ok(())
    })?;
    push(check_psi0_bound(cfg.psi0_gamma, cfg.psi0_delta, cfg.psi0_samples, cfg.psi0_form, seed.wrapping_add(5))?);
    let rows: Vec<[String; 2]> = out.verdicts().iter().map(|v| [v.check.clone(), v.pass.to_string()]).collect();
    out.write_csv("checks.csv", &["check", "pass"], rows)
}
