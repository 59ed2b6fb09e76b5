//! Cross products between arc pieces of the radial symbol.

use anyhow::Result;
use bergspec::checks::cross_term_diagnostic;

use super::timed;
use crate::config::OrthoConfig;
use crate::output::{num, RunOutput};
use crate::plot::{Axis, Plot, Series};

pub fn ortho(cfg: &OrthoConfig, out: &mut RunOutput) -> Result<()> {
    let report = timed("cross terms", || Ok(cross_term_diagnostic::<f64>(cfg.params())?))?;
    out.write_json("cross_terms.json", &report)?;
    let mut rows = Vec::new();
    let mut plot = Plot::new("(log(n+1))^(2 gamma) s_n of T_k* T_j", "n", "scaled", Axis::Log, Axis::Log);
    for class in &report.classes {
        for &(n, v) in &class.scaled {
            rows.push([class.distance.to_string(), n.to_string(), num(v)]);
        }
        let label = match class.distance {
            0 => "control (k = j)".to_string(),
            d => format!("arc distance {d}"),
        };
        plot.series.push(Series::new(label, class.scaled.iter().map(|&(n, v)| (n as f64, v)).collect()));
    }
    out.write_csv("cross_terms.csv", &["distance", "n", "scaled"], rows)?;
    out.write("cross_terms.svg", plot.to_svg().as_bytes())?;
    out.verdict(report.verdict());
    Ok(())
}
