//! Diagnostics for the arc decomposition `T_{φ₀} = Σ T_{χ̃_j}`: cross products
//! between arcs and the decay of pieces cut off away from the circle.

use serde::Serialize;
use serde_json::json;

use super::{f, Verdict};
use crate::assembly::{assemble_arc_family, assemble_toeplitz, BlockFamily};
use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::scalar::Real;
use crate::spectra::{singular_values, IndexWindow};
use crate::symbol::{ArcPartition, GammaExponent, RadialProfile, RadialWeight, SeparableSymbol};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossTermParams {
    pub parts: usize,
    pub gamma: f64,
    pub n: usize,
    /// Window for the scaled sequences; `hi` defaults to `N/8`.
    pub window_lo: usize,
    pub window_hi: Option<usize>,
    /// Allowed relative change of the Hilbert-Schmidt norm from `N` to `2N`.
    pub hs_tol: f64,
    /// Required relative decrease of adjacent scaled sequences across the window.
    pub adjacent_drop: f64,
    /// Fraction of its window-start value the control must keep.
    pub control_keep: f64,
}

impl Default for CrossTermParams {
    fn default() -> Self {
        Self {
            parts: 4,
            gamma: 1.0,
            n: 512,
            window_lo: 16,
            window_hi: None,
            hs_tol: 0.10,
            adjacent_drop: 0.25,
            control_keep: 0.5,
        }
    }
}

/// Pairs `(j, k)` at one circular arc distance. Rotation maps every such pair
/// to `(1, 1 + distance)` by a unitary equivalence, so they share singular values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairClass {
    pub distance: usize,
    pub pairs: Vec<(usize, usize)>,
    pub top_singular: f64,
    pub hs_norm: f64,
    pub hs_norm_2n: f64,
    pub hs_rel_change: f64,
    pub window: IndexWindow,
    /// `(n, (log(n+1))^{2γ} s_n)` over the window
    pub scaled: Vec<(usize, f64)>,
    /// least-squares slope of the scaled sequence against `log n`
    pub trend_slope: f64,
}

impl PairClass {
    fn start(&self) -> f64 {
        self.scaled.first().map_or(f64::NAN, |p| p.1)
    }

    fn end(&self) -> f64 {
        self.scaled.last().map_or(f64::NAN, |p| p.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossTermReport {
    pub params: CrossTermParams,
    /// distance 0 is the self-product control, 1 the adjacent pairs
    pub classes: Vec<PairClass>,
    pub non_adjacent_ok: bool,
    pub adjacent_ok: bool,
    pub control_ok: bool,
}

impl CrossTermReport {
    pub fn pass(&self) -> bool {
        self.non_adjacent_ok && self.adjacent_ok && self.control_ok
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::new(
            "cross_term",
            serde_json::to_value(self.params).unwrap_or_default(),
            None,
            self.pass(),
            json!({
                "classes": self.classes,
                "non_adjacent_ok": self.non_adjacent_ok,
                "adjacent_ok": self.adjacent_ok,
                "control_ok": self.control_ok,
            }),
        )
    }
}

fn product<T: Real>(family: &BlockFamily<T>, distance: usize) -> Result<CMatrix<T>> {
    let b = family.blocks();
    b[distance].adjoint_mul(&b[0])
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Products `T_{χ̃_k}* T_{χ̃_j}` for an `L`-arc partition at `N` and `2N`.
pub fn cross_term_diagnostic<T: Real>(params: CrossTermParams) -> Result<CrossTermReport> {
    let CrossTermParams { parts, gamma, n, .. } = params;
    if parts < 3 {
        return Err(Error::InvalidArgument(format!("need L >= 3 for non-adjacent pairs, got {parts}")));
    }
    let hi = params.window_hi.unwrap_or(n / 8);
    if params.window_lo < 1 || params.window_lo >= hi || hi > n {
        return Err(Error::EmptyWindow(format!("window [{}, {hi}] for N = {n}", params.window_lo)));
    }
    let window = IndexWindow { lo: params.window_lo, hi };
    let g = GammaExponent::new(T::lit(gamma))?;
    let small = assemble_arc_family(parts, g, n)?;
    let large = assemble_arc_family(parts, g, 2 * n)?;

    let mut classes = Vec::new();
    for distance in 0..=parts / 2 {
        let pairs = (1..=parts)
            .flat_map(|j| (1..=parts).map(move |k| (j, k)))
            .filter(|&(j, k)| {
                let d = j.abs_diff(k);
                d.min(parts - d) == distance
            })
            .collect();
        let p = product(&small, distance)?;
        let hs = f(p.frobenius());
        let hs_2n = f(product(&large, distance)?.frobenius());
        let s = singular_values(&p)?;
        let scaled: Vec<(usize, f64)> =
            (window.lo..=window.hi).map(|m| (m, ((m + 1) as f64).ln().powf(2.0 * gamma) * f(s.s(m)))).collect();
        let trend: Vec<(f64, f64)> = scaled.iter().map(|&(m, v)| ((m as f64).ln(), v)).collect();
        classes.push(PairClass {
            distance,
            pairs,
            top_singular: f(s.s(1)),
            hs_norm: hs,
            hs_norm_2n: hs_2n,
            hs_rel_change: (hs_2n - hs).abs() / hs,
            window,
            scaled,
            trend_slope: slope(&trend),
        });
    }
    let non_adjacent_ok = classes.iter().filter(|c| c.distance >= 2).all(|c| c.hs_rel_change <= params.hs_tol);
    let adjacent = &classes[1];
    let adjacent_ok = adjacent.end() <= (1.0 - params.adjacent_drop) * adjacent.start();
    let control = &classes[0];
    let control_ok = control.scaled.iter().all(|p| p.1 >= params.control_keep * control.start());
    Ok(CrossTermReport { params, classes, non_adjacent_ok, adjacent_ok, control_ok })
}

struct DecayFit {
    slope: f64,
    points: usize,
    /// slope over the second half of the points divided by that over the first
    curvature: f64,
}

/// Least-squares slope of `log s_n` against `n` over the leading values above
/// `noise · s_1`, or over the first `limit` values if given.
fn decay_fit(values: &[f64], noise: f64, limit: Option<usize>) -> DecayFit {
    let s1 = values[0];
    let k = limit.unwrap_or_else(|| values.iter().take_while(|v| **v > noise * s1).count());
    let pts: Vec<(f64, f64)> = values[..k].iter().enumerate().map(|(i, v)| ((i + 1) as f64, v.ln())).collect();
    let half = pts.len() / 2;
    let curvature = if half >= 2 { slope(&pts[half..]) / slope(&pts[..half]) } else { f64::NAN };
    DecayFit { slope: if pts.len() >= 2 { slope(&pts) } else { f64::NAN }, points: pts.len(), curvature }
}

/// `s_n(T_{χ_{|z|≤1-δ} χ̃_arc}) ≤ C(1-δ)^{2n}`: the fitted log-linear slope must
/// be at most `(1 - tol)·2 log(1-δ)`. With `sharp` the slope must also lie
/// within `tol` of `2 log(1-δ)`. The uncut symbol is fitted over the same
/// index range as a control and must be rejected as non-exponential: slope
/// shallower than half the target, or half-range slopes differing by more
/// than a factor 1.5.
#[allow(clippy::too_many_arguments)]
pub fn check_compact_support_decay<T: Real>(
    delta: f64,
    parts: usize,
    gamma: f64,
    n: usize,
    tol: f64,
    noise: f64,
    sharp: bool,
) -> Result<Verdict> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1/2], got {delta}")));
    }
    let partition = ArcPartition::new(parts)?;
    let g = GammaExponent::new(T::lit(gamma))?;
    let cut = RadialWeight::new(g, RadialProfile::Cutoff { radius: T::lit(1.0 - delta) });
    let cut_sym = SeparableSymbol::new(partition.indicator(1)?, cut);
    let values: Vec<f64> =
        singular_values(&assemble_toeplitz(&cut_sym, n)?.matrix)?.values.iter().map(|v| f(*v)).collect();
    let fit = decay_fit(&values, noise, None);
    if fit.points < 4 {
        return Err(Error::EmptyWindow(format!("only {} singular values above the noise floor", fit.points)));
    }
    let full_sym = partition.restriction(1, g)?;
    let full: Vec<f64> =
        singular_values(&assemble_toeplitz(&full_sym, n)?.matrix)?.values.iter().map(|v| f(*v)).collect();
    let control = decay_fit(&full, noise, Some(fit.points));

    let target = 2.0 * (1.0 - delta).ln();
    let bound_ok = fit.slope <= (1.0 - tol) * target;
    let rel_dev = (fit.slope / target - 1.0).abs();
    let within = rel_dev <= tol;
    let control_rejected = !(control.slope <= 0.5 * target) || !((control.curvature - 1.0).abs() <= 0.5);
    let pass = bound_ok && control_rejected && (!sharp || within);
    Ok(Verdict::new(
        "compact_support_decay",
        json!({ "delta": delta, "parts": parts, "gamma": gamma, "n": n, "tol": tol, "noise": noise, "sharp": sharp }),
        None,
        pass,
        json!({
            "slope": fit.slope, "target": target, "points": fit.points,
            "rel_deviation": rel_dev, "bound_ok": bound_ok, "within_band": within,
            "curvature": fit.curvature, "control_slope": control.slope,
            "control_curvature": control.curvature, "control_rejected": control_rejected,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_cutoff_decays_at_the_bound_rate() {
        let v = check_compact_support_decay::<f64>(0.5, 1, 1.0, 64, 0.1, 1e-12, true).unwrap();
        assert!(v.pass, "{}", v.metrics);
    }

    #[test]
    fn arc_cutoff_decays_faster_than_the_bound() {
        let v = check_compact_support_decay::<f64>(0.5, 4, 1.0, 64, 0.1, 1e-12, false).unwrap();
        assert!(v.pass);
        assert_eq!(v.metrics["within_band"], false);
    }

    #[test]
    fn cross_terms_small() {
        let params = CrossTermParams { n: 128, window_lo: 4, ..CrossTermParams::default() };
        let r = cross_term_diagnostic::<f64>(params).unwrap();
        assert_eq!(r.classes.len(), 3);
        assert_eq!(r.classes[1].pairs.len(), 8);
        assert_eq!(r.classes[2].pairs, vec![(1, 3), (2, 4), (3, 1), (4, 2)]);
        assert!(r.control_ok);
    }

    #[test]
    fn needs_three_arcs() {
        let params = CrossTermParams { parts: 2, ..CrossTermParams::default() };
        assert!(cross_term_diagnostic::<f64>(params).is_err());
    }
}
