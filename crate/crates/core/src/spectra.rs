//! Singular values, signed eigenvalues, counting functions and the
//! logarithmic-scale functionals built on them.
//!
//! Index convention: `values[i]` is `s_{i+1}`, so `s_n` for `n >= 1` sits at `n - 1`.

use std::io::Write;

use num_complex::Complex;
use serde::Serialize;

use crate::eigen::{tridiagonalize, Tridiagonal};
use crate::error::{Error, Result};
use crate::matrix::{CMatrix, Matrix};
use crate::scalar::{Real, Scalar};

/// Relative Hermitian defect under which a matrix takes the Hermitian path.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Absolute defect accepted by [`eigen_signed`].
pub const SIGNED_HERMITIAN_TOL: f64 = 1e-10;
/// Imaginary residue (relative to `max|a_ij|`) tolerated by phase realization.
const REALIZATION_TOL: f64 = 1e-11;
/// Minimum number of grid points of the `Δγ/δγ` estimator.
pub const MIN_WINDOW_POINTS: usize = 64;

/// Decreasing singular values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularSpectrum<T> {
    pub values: Vec<T>,
    /// Dimension of the truncation the values come from; `None` for exact
    /// analytic sequences, which carry no truncation floor.
    pub source_dim: Option<usize>,
}

impl<T: Real> SingularSpectrum<T> {
    /// Sorts `values` descending.
    pub fn from_values(mut values: Vec<T>, source_dim: Option<usize>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < T::zero()) {
            return Err(Error::InvalidArgument(format!("singular values must be finite and >= 0, got {bad}")));
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(Self { values, source_dim })
    }

    /// `s_n` for `n >= 1`.
    pub fn s(&self, n: usize) -> T {
        self.values[n - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Length used by the `N/8` guard.
    pub fn guard_dim(&self) -> usize {
        self.source_dim.unwrap_or(self.values.len())
    }

    /// `(log(n+1))^γ s_n` for `n = 1 ..= len`.
    pub fn scaled(&self, gamma: T) -> Vec<T> {
        self.values.iter().enumerate().map(|(i, &s)| T::from_usize_lossy(i + 2).ln().powf(gamma) * s).collect()
    }

    /// CSV with columns `index, value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([(i + 1).to_string(), format!("{v:e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Positive eigenvalues and moduli of negative ones, each decreasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignedSpectrum<T> {
    pub positives: Vec<T>,
    pub negatives: Vec<T>,
    pub source_dim: Option<usize>,
}

impl<T: Real> SignedSpectrum<T> {
    pub fn from_eigenvalues(eigenvalues: &[T], source_dim: Option<usize>) -> Self {
        let mut positives: Vec<T> = eigenvalues.iter().copied().filter(|&v| v > T::zero()).collect();
        let mut negatives: Vec<T> = eigenvalues.iter().filter(|&&v| v < T::zero()).map(|v| -*v).collect();
        positives.sort_by(|a, b| b.partial_cmp(a).unwrap());
        negatives.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Self { positives, negatives, source_dim }
    }

    pub fn positive_spectrum(&self) -> SingularSpectrum<T> {
        SingularSpectrum { values: self.positives.clone(), source_dim: self.source_dim }
    }

    pub fn negative_spectrum(&self) -> SingularSpectrum<T> {
        SingularSpectrum { values: self.negatives.clone(), source_dim: self.source_dim }
    }
}

fn check_finite<T: Real, E: Scalar<T>>(a: &Matrix<E>) -> Result<()> {
    if a.as_slice().iter().any(|z| !z.re().is_finite() || !z.im().is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    Ok(())
}

fn is_hermitian<T: Real, E: Scalar<T>>(a: &Matrix<E>) -> bool {
    a.is_square() && a.hermitian_defect() <= T::tol(HERMITIAN_TOL) * a.max_abs()
}

/// Tridiagonal matrix with the same eigenvalues as a Hermitian matrix of bandwidth ≤ 1.
fn band_tridiagonal<T: Real, E: Scalar<T>>(a: &Matrix<E>) -> Result<Tridiagonal<T>> {
    let n = a.rows();
    let diag = (0..n).map(|i| a[(i, i)].re()).collect();
    let offdiag = (1..n).map(|i| a[(i, i - 1)].modulus()).collect();
    Tridiagonal::new(diag, offdiag)
}

/// Eigenvalues of a Hermitian matrix, ascending, choosing the cheapest exact route.
pub fn hermitian_spectrum<T: Real, E: Scalar<T>>(a: &Matrix<E>) -> Result<Vec<T>> {
    if a.bandwidth() <= 1 {
        return band_tridiagonal(a)?.eigenvalues();
    }
    tridiagonalize(a)?.eigenvalues()
}

/// `D A D*` with a diagonal unitary `D = diag(e^{-imα})` when that makes a
/// Hermitian matrix real; the phase `α` is read off `a_{1,0}`.
///
/// Hermitian Toeplitz-type matrices whose coefficients have a linear phase
/// (symbols symmetric about some axis) are of this kind. Dropping an
/// imaginary residue `iX` (`X` antisymmetric) moves eigenvalues only at
/// second order.
pub fn phase_realize<T: Real>(a: &CMatrix<T>) -> Option<Matrix<T>> {
    let n = a.rows();
    if n < 2 || !a.is_square() {
        return None;
    }
    let a10 = a[(1, 0)];
    if a10.norm() == T::zero() {
        return None;
    }
    let alpha = a10.arg();
    let phases: Vec<Complex<T>> =
        (0..n).map(|m| Complex::from_polar(T::one(), -(T::from_usize_lossy(m) * alpha).wrap(T::TAU()))).collect();
    let limit = T::tol(REALIZATION_TOL) * a.max_abs();
    let mut out = Matrix::from_fn(n, n, |_, _| T::zero());
    for i in 0..n {
        for j in 0..=i {
            let z = phases[i] * a[(i, j)] * phases[j].conj();
            if z.im.abs() > limit {
                return None;
            }
            out[(i, j)] = z.re;
            out[(j, i)] = z.re;
        }
    }
    Some(out)
}

/// All singular values of a complex matrix, decreasing.
///
/// Hermitian input uses `|λ|` (through a real matrix when the entries are real
/// or can be made real by a diagonal phase); anything else goes through the
/// Hermitian dilation `[[0, A], [A*, 0]]`, whose top eigenvalues are the
/// singular values. Both routes are backward stable, unlike `A*A`.
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Result<SingularSpectrum<T>> {
    check_finite(a)?;
    if let Some(r) = a.to_real() {
        return singular_values_real(&r);
    }
    if is_hermitian(a) {
        let ev = if a.bandwidth() <= 1 {
            band_tridiagonal(a)?.eigenvalues()?
        } else if let Some(r) = phase_realize(a) {
            tridiagonalize(&r)?.eigenvalues()?
        } else {
            tridiagonalize(a)?.eigenvalues()?
        };
        return SingularSpectrum::from_values(ev.iter().map(|v| v.abs()).collect(), Some(a.rows()));
    }
    dilation_singular_values(a)
}

pub fn singular_values_real<T: Real>(a: &Matrix<T>) -> Result<SingularSpectrum<T>> {
    check_finite(a)?;
    if is_hermitian(a) {
        let ev = hermitian_spectrum(a)?;
        return SingularSpectrum::from_values(ev.iter().map(|v| v.abs()).collect(), Some(a.rows()));
    }
    dilation_singular_values(a)
}

fn dilation_singular_values<T: Real, E: Scalar<T>>(a: &Matrix<E>) -> Result<SingularSpectrum<T>> {
    let (r, c) = (a.rows(), a.cols());
    let k = r.min(c);
    let mut h = Matrix::zeros(r + c, r + c);
    h.set_block(0, r, a);
    h.set_block(r, 0, &a.adjoint());
    let ev = tridiagonalize(&h)?.eigenvalues_by_index(r + c - k..r + c)?;
    SingularSpectrum::from_values(ev.iter().map(|v| v.max(T::zero())).collect(), Some(r.max(c)))
}

/// Signed eigenvalues of a Hermitian matrix.
pub fn eigen_signed<T: Real>(a: &CMatrix<T>) -> Result<SignedSpectrum<T>> {
    check_finite(a)?;
    let defect = a.hermitian_defect();
    if defect > T::lit(SIGNED_HERMITIAN_TOL) {
        return Err(Error::NotHermitian(defect.to_f64_lossy()));
    }
    let ev = match a.to_real() {
        Some(r) => hermitian_spectrum(&r)?,
        None if a.bandwidth() <= 1 => band_tridiagonal(a)?.eigenvalues()?,
        None => match phase_realize(a) {
            Some(r) => tridiagonalize(&r)?.eigenvalues()?,
            None => tridiagonalize(a)?.eigenvalues()?,
        },
    };
    Ok(SignedSpectrum::from_eigenvalues(&ev, Some(a.rows())))
}

/// All eigenvalue moduli of a symmetric tridiagonal matrix, decreasing.
pub fn tridiagonal_eigenvalues<T: Real>(diag: Vec<T>, offdiag: Vec<T>) -> Result<SingularSpectrum<T>> {
    let t = Tridiagonal::new(diag, offdiag)?;
    let n = t.len();
    SingularSpectrum::from_values(t.eigenvalues()?.iter().map(|v| v.abs()).collect(), Some(n))
}

/// The `k` largest eigenvalue moduli of a symmetric tridiagonal matrix.
///
/// They are among the `k` lowest and `k` highest eigenvalues, which are the
/// only ones computed.
pub fn tridiagonal_leading<T: Real>(t: &Tridiagonal<T>, k: usize) -> Result<SingularSpectrum<T>> {
    let n = t.len();
    let k = k.min(n);
    let mut moduli: Vec<T> = if 2 * k >= n {
        t.eigenvalues()?
    } else {
        let mut v = t.eigenvalues_by_index(0..k)?;
        v.extend(t.eigenvalues_by_index(n - k..n)?);
        v
    }
    .iter()
    .map(|v| v.abs())
    .collect();
    moduli.sort_by(|a, b| b.partial_cmp(a).unwrap());
    moduli.truncate(k);
    SingularSpectrum::from_values(moduli, Some(n))
}

/// Signed spectrum of a symmetric tridiagonal matrix.
pub fn tridiagonal_signed<T: Real>(t: &Tridiagonal<T>) -> Result<SignedSpectrum<T>> {
    Ok(SignedSpectrum::from_eigenvalues(&t.eigenvalues()?, Some(t.len())))
}

/// `(n(s), ñ(s)) = (#{n : s_n > s}, n(s) + 2)` for decreasing `values`.
pub fn counting<T: Real>(values: &[T], s: T) -> (usize, usize) {
    let n = values.partition_point(|&v| v > s);
    (n, n + 2)
}

/// Counting function on a log-spaced `s` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingProfile<T> {
    pub gamma: T,
    pub s: Vec<T>,
    pub n: Vec<usize>,
    pub n_tilde: Vec<usize>,
    /// `s^{1/γ} log ñ(s)`
    pub scaled: Vec<T>,
}

impl<T: Real> CountingProfile<T> {
    /// `points` log-spaced values from `s_lo` to `s_hi` inclusive.
    pub fn compute(values: &[T], gamma: T, s_lo: T, s_hi: T, points: usize) -> Result<Self> {
        if !(gamma > T::zero()) {
            return Err(Error::InvalidArgument(format!("counting profile needs gamma > 0, got {gamma}")));
        }
        if !(s_lo > T::zero() && s_lo < s_hi) || points < 2 {
            return Err(Error::EmptyWindow(format!("s window [{s_lo:e}, {s_hi:e}] with {points} points")));
        }
        let (a, b) = (s_lo.ln(), s_hi.ln());
        let last = T::from_usize_lossy(points - 1);
        let s: Vec<T> = (0..points)
            .map(|i| match i {
                0 => s_lo,
                _ if i == points - 1 => s_hi,
                _ => (a + (b - a) * T::from_usize_lossy(i) / last).exp(),
            })
            .collect();
        let mut n = Vec::with_capacity(points);
        let mut n_tilde = Vec::with_capacity(points);
        let mut scaled = Vec::with_capacity(points);
        for &si in &s {
            let (c, ct) = counting(values, si);
            n.push(c);
            n_tilde.push(ct);
            scaled.push(si.powf(T::one() / gamma) * T::from_usize_lossy(ct).ln());
        }
        Ok(Self { gamma, s, n, n_tilde, scaled })
    }

    /// CSV with columns `s, n, n_tilde, scaled`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s", "n", "n_tilde", "scaled"])?;
        for i in 0..self.s.len() {
            w.write_record([
                format!("{:e}", self.s[i]),
                self.n[i].to_string(),
                self.n_tilde[i].to_string(),
                format!("{:e}", self.scaled[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Index window `[n_lo, n_hi]` (1-based, inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndexWindow {
    pub lo: usize,
    pub hi: usize,
}

impl IndexWindow {
    /// `[max(8, N/256), N/8]`.
    pub fn default_for(dim: usize) -> Self {
        Self { lo: (dim / 256).max(8), hi: dim / 8 }
    }
}

/// Window in `s`, `s_lo < s_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SWindow<T> {
    pub lo: T,
    pub hi: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaFunctionalEstimate<T> {
    /// window maximum of `s^{1/γ} log ñ(s)`
    pub delta_upper: T,
    /// window minimum
    pub delta_lower: T,
    pub window: SWindow<T>,
    pub points: usize,
    /// `s_{N/8}`, below which the window is not allowed to reach
    pub floor: T,
}

/// `s` value at index `n` of the floor guard.
fn truncation_floor<T: Real>(spec: &SingularSpectrum<T>) -> Result<T> {
    let idx = spec.guard_dim() / 8;
    if idx == 0 || idx > spec.len() {
        return Err(Error::EmptyWindow(format!(
            "floor index N/8 = {idx} not available in a spectrum of length {}",
            spec.len()
        )));
    }
    Ok(spec.s(idx))
}

/// `s` window matching an index window: `[s_{n_hi}, s_{n_lo}]`.
pub fn s_window_for<T: Real>(spec: &SingularSpectrum<T>, window: IndexWindow) -> Result<SWindow<T>> {
    if window.lo == 0 || window.lo >= window.hi || window.hi > spec.len() {
        return Err(Error::EmptyWindow(format!(
            "index window [{}, {}] in a spectrum of length {}",
            window.lo,
            window.hi,
            spec.len()
        )));
    }
    Ok(SWindow { lo: spec.s(window.hi), hi: spec.s(window.lo) })
}

/// Estimates `Δγ` and `δγ` by the max and min of `s^{1/γ} log ñ(s)` over a
/// log-spaced `s` grid. The window defaults to the `s`-range of the index
/// window `[max(8, N/256), N/8]` and is clipped below at `s_{N/8}`.
pub fn gamma_functionals<T: Real>(
    spec: &SingularSpectrum<T>,
    gamma: T,
    window: Option<SWindow<T>>,
    points: usize,
) -> Result<GammaFunctionalEstimate<T>> {
    let floor = truncation_floor(spec)?;
    let mut w = match window {
        Some(w) => w,
        None => s_window_for(spec, IndexWindow::default_for(spec.guard_dim()))?,
    };
    w.lo = w.lo.max(floor);
    if !(w.lo < w.hi) || !(w.lo > T::zero()) {
        return Err(Error::EmptyWindow(format!("s window [{:e}, {:e}] after floor {:e}", w.lo, w.hi, floor)));
    }
    let points = points.max(MIN_WINDOW_POINTS);
    let profile = CountingProfile::compute(&spec.values, gamma, w.lo, w.hi, points)?;
    let delta_upper = profile.scaled.iter().copied().fold(T::neg_infinity(), T::max);
    let delta_lower = profile.scaled.iter().copied().fold(T::infinity(), T::min);
    Ok(GammaFunctionalEstimate { delta_upper, delta_lower, window: w, points, floor })
}

/// Least-squares fit of `s_n ≈ c / (log(n+1))^γ` over an index window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticFit<T> {
    pub c_hat: T,
    pub window: IndexWindow,
    /// `‖s - c x‖ / ‖s‖` over the window
    pub residual: T,
    /// `(log(n_lo+1))^γ s_{n_lo}`
    pub endpoint_lo: T,
    /// `(log(n_hi+1))^γ s_{n_hi}`, the raw endpoint estimator
    pub endpoint_hi: T,
}

/// Fit on arbitrary `(n, s_n)` samples; the window is their index range.
pub fn fit_points<T: Real>(points: &[(usize, T)], gamma: T) -> Result<AsymptoticFit<T>> {
    if points.len() < 2 {
        return Err(Error::EmptyWindow(format!("fit needs at least two points, got {}", points.len())));
    }
    let x = |n: usize| T::one() / T::from_usize_lossy(n + 1).ln().powf(gamma);
    let (mut sxs, mut sxx, mut sss) = (T::zero(), T::zero(), T::zero());
    for &(n, s) in points {
        let xn = x(n);
        sxs += xn * s;
        sxx += xn * xn;
        sss += s * s;
    }
    if !(sxx > T::zero()) {
        return Err(Error::EmptyWindow("degenerate fit window".into()));
    }
    let c_hat = sxs / sxx;
    let rss: T = points.iter().map(|&(n, s)| (s - c_hat * x(n)).powi(2)).sum();
    let residual = if sss > T::zero() { (rss / sss).sqrt() } else { T::zero() };
    let (first, last) = (points[0], points[points.len() - 1]);
    Ok(AsymptoticFit {
        c_hat,
        window: IndexWindow { lo: first.0, hi: last.0 },
        residual,
        endpoint_lo: first.1 / x(first.0),
        endpoint_hi: last.1 / x(last.0),
    })
}

/// Fit over `s_n`, `n ∈ window`; the window must lie in `[8, N/8]`
/// (for analytic sequences, `N` is the sequence length).
pub fn fit_limit<T: Real>(
    spec: &SingularSpectrum<T>,
    gamma: T,
    window: Option<IndexWindow>,
) -> Result<AsymptoticFit<T>> {
    let dim = spec.guard_dim();
    let w = window.unwrap_or_else(|| IndexWindow::default_for(dim));
    let upper = if spec.source_dim.is_some() { dim / 8 } else { spec.len() };
    if w.lo < 8 || w.lo >= w.hi || w.hi > upper || w.hi > spec.len() {
        return Err(Error::EmptyWindow(format!("fit window [{}, {}] outside [8, {upper}]", w.lo, w.hi)));
    }
    let points: Vec<(usize, T)> = (w.lo..=w.hi).map(|n| (n, spec.s(n))).collect();
    fit_points(&points, gamma)
}
