//! Separable symbols `φ(re^{iθ}) = φ₁(e^{iθ}) · φ₀,γ(r) · g(r)` on the unit disk.
//!
//! The radial factor is the logarithmic weight `(1 + log(1/(1-r)))^{-γ}`,
//! optionally multiplied by a bounded profile `g` with a declared boundary
//! limit `g(1)`. The angular factor is one of a small set of representations
//! whose Fourier coefficients are available in closed form (or by FFT for
//! sampled data).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Imaginary parts below this are treated as zero when a factor must be real.
pub const REALNESS_TOL: f64 = 1e-12;

/// Decay exponent of the radial weight. Zero is admitted for exactly solvable fixtures.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GammaExponent<T>(T);

impl<T: Real> GammaExponent<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if !gamma.is_finite() || gamma < T::zero() {
            return Err(Error::InvalidArgument(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        Ok(Self(gamma))
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    /// `γ = 0`, i.e. `φ₀ ≡ 1`.
    #[inline]
    pub fn is_degenerate(self) -> bool {
        self.0 == T::zero()
    }
}

/// Bounded radial perturbation `g` on `[0, 1)`.
#[derive(Clone)]
pub enum RadialProfile<T> {
    Unit,
    Constant(T),
    /// `g(r) = 1 / (1 + r)`, with `g(1) = 1/2`.
    InverseOnePlusR,
    /// Indicator of `{r <= radius}`; `g(1) = 0`.
    Cutoff {
        radius: T,
    },
    Custom {
        f: Arc<dyn Fn(T) -> T + Send + Sync>,
        limit: T,
    },
}

impl<T: fmt::Display> fmt::Debug for RadialProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Unit => write!(f, "Unit"),
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::InverseOnePlusR => write!(f, "InverseOnePlusR"),
            Self::Cutoff { radius } => write!(f, "Cutoff {{ radius: {radius} }}"),
            Self::Custom { limit, .. } => write!(f, "Custom {{ limit: {limit} }}"),
        }
    }
}

impl<T: Real> RadialProfile<T> {
    #[inline]
    pub fn eval(&self, r: T) -> T {
        match self {
            Self::Unit => T::one(),
            Self::Constant(c) => *c,
            Self::InverseOnePlusR => T::one() / (T::one() + r),
            Self::Cutoff { radius } => {
                if r <= *radius {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Self::Custom { f, .. } => f(r),
        }
    }

    /// The declared boundary value `g(1) = lim_{r→1-} g(r)`.
    pub fn limit(&self) -> T {
        match self {
            Self::Unit => T::one(),
            Self::Constant(c) => *c,
            Self::InverseOnePlusR => T::lit(0.5),
            Self::Cutoff { .. } => T::zero(),
            Self::Custom { limit, .. } => *limit,
        }
    }

    /// Radius beyond which the profile vanishes identically, if any.
    pub fn support_radius(&self) -> Option<T> {
        match self {
            Self::Cutoff { radius } => Some(*radius),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Unit => "unit".into(),
            Self::Constant(c) => format!("constant({c})"),
            Self::InverseOnePlusR => "inv_one_plus_r".into(),
            Self::Cutoff { radius } => format!("cutoff({radius})"),
            Self::Custom { limit, .. } => format!("custom(limit={limit})"),
        }
    }
}

/// `φ₀,γ(r) · g(r)`.
#[derive(Clone)]
pub struct RadialWeight<T> {
    pub gamma: GammaExponent<T>,
    pub profile: RadialProfile<T>,
}

impl<T: fmt::Display + fmt::Debug> fmt::Debug for RadialWeight<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialWeight").field("gamma", &self.gamma).field("profile", &self.profile).finish()
    }
}

impl<T: Real> RadialWeight<T> {
    pub fn new(gamma: GammaExponent<T>, profile: RadialProfile<T>) -> Self {
        Self { gamma, profile }
    }

    pub fn pure(gamma: GammaExponent<T>) -> Self {
        Self::new(gamma, RadialProfile::Unit)
    }

    /// `(1 + log(1/(1-r)))^{-γ}` without the profile.
    #[inline]
    pub fn log_weight(&self, r: T) -> T {
        let u = -(-r).ln_1p();
        self.log_weight_u(u)
    }

    /// The logarithmic weight in the variable `u = -log(1-r)`.
    #[inline]
    pub fn log_weight_u(&self, u: T) -> T {
        if self.gamma.is_degenerate() {
            T::one()
        } else {
            (T::one() + u).powf(-self.gamma.value())
        }
    }

    pub fn eval(&self, r: T) -> Result<T> {
        if !(r >= T::zero() && r < T::one()) {
            return Err(Error::Domain(format!("radius must lie in [0, 1), got {r}")));
        }
        Ok(self.log_weight(r) * self.profile.eval(r))
    }
}

/// A trigonometric polynomial `Σ_{j=-n}^{n} b_j e^{ijθ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial<T> {
    /// `coeffs[j + n] = b_j`.
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> TrigPolynomial<T> {
    pub fn new(coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "trigonometric polynomial needs 2n+1 coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: i64) -> Complex<T> {
        let n = self.degree() as i64;
        if k.abs() > n {
            Complex::new(T::zero(), T::zero())
        } else {
            self.coeffs[(k + n) as usize]
        }
    }

    pub fn eval(&self, theta: T) -> Complex<T> {
        let n = self.degree() as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let k = T::from_i64(i as i64 - n).unwrap();
                *b * Complex::from_polar(T::one(), k * theta)
            })
            .sum()
    }

    /// Value together with first and second θ-derivatives.
    fn eval_with_derivatives(&self, theta: T) -> (Complex<T>, Complex<T>, Complex<T>) {
        let n = self.degree() as i64;
        let mut p = Complex::new(T::zero(), T::zero());
        let mut dp = p;
        let mut ddp = p;
        for (i, b) in self.coeffs.iter().enumerate() {
            let k = T::from_i64(i as i64 - n).unwrap();
            let term = *b * Complex::from_polar(T::one(), k * theta);
            p = p + term;
            dp = dp + term * Complex::new(T::zero(), k);
            ddp = ddp - term.scale(k * k);
        }
        (p, dp, ddp)
    }

    /// Maximum modulus over the circle: dense FFT grid of at least `4096·(2n+1)`
    /// points, then one Newton step on `|p|²` at every grid-local maximum.
    pub fn sup_norm(&self) -> T {
        let n = self.degree();
        let grid = (4096 * (2 * n + 1)).next_power_of_two();
        let mut buf = vec![Complex::new(T::zero(), T::zero()); grid];
        for (i, b) in self.coeffs.iter().enumerate() {
            let k = i as i64 - n as i64;
            buf[k.rem_euclid(grid as i64) as usize] = *b;
        }
        // p(θ_j) = Σ b_k e^{2πi jk/grid}
        FftPlanner::new().plan_fft_inverse(grid).process(&mut buf);
        let modsq: Vec<T> = buf.iter().map(|z| z.norm_sqr()).collect();
        let step = T::TAU() / T::from_usize_lossy(grid);
        let mut best = modsq.iter().copied().fold(T::zero(), T::max);
        for j in 0..grid {
            let prev = modsq[(j + grid - 1) % grid];
            let next = modsq[(j + 1) % grid];
            if modsq[j] >= prev && modsq[j] >= next && modsq[j] > T::zero() {
                let theta = step * T::from_usize_lossy(j);
                let (p, dp, ddp) = self.eval_with_derivatives(theta);
                let f1 = (p.conj() * dp).re;
                let f2 = dp.norm_sqr() + (p.conj() * ddp).re;
                if f2 < T::zero() {
                    let polished = self.eval(theta - f1 / f2).norm_sqr();
                    best = best.max(polished);
                }
            }
        }
        best.sqrt()
    }
}

/// Piecewise constant function: `values[j]` on `[breakpoints[j], breakpoints[j+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<T> {
    breakpoints: Vec<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> StepFunction<T> {
    /// `breakpoints` must be strictly increasing with `last = first + 2π`.
    pub fn new(breakpoints: Vec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "step function needs L+1 breakpoints for L values, got {} and {}",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("breakpoints must be strictly increasing".into()));
        }
        let span = breakpoints[breakpoints.len() - 1] - breakpoints[0];
        if (span - T::TAU()).abs() > T::tol(1e-12) * T::TAU() {
            return Err(Error::InvalidArgument(format!("breakpoints must span exactly 2π, got {span}")));
        }
        let mut breakpoints = breakpoints;
        let last = breakpoints.len() - 1;
        breakpoints[last] = breakpoints[0] + T::TAU();
        Ok(Self { breakpoints, values })
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn eval(&self, theta: T) -> Complex<T> {
        let start = self.breakpoints[0];
        let t = start + (theta - start).wrap(T::TAU());
        let pieces = &self.breakpoints[..self.values.len()];
        let idx = pieces.partition_point(|b| *b <= t).saturating_sub(1);
        self.values[idx]
    }

    pub fn coefficient(&self, k: i64) -> Complex<T> {
        let two_pi = T::TAU();
        if k == 0 {
            let mean = self
                .values
                .iter()
                .zip(self.breakpoints.windows(2))
                .map(|(c, w)| c.scale(w[1] - w[0]))
                .sum::<Complex<T>>();
            return mean.unscale(two_pi);
        }
        let kf = T::from_i64(k).unwrap();
        let phase = |theta: T| Complex::from_polar(T::one(), -kf * theta);
        let mut phases: Vec<Complex<T>> = self.breakpoints.iter().map(|&b| phase(b)).collect();
        // e^{-ik(θ₀+2π)} = e^{-ikθ₀} for integer k
        let last = phases.len() - 1;
        phases[last] = phases[0];
        let sum: Complex<T> = self.values.iter().zip(phases.windows(2)).map(|(c, p)| *c * (p[0] - p[1])).sum();
        sum / Complex::new(T::zero(), two_pi * kf)
    }

    pub fn rotated(&self, alpha: T) -> Self {
        Self { breakpoints: self.breakpoints.iter().map(|&b| b + alpha).collect(), values: self.values.clone() }
    }
}

/// Uniform samples of a function on `[0, 2π)`; the grid size is a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    samples: Vec<Complex<T>>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(samples: Vec<Complex<T>>) -> Result<Self> {
        let m = samples.len();
        if m < 4 || !m.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("sample grid must be a power of two >= 4, got {m}")));
        }
        Ok(Self { samples })
    }

    pub fn from_fn(m: usize, f: impl Fn(T) -> Complex<T>) -> Result<Self> {
        let step = T::TAU() / T::from_usize_lossy(m);
        Self::new((0..m).map(|j| f(step * T::from_usize_lossy(j))).collect())
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Nearest-sample-to-the-left evaluation.
    pub fn eval(&self, theta: T) -> Complex<T> {
        let m = self.samples.len();
        let t = theta.wrap(T::TAU()) / T::TAU() * T::from_usize_lossy(m);
        // grid points that land a rounding error below a node belong to that node
        let j = (t + T::lit(1e-9)).floor().to_usize().unwrap_or(0) % m;
        self.samples[j]
    }

    fn spectrum(&self) -> Vec<Complex<T>> {
        let m = self.samples.len();
        let mut buf = self.samples.clone();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let inv = T::from_usize_lossy(m);
        buf.iter_mut().for_each(|z| *z = z.unscale(inv));
        buf
    }

    fn check_index(&self, k: i64) -> Result<()> {
        let m = self.samples.len();
        if 2 * k.unsigned_abs() as usize >= m {
            return Err(Error::Aliasing { k, grid: m });
        }
        Ok(())
    }
}

/// Angular factor `φ₁` on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub enum AngularFactor<T> {
    Constant(Complex<T>),
    TrigPolynomial(TrigPolynomial<T>),
    Step(StepFunction<T>),
    Sampled(SampledFunction<T>),
}

impl<T: Real> AngularFactor<T> {
    pub fn constant(c: T) -> Self {
        Self::Constant(Complex::new(c, T::zero()))
    }

    pub fn trig(coeffs: Vec<Complex<T>>) -> Result<Self> {
        TrigPolynomial::new(coeffs).map(Self::TrigPolynomial)
    }

    pub fn trig_real(coeffs: &[T]) -> Result<Self> {
        Self::trig(coeffs.iter().map(|&b| Complex::new(b, T::zero())).collect())
    }

    pub fn step(breakpoints: Vec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        StepFunction::new(breakpoints, values).map(Self::Step)
    }

    /// Step function with real values on arbitrary breakpoints.
    pub fn step_real(breakpoints: Vec<T>, values: &[T]) -> Result<Self> {
        Self::step(breakpoints, values.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    /// Step function taking `values[j]` on the equal arc `[2πj/L, 2π(j+1)/L)`.
    pub fn equal_steps(values: &[T]) -> Result<Self> {
        let l = values.len();
        if l == 0 {
            return Err(Error::InvalidArgument("step function needs at least one value".into()));
        }
        let breakpoints = (0..=l).map(|j| T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(l)).collect();
        Self::step_real(breakpoints, values)
    }

    pub fn sampled(samples: Vec<Complex<T>>) -> Result<Self> {
        SampledFunction::new(samples).map(Self::Sampled)
    }

    pub fn eval(&self, theta: T) -> Complex<T> {
        match self {
            Self::Constant(c) => *c,
            Self::TrigPolynomial(p) => p.eval(theta),
            Self::Step(s) => s.eval(theta),
            Self::Sampled(s) => s.eval(theta),
        }
    }

    /// `‖φ₁‖_∞`.
    pub fn sup_norm(&self) -> T {
        match self {
            Self::Constant(c) => c.norm(),
            Self::TrigPolynomial(p) => p.sup_norm(),
            Self::Step(s) => s.values.iter().map(|c| c.norm()).fold(T::zero(), T::max),
            Self::Sampled(s) => s.samples.iter().map(|c| c.norm()).fold(T::zero(), T::max),
        }
    }

    /// `(1/2π) ∫ φ₁(e^{iθ}) e^{-ikθ} dθ`.
    pub fn fourier_coefficient(&self, k: i64) -> Result<Complex<T>> {
        Ok(match self {
            Self::Constant(c) => {
                if k == 0 {
                    *c
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            }
            Self::TrigPolynomial(p) => p.coefficient(k),
            Self::Step(s) => s.coefficient(k),
            Self::Sampled(s) => {
                s.check_index(k)?;
                let spec = s.spectrum();
                spec[k.rem_euclid(s.len() as i64) as usize]
            }
        })
    }

    /// Coefficients for `k = -kmax ..= kmax`, stored at `k + kmax`.
    pub fn fourier_table(&self, kmax: usize) -> Result<Vec<Complex<T>>> {
        let km = kmax as i64;
        match self {
            Self::Sampled(s) => {
                s.check_index(km)?;
                let spec = s.spectrum();
                let m = s.len() as i64;
                Ok((-km..=km).map(|k| spec[k.rem_euclid(m) as usize]).collect())
            }
            _ => (-km..=km).map(|k| self.fourier_coefficient(k)).collect(),
        }
    }

    /// Whether `φ₁` is real-valued up to [`REALNESS_TOL`].
    pub fn is_real(&self) -> bool {
        let tol = T::tol(REALNESS_TOL);
        match self {
            Self::Constant(c) => c.im.abs() <= tol,
            Self::TrigPolynomial(p) => {
                let n = p.degree() as i64;
                (-n..=n).all(|k| (p.coefficient(k) - p.coefficient(-k).conj()).norm() <= tol)
            }
            Self::Step(s) => s.values.iter().all(|c| c.im.abs() <= tol),
            Self::Sampled(s) => s.samples.iter().all(|c| c.im.abs() <= tol),
        }
    }

    /// `(φ₁⁺, φ₁⁻)` with `φ₁^± = max{±φ₁, 0}`.
    ///
    /// Trigonometric polynomials are split on a sampled grid of at least 1024
    /// points, since their positive parts are not trigonometric polynomials.
    pub fn pos_neg_parts(&self) -> Result<(Self, Self)> {
        if !self.is_real() {
            return Err(Error::Precondition("sign decomposition requires a real-valued factor".into()));
        }
        let zero = T::zero();
        let split = |c: &Complex<T>| (Complex::new(c.re.max(zero), zero), Complex::new((-c.re).max(zero), zero));
        Ok(match self {
            Self::Constant(c) => {
                let (p, n) = split(c);
                (Self::Constant(p), Self::Constant(n))
            }
            Self::Step(s) => {
                let (p, n): (Vec<_>, Vec<_>) = s.values.iter().map(split).unzip();
                (
                    Self::Step(StepFunction { breakpoints: s.breakpoints.clone(), values: p }),
                    Self::Step(StepFunction { breakpoints: s.breakpoints.clone(), values: n }),
                )
            }
            Self::Sampled(s) => {
                let (p, n): (Vec<_>, Vec<_>) = s.samples.iter().map(split).unzip();
                (Self::Sampled(SampledFunction { samples: p }), Self::Sampled(SampledFunction { samples: n }))
            }
            Self::TrigPolynomial(poly) => {
                let m = (16 * (2 * poly.degree() + 1)).next_power_of_two().max(1024);
                let sampled = SampledFunction::from_fn(m, |t| poly.eval(t))?;
                return Self::Sampled(sampled).pos_neg_parts();
            }
        })
    }

    /// `φ₁(e^{i(θ-α)})`, defined for the exactly rotatable variants.
    pub fn rotated(&self, alpha: T) -> Result<Self> {
        match self {
            Self::Constant(c) => Ok(Self::Constant(*c)),
            Self::Step(s) => Ok(Self::Step(s.rotated(alpha))),
            Self::TrigPolynomial(p) => {
                let n = p.degree() as i64;
                let coeffs = (-n..=n)
                    .map(|k| p.coefficient(k) * Complex::from_polar(T::one(), -T::from_i64(k).unwrap() * alpha))
                    .collect();
                Self::trig(coeffs)
            }
            Self::Sampled(_) => Err(Error::InvalidArgument("sampled factors cannot be rotated exactly".into())),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Constant(c) => format!("constant({c})"),
            Self::TrigPolynomial(p) => format!("trig(degree={})", p.degree()),
            Self::Step(s) => format!("step(pieces={})", s.values.len()),
            Self::Sampled(s) => format!("sampled(M={})", s.len()),
        }
    }
}

/// `φ(re^{iθ}) = φ₁(e^{iθ}) · φ₀,γ(r) · g(r)`.
#[derive(Clone)]
pub struct SeparableSymbol<T> {
    pub angular: AngularFactor<T>,
    pub radial: RadialWeight<T>,
}

impl<T: fmt::Display + fmt::Debug> fmt::Debug for SeparableSymbol<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparableSymbol").field("angular", &self.angular).field("radial", &self.radial).finish()
    }
}

impl<T: Real> SeparableSymbol<T> {
    pub fn new(angular: AngularFactor<T>, radial: RadialWeight<T>) -> Self {
        Self { angular, radial }
    }

    pub fn radial_only(gamma: GammaExponent<T>) -> Self {
        Self::new(AngularFactor::constant(T::one()), RadialWeight::pure(gamma))
    }

    pub fn eval(&self, r: T, theta: T) -> Result<Complex<T>> {
        let w = self.radial.eval(r)?;
        Ok(self.angular.eval(theta).scale(w))
    }

    pub fn gamma(&self) -> GammaExponent<T> {
        self.radial.gamma
    }

    pub fn describe(&self) -> String {
        format!(
            "{} x log-weight(gamma={}, g={})",
            self.angular.describe(),
            self.radial.gamma.value(),
            self.radial.profile.label()
        )
    }
}

/// Partition of `[0, 2π)` into `L` equal half-open arcs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcPartition {
    parts: usize,
}

impl ArcPartition {
    pub fn new(parts: usize) -> Result<Self> {
        if parts == 0 {
            return Err(Error::InvalidArgument("arc partition needs L >= 1".into()));
        }
        Ok(Self { parts })
    }

    pub fn parts(self) -> usize {
        self.parts
    }

    /// `[2π(j-1)/L, 2πj/L)` for `j ∈ 1..=L`.
    pub fn arc<T: Real>(self, j: usize) -> Result<(T, T)> {
        if j == 0 || j > self.parts {
            return Err(Error::InvalidArgument(format!("arc index {j} outside 1..={}", self.parts)));
        }
        let l = T::from_usize_lossy(self.parts);
        Ok((T::TAU() * T::from_usize_lossy(j - 1) / l, T::TAU() * T::from_usize_lossy(j) / l))
    }

    /// Indicator of arc `j` as a step function.
    pub fn indicator<T: Real>(self, j: usize) -> Result<AngularFactor<T>> {
        let (a, b) = self.arc::<T>(j)?;
        if self.parts == 1 {
            return AngularFactor::step_real(vec![a, b], &[T::one()]);
        }
        AngularFactor::step_real(vec![a, b, a + T::TAU()], &[T::one(), T::zero()])
    }

    /// `χ_{I_j} φ₀,γ`.
    pub fn restriction<T: Real>(self, j: usize, gamma: GammaExponent<T>) -> Result<SeparableSymbol<T>> {
        Ok(SeparableSymbol::new(self.indicator(j)?, RadialWeight::pure(gamma)))
    }
}

/// JSON description of an angular factor (`f64` only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum AngularSpec {
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// Coefficients `b_{-n} .. b_n`; each entry is `[re, im]` or a bare real.
    TrigPolynomial {
        coeffs: Vec<ComplexSpec>,
    },
    Step {
        breakpoints: Vec<f64>,
        values: Vec<ComplexSpec>,
    },
    /// Equal arcs `[2πj/L, 2π(j+1)/L)` carrying `values[j]`.
    EqualSteps {
        values: Vec<f64>,
    },
    Sampled {
        samples: Vec<ComplexSpec>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexSpec {
    pub fn value(self) -> Complex<f64> {
        match self {
            Self::Real(x) => Complex::new(x, 0.0),
            Self::Pair([re, im]) => Complex::new(re, im),
        }
    }
}

impl AngularSpec {
    pub fn build(&self) -> Result<AngularFactor<f64>> {
        let conv = |v: &[ComplexSpec]| v.iter().map(|c| c.value()).collect::<Vec<_>>();
        match self {
            Self::Constant { re, im } => Ok(AngularFactor::Constant(Complex::new(*re, *im))),
            Self::TrigPolynomial { coeffs } => AngularFactor::trig(conv(coeffs)),
            Self::Step { breakpoints, values } => AngularFactor::step(breakpoints.clone(), conv(values)),
            Self::EqualSteps { values } => AngularFactor::equal_steps(values),
            Self::Sampled { samples } => AngularFactor::sampled(conv(samples)),
        }
    }
}

/// JSON description of a radial profile `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    #[default]
    Unit,
    Constant {
        value: f64,
    },
    InvOnePlusR,
    Cutoff {
        radius: f64,
    },
}

impl ProfileSpec {
    pub fn build(&self) -> Result<RadialProfile<f64>> {
        match *self {
            Self::Unit => Ok(RadialProfile::Unit),
            Self::Constant { value } if value.is_finite() => Ok(RadialProfile::Constant(value)),
            Self::Constant { value } => Err(Error::InvalidArgument(format!("profile constant {value}"))),
            Self::InvOnePlusR => Ok(RadialProfile::InverseOnePlusR),
            Self::Cutoff { radius } if (0.0..1.0).contains(&radius) => Ok(RadialProfile::Cutoff { radius }),
            Self::Cutoff { radius } => Err(Error::InvalidArgument(format!("cutoff radius {radius} outside [0,1)"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI, TAU};

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn eval_examples() {
        let g1 = GammaExponent::new(1.0).unwrap();
        let sym = SeparableSymbol::new(AngularFactor::constant(1.0), RadialWeight::pure(g1));
        let v = sym.eval(1.0 - 1.0 / E, 0.0).unwrap();
        assert!((v.re - 0.5).abs() < 1e-15 && v.im == 0.0);

        let zero = SeparableSymbol::new(AngularFactor::constant(0.0), RadialWeight::pure(g1));
        assert_eq!(zero.eval(0.7, 1.3).unwrap(), c(0.0));

        let trig = SeparableSymbol::new(AngularFactor::trig_real(&[1.0, 2.0, 1.0]).unwrap(), RadialWeight::pure(g1));
        assert!((trig.eval(0.0, 0.0).unwrap() - c(4.0)).norm() < 1e-15);
    }

    #[test]
    fn eval_rejects_boundary() {
        let sym = SeparableSymbol::radial_only(GammaExponent::new(1.0).unwrap());
        assert!(matches!(sym.eval(1.0, 0.0), Err(Error::Domain(_))));
        assert!(sym.eval(-0.1, 0.0).is_err());
    }

    #[test]
    fn negative_gamma_rejected() {
        assert!(GammaExponent::new(-0.5).is_err());
        assert!(GammaExponent::new(f64::NAN).is_err());
        assert!(GammaExponent::new(0.0).unwrap().is_degenerate());
    }

    #[test]
    fn sup_norm_examples() {
        let step = AngularFactor::equal_steps(&[1.0, -3.0, 2.0]).unwrap();
        assert_eq!(step.sup_norm(), 3.0);
        let trig = AngularFactor::<f64>::trig_real(&[1.0, 2.0, 1.0]).unwrap();
        assert!((trig.sup_norm() - 4.0).abs() < 1e-10);
        let cst = AngularFactor::Constant(Complex::new(3.0, -4.0));
        assert_eq!(cst.sup_norm(), 5.0);
    }

    #[test]
    fn sup_norm_off_grid_maximum() {
        // |1 + e^{i(θ-a)}| peaks at θ = a, generically between grid points.
        let a = 0.123_456_789_f64;
        let coeffs = vec![c(0.0), c(1.0), Complex::from_polar(1.0, -a)];
        let p = AngularFactor::trig(coeffs).unwrap();
        assert!((p.sup_norm() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn step_eval_half_open() {
        let s = AngularFactor::step_real(vec![0.0, PI, TAU], &[1.0, 0.0]).unwrap();
        assert_eq!(s.eval(0.0), c(1.0));
        assert_eq!(s.eval(PI), c(0.0));
        assert_eq!(s.eval(TAU), c(1.0));
        assert_eq!(s.eval(-0.1), c(0.0));
    }

    #[test]
    fn step_validation() {
        assert!(AngularFactor::<f64>::step_real(vec![0.0, 1.0], &[1.0]).is_err());
        assert!(AngularFactor::<f64>::step_real(vec![0.0, 3.0, 2.0, TAU], &[1.0, 2.0, 3.0]).is_err());
        assert!(AngularFactor::<f64>::sampled(vec![c(1.0); 6]).is_err());
        assert!(AngularFactor::<f64>::trig(vec![c(1.0); 2]).is_err());
    }

    #[test]
    fn fourier_examples() {
        let trig = AngularFactor::trig_real(&[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(trig.fourier_coefficient(1).unwrap(), c(1.0));
        assert_eq!(trig.fourier_coefficient(5).unwrap(), c(0.0));

        let full = AngularFactor::step_real(vec![0.0, TAU], &[1.0]).unwrap();
        assert_eq!(full.fourier_coefficient(0).unwrap(), c(1.0));
        for k in [-3, 1, 2, 17] {
            assert!(full.fourier_coefficient(k).unwrap().norm() < 1e-15);
        }

        let half = AngularFactor::step_real(vec![0.0, PI, TAU], &[1.0, 0.0]).unwrap();
        let want = Complex::new(0.0, -1.0 / PI);
        assert!((half.fourier_coefficient(1).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn sampled_fourier_and_aliasing() {
        let s = AngularFactor::Sampled(SampledFunction::from_fn(16, |t: f64| c(t.cos())).unwrap());
        assert!((s.fourier_coefficient(1).unwrap() - c(0.5)).norm() < 1e-14);
        assert!((s.fourier_coefficient(-1).unwrap() - c(0.5)).norm() < 1e-14);
        assert!(s.fourier_coefficient(3).unwrap().norm() < 1e-14);
        assert!(matches!(s.fourier_coefficient(8), Err(Error::Aliasing { .. })));
        assert!(s.fourier_table(8).is_err());
        assert_eq!(s.fourier_table(7).unwrap().len(), 15);
    }

    #[test]
    fn pos_neg_examples() {
        let s = AngularFactor::equal_steps(&[1.0, -2.0]).unwrap();
        let (p, n) = s.pos_neg_parts().unwrap();
        match (p, n) {
            (AngularFactor::Step(p), AngularFactor::Step(n)) => {
                assert_eq!(p.values(), &[c(1.0), c(0.0)]);
                assert_eq!(n.values(), &[c(0.0), c(2.0)]);
            }
            other => panic!("unexpected variants {other:?}"),
        }
        let (p, n) = AngularFactor::constant(-1.0).pos_neg_parts().unwrap();
        assert_eq!((p, n), (AngularFactor::constant(0.0), AngularFactor::constant(1.0)));

        let cosine = AngularFactor::Sampled(SampledFunction::from_fn(8, |t: f64| c(t.cos())).unwrap());
        let (p, _) = cosine.pos_neg_parts().unwrap();
        for j in 0..8 {
            let t = TAU * j as f64 / 8.0;
            if t.cos() < 0.0 {
                assert_eq!(p.eval(t), c(0.0));
            }
        }
        let complex = AngularFactor::Constant(Complex::new(1.0, 0.5));
        assert!(matches!(complex.pos_neg_parts(), Err(Error::Precondition(_))));
    }

    #[test]
    fn trig_pos_neg_reconstructs() {
        let p = AngularFactor::trig_real(&[0.5, 0.0, 0.5]).unwrap();
        let (pos, neg) = p.pos_neg_parts().unwrap();
        for j in 0..1024 {
            let t = TAU * j as f64 / 1024.0;
            let diff = pos.eval(t) - neg.eval(t) - p.eval(t);
            assert!(diff.norm() < 1e-12);
            assert_eq!((pos.eval(t) * neg.eval(t)).norm(), 0.0);
        }
    }

    #[test]
    fn arc_restriction_examples() {
        let g = GammaExponent::new(1.0).unwrap();
        let one = ArcPartition::new(1).unwrap().restriction(1, g).unwrap();
        for t in [0.0, 1.0, 4.0, 6.2] {
            assert_eq!(one.angular.eval(t), c(1.0));
        }
        assert_eq!(one.angular.fourier_coefficient(0).unwrap(), c(1.0));

        let p = ArcPartition::new(4).unwrap();
        let arc2 = p.indicator::<f64>(2).unwrap();
        assert_eq!(arc2.eval(PI / 2.0), c(1.0));
        assert_eq!(arc2.eval(3.0), c(1.0));
        assert_eq!(arc2.eval(PI), c(0.0));
        assert_eq!(arc2.eval(0.1), c(0.0));
        assert!(p.indicator::<f64>(0).is_err());
        assert!(p.indicator::<f64>(5).is_err());
        assert!(ArcPartition::new(0).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"type":"trig_polynomial","coeffs":[0.5,2.0,[0.5,0.0]]}"#;
        let spec: AngularSpec = serde_json::from_str(json).unwrap();
        let f = spec.build().unwrap();
        assert!((f.sup_norm() - 3.0).abs() < 1e-10);
        let bad = r#"{"type":"step","breakpoints":[0.0,1.0],"values":[1.0]}"#;
        let spec: AngularSpec = serde_json::from_str(bad).unwrap();
        assert!(spec.build().is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let s = AngularFactor::<f32>::equal_steps(&[1.0, 0.5]).unwrap();
        let c1 = s.fourier_coefficient(1).unwrap();
        assert!((c1.im + 0.5 / std::f32::consts::PI).abs() < 1e-6);
        let w = RadialWeight::pure(GammaExponent::new(1.0f32).unwrap());
        assert!((w.eval(0.0).unwrap() - 1.0).abs() < 1e-7);
    }
}
