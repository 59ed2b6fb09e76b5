//! Eigenvalues of Hermitian matrices.
//!
//! Dense input is reduced to real symmetric tridiagonal form by Householder
//! reflections (lower triangle only); tridiagonal eigenvalues are isolated by
//! Sturm-sequence bisection and refined by safeguarded Newton steps, several
//! shifts per sweep so the division latency of the recurrence is hidden.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Real, Scalar};

/// Number of shifts evaluated together in one Sturm sweep.
const LANES: usize = 8;
/// Newton/bisection steps allowed per isolated eigenvalue.
const MAX_POLISH_STEPS: usize = 200;

/// Real symmetric tridiagonal matrix: diagonal `d`, off-diagonal `e` (`len = n-1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    pub offdiag: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    pub fn new(diag: Vec<T>, offdiag: Vec<T>) -> Result<Self> {
        if !diag.is_empty() && offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch { expected: diag.len().saturating_sub(1), found: offdiag.len() });
        }
        Ok(Self { diag, offdiag })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn max_abs(&self) -> T {
        self.diag.iter().chain(&self.offdiag).map(|x| x.abs()).fold(T::zero(), T::max)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: T) -> usize {
        let e2: Vec<T> = self.offdiag.iter().map(|&e| e * e).collect();
        sturm_counts::<T, 1>(&self.diag, &e2, [x], pivot_floor(&e2))[0]
    }

    /// All eigenvalues in ascending order, to absolute accuracy `1e-12 · max|entry|`.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        self.eigenvalues_by_index(0..self.len())
    }

    /// Eigenvalues `λ_k`, `k ∈ range` (ascending numbering from 0).
    ///
    /// Intervals are bisected jointly until each holds a single eigenvalue;
    /// isolated eigenvalues are then polished by Newton steps on
    /// `log|det(T - x)|`, safeguarded by the Sturm count of every iterate.
    pub fn eigenvalues_by_index(&self, range: Range<usize>) -> Result<Vec<T>> {
        let n = self.len();
        if range.end > n || range.start > range.end {
            return Err(Error::InvalidArgument(format!("index range {range:?} outside 0..{n}")));
        }
        if range.is_empty() {
            return Ok(Vec::new());
        }
        if let Some(bad) = self.diag.iter().chain(&self.offdiag).find(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite tridiagonal entry {bad}")));
        }
        let scale = self.max_abs();
        if scale == T::zero() {
            return Ok(vec![T::zero(); range.len()]);
        }
        // clusters tighter than the advertised accuracy count as multiple eigenvalues;
        // isolated ones are polished well beyond it, which Newton does in a few steps
        let tol = T::tol(1e-12) * scale;
        let fine = T::epsilon() * T::lit(16.0) * scale;
        let e2: Vec<T> = self.offdiag.iter().map(|&e| e * e).collect();
        let pivmin = pivot_floor(&e2);
        let (lo, hi) = self.gershgorin();
        let mut out = vec![T::nan(); range.len()];
        let isolated = self.isolate(&e2, pivmin, tol, lo, hi, &range, &mut out);
        let polished: Vec<(usize, T)> =
            isolated.par_chunks(LANES).flat_map_iter(|chunk| self.polish(&e2, pivmin, tol, fine, chunk)).collect();
        for (k, v) in polished {
            out[k - range.start] = v;
        }
        if out.iter().any(|v| v.is_nan()) {
            return Err(Error::NoConvergence { iterations: 0, best: out.iter().map(|v| v.to_f64_lossy()).collect() });
        }
        // each value lies in its own bracket, so the order is already ascending
        // up to the tolerance; sorting removes tolerance-level inversions
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(out)
    }

    /// Joint bisection until every wanted index sits alone in its interval.
    /// Clusters narrower than `tol` are resolved on the spot into `out`.
    #[allow(clippy::too_many_arguments)]
    fn isolate(
        &self,
        e2: &[T],
        pivmin: T,
        tol: T,
        lo: T,
        hi: T,
        range: &Range<usize>,
        out: &mut [T],
    ) -> Vec<Bracket<T>> {
        let n = self.len();
        let mut pending = vec![Bracket { lo, hi, count_lo: 0, count_hi: n }];
        let mut isolated = Vec::new();
        while !pending.is_empty() {
            let mids: Vec<T> = pending.iter().map(|b| (b.lo + b.hi) * T::lit(0.5)).collect();
            let counts: Vec<usize> = mids
                .par_chunks(LANES)
                .flat_map_iter(|chunk| {
                    let mut x = [chunk[0]; LANES];
                    x[..chunk.len()].copy_from_slice(chunk);
                    let c = sturm_counts::<T, LANES>(&self.diag, e2, x, pivmin);
                    c.into_iter().take(chunk.len())
                })
                .collect();
            let mut next = Vec::with_capacity(2 * pending.len());
            for ((b, &mid), &cm) in pending.iter().zip(&mids).zip(&counts) {
                for half in [
                    Bracket { lo: b.lo, hi: mid, count_lo: b.count_lo, count_hi: cm },
                    Bracket { lo: mid, hi: b.hi, count_lo: cm, count_hi: b.count_hi },
                ] {
                    if half.count_hi <= half.count_lo || half.count_hi <= range.start || half.count_lo >= range.end {
                        continue;
                    }
                    if half.hi - half.lo <= tol {
                        let v = (half.lo + half.hi) * T::lit(0.5);
                        for k in half.count_lo.max(range.start)..half.count_hi.min(range.end) {
                            out[k - range.start] = v;
                        }
                    } else if half.count_hi - half.count_lo == 1 {
                        isolated.push(half);
                    } else {
                        next.push(half);
                    }
                }
            }
            pending = next;
        }
        isolated
    }

    /// Safeguarded Newton on up to `LANES` isolated brackets at once; stops once a
    /// step is below `tol` or the bracket is narrower than `fine`.
    fn polish(&self, e2: &[T], pivmin: T, tol: T, fine: T, brackets: &[Bracket<T>]) -> Vec<(usize, T)> {
        let m = brackets.len();
        let mut lo = [T::zero(); LANES];
        let mut hi = [T::zero(); LANES];
        let mut x = [T::zero(); LANES];
        let mut done = [true; LANES];
        let mut last_step = [T::zero(); LANES];
        for (l, b) in brackets.iter().enumerate() {
            lo[l] = b.lo;
            hi[l] = b.hi;
            x[l] = (b.lo + b.hi) * T::lit(0.5);
            done[l] = false;
            last_step[l] = b.hi - b.lo;
        }
        let half = T::lit(0.5);
        for _ in 0..MAX_POLISH_STEPS {
            if done.iter().all(|&d| d) {
                break;
            }
            let (counts, dlog) = sturm_newton::<T, LANES>(&self.diag, e2, x, pivmin);
            for l in 0..m {
                if done[l] {
                    continue;
                }
                let k = brackets[l].count_lo;
                if counts[l] > k {
                    hi[l] = x[l];
                } else {
                    lo[l] = x[l];
                }
                let width = hi[l] - lo[l];
                if width <= fine {
                    x[l] = (lo[l] + hi[l]) * half;
                    done[l] = true;
                    continue;
                }
                let step = -T::one() / dlog[l];
                let cand = x[l] + step;
                if step.abs() <= tol {
                    x[l] = cand.max(lo[l]).min(hi[l]);
                    done[l] = true;
                    continue;
                }
                // Newton is kept while it stays in the bracket and its steps contract
                let contracting = step.abs() <= last_step[l] * half;
                if step.is_finite() && cand > lo[l] && cand < hi[l] && contracting {
                    last_step[l] = step.abs();
                    x[l] = cand;
                } else {
                    x[l] = (lo[l] + hi[l]) * half;
                    last_step[l] = width;
                }
            }
        }
        brackets
            .iter()
            .enumerate()
            .map(|(l, b)| (b.count_lo, if done[l] { x[l] } else { (lo[l] + hi[l]) * half }))
            .collect()
    }

    fn gershgorin(&self) -> (T, T) {
        let n = self.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { T::zero() };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { T::zero() };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        let pad = (hi - lo).max(T::one()) * T::epsilon() * T::lit(16.0);
        (lo - pad, hi + pad)
    }
}

fn pivot_floor<T: Real>(e2: &[T]) -> T {
    let m = e2.iter().copied().fold(T::one(), T::max);
    T::min_positive_value() * m / T::epsilon()
}

#[derive(Debug, Clone, Copy)]
struct Bracket<T> {
    lo: T,
    hi: T,
    /// eigenvalues below `lo` and below `hi`
    count_lo: usize,
    count_hi: usize,
}

/// Sturm counts together with `d/dx log|det(T - x)| = Σ q_i'/q_i`.
#[inline]
fn sturm_newton<T: Real, const L: usize>(d: &[T], e2: &[T], x: [T; L], pivmin: T) -> ([usize; L], [T; L]) {
    let guard = |v: T| if v.abs() < pivmin { -pivmin } else { v };
    let mut q = [T::zero(); L];
    let mut dq = [-T::one(); L];
    let mut acc = [T::zero(); L];
    let mut counts = [0usize; L];
    for l in 0..L {
        q[l] = guard(d[0] - x[l]);
        counts[l] = (q[l] < T::zero()) as usize;
        acc[l] = dq[l] / q[l];
    }
    for (di, &ei2) in d[1..].iter().zip(e2) {
        for l in 0..L {
            let r = T::one() / q[l];
            let t = ei2 * r;
            dq[l] = -T::one() + t * r * dq[l];
            q[l] = guard((*di - x[l]) - t);
            counts[l] += (q[l] < T::zero()) as usize;
            acc[l] += dq[l] / q[l];
        }
    }
    (counts, acc)
}

/// Sturm counts (number of negative pivots of `LDLᵀ` of `A - x`) for `L` shifts at once.
#[inline]
fn sturm_counts<T: Real, const L: usize>(d: &[T], e2: &[T], x: [T; L], pivmin: T) -> [usize; L] {
    let mut q = [T::zero(); L];
    let mut counts = [0usize; L];
    // a vanishing pivot is replaced by -pivmin before it is counted
    let guard = |v: T| if v.abs() < pivmin { -pivmin } else { v };
    for l in 0..L {
        q[l] = guard(d[0] - x[l]);
        counts[l] = (q[l] < T::zero()) as usize;
    }
    for (di, &ei2) in d[1..].iter().zip(e2) {
        for l in 0..L {
            q[l] = guard((*di - x[l]) - ei2 / q[l]);
            counts[l] += (q[l] < T::zero()) as usize;
        }
    }
    counts
}

/// Householder reduction of a Hermitian matrix to a real symmetric tridiagonal one
/// with the same eigenvalues. Only the lower triangle of `a` is read.
pub fn tridiagonalize<T: Real, E: Scalar<T>>(a: &Matrix<E>) -> Result<Tridiagonal<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let n = a.rows();
    if n == 0 {
        return Tridiagonal::new(Vec::new(), Vec::new());
    }
    // column-major lower triangle: element (i, j), i >= j, at j*n + i
    let mut w = vec![E::zero(); n * n];
    for j in 0..n {
        for i in j..n {
            w[j * n + i] = a[(i, j)];
        }
    }
    let mut diag = Vec::with_capacity(n);
    let mut offdiag = Vec::with_capacity(n.saturating_sub(1));
    // reflector and q-vector of the current step, plus buffers for the next one
    let mut u = vec![E::zero(); n];
    let mut q = vec![E::zero(); n];
    let mut u_next = vec![E::zero(); n];
    let mut p_next = vec![E::zero(); n];

    // step 0: reflector from column 0 and a plain lower-triangular mat-vec
    diag.push(w[0].re());
    let tau0 = reflector(&w[1..n], &mut u[..n - 1], &mut offdiag);
    if n > 1 {
        let m = n - 1;
        for j in 0..m {
            let col = &w[(1 + j) * n + 1 + j..(2 + j) * n];
            symv_column(col, j, &u[..m], &mut q[..m]);
        }
        finish_q(&u[..m], &mut q[..m], tau0);
    }
    for k in 0..n.saturating_sub(1) {
        // trailing block of step k starts at global index k+1 and has size m
        let m = n - k - 1;
        let b0 = k + 1;
        // update its first column, which defines the next reflector
        {
            let col = &mut w[b0 * n + b0..(b0 + 1) * n];
            rank2_update(col, &u[..m], &q[..m]);
        }
        diag.push(w[b0 * n + b0].re());
        if m == 1 {
            break;
        }
        let m1 = m - 1;
        let tau = reflector(&w[b0 * n + b0 + 1..(b0 + 1) * n], &mut u_next[..m1], &mut offdiag);
        let pn = &mut p_next[..m1];
        pn.iter_mut().for_each(|v| *v = E::zero());
        for j in 1..m {
            let col = &mut w[(b0 + j) * n + b0 + j..(b0 + j + 1) * n];
            rank2_update(col, &u[j..m], &q[j..m]);
            if tau != T::zero() {
                symv_column(col, j - 1, &u_next[..m1], pn);
            }
        }
        finish_q(&u_next[..m1], pn, tau);
        std::mem::swap(&mut u, &mut u_next);
        std::mem::swap(&mut q, &mut p_next);
        // zero the stale tail so the next update sees a null reflector beyond m1
        u[m1..].iter_mut().for_each(|v| *v = E::zero());
        q[m1..].iter_mut().for_each(|v| *v = E::zero());
    }
    Tridiagonal::new(diag, offdiag)
}

/// Householder vector of `x` into `u`; pushes the resulting off-diagonal and returns `τ`.
///
/// `H = I - τ u u*` maps `x` to `-phase(x₁)·|x|·e₁`, so the off-diagonal can be
/// taken as the real number `|x|` after a diagonal unitary change of basis.
fn reflector<T: Real, E: Scalar<T>>(x: &[E], u: &mut [E], offdiag: &mut Vec<T>) -> T {
    if x.is_empty() {
        return T::zero();
    }
    let alpha = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    offdiag.push(alpha);
    if alpha == T::zero() {
        u.iter_mut().for_each(|v| *v = E::zero());
        return T::zero();
    }
    let x1 = x[0];
    let x1_abs = x1.modulus();
    let phase = if x1_abs > T::zero() { x1.scale(T::one() / x1_abs) } else { E::one() };
    u.copy_from_slice(x);
    u[0] = x1 + phase.scale(alpha);
    T::one() / (alpha * (alpha + x1_abs))
}

/// Adds column `j` of a lower-stored Hermitian block times `u` into `p`.
/// `col` holds entries `(j.., j)`.
#[inline]
fn symv_column<T: Real, E: Scalar<T>>(col: &[E], j: usize, u: &[E], p: &mut [E]) {
    let uj = u[j];
    // four partial sums so the reduction can be vectorized
    let mut acc = [E::zero(); 4];
    let (c, pp, uu) = (&col[1..], &mut p[j + 1..], &u[j + 1..]);
    let len = c.len();
    let split = len - len % 4;
    for ((cc, pc), uc) in
        c[..split].chunks_exact(4).zip(pp[..split].chunks_exact_mut(4)).zip(uu[..split].chunks_exact(4))
    {
        for l in 0..4 {
            pc[l] += cc[l] * uj;
            acc[l] += cc[l].conj() * uc[l];
        }
    }
    for i in split..len {
        pp[i] += c[i] * uj;
        acc[0] += c[i].conj() * uu[i];
    }
    let acc = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    p[j] += col[0] * uj + acc;
}

/// `p ← τp`, then `q = p - (τ/2)(u* p) u`, in place.
fn finish_q<T: Real, E: Scalar<T>>(u: &[E], p: &mut [E], tau: T) {
    p.iter_mut().for_each(|v| *v = v.scale(tau));
    let upk: E = u.iter().zip(p.iter()).map(|(a, b)| a.conj() * *b).sum();
    let kappa = upk.re() * tau * T::lit(0.5);
    for (pi, ui) in p.iter_mut().zip(u.iter()) {
        *pi -= ui.scale(kappa);
    }
}

/// `col -= u q₀* + q u₀*` where `u`, `q` start at the column's diagonal.
#[inline]
fn rank2_update<T: Real, E: Scalar<T>>(col: &mut [E], u: &[E], q: &[E]) {
    let qj = q[0].conj();
    let uj = u[0].conj();
    for ((c, ui), qi) in col.iter_mut().zip(u).zip(q) {
        *c -= *ui * qj + *qi * uj;
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues<T: Real, E: Scalar<T>>(a: &Matrix<E>) -> Result<Vec<T>> {
    tridiagonalize(a)?.eigenvalues()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn two_by_two_offdiagonal() {
        let t = Tridiagonal::new(vec![0.0, 0.0], vec![1.0]).unwrap();
        let ev: Vec<f64> = t.eigenvalues().unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
        assert_eq!(t.count_below(0.0), 1);
    }

    #[test]
    fn laplacian_closed_form() {
        // tridiag(-1, 2, -1): λ_k = 2 - 2cos(kπ/(n+1))
        let n = 50;
        let t = Tridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        let ev = t.eigenvalues().unwrap();
        for (k, v) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-11);
        }
    }

    #[test]
    fn complex_hermitian_matches_known_spectrum() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let a = Matrix::from_vec(
            2,
            2,
            vec![Complex::new(2.0, 0.0), Complex::new(0.0, 1.0), Complex::new(0.0, -1.0), Complex::new(2.0, 0.0)],
        )
        .unwrap();
        let ev: Vec<f64> = hermitian_eigenvalues(&a).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        let t = Tridiagonal::new(vec![f64::NAN, 1.0], vec![0.5]).unwrap();
        assert!(t.eigenvalues().is_err());
        assert!(Tridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
    }

    #[test]
    fn zero_and_empty() {
        assert!(Tridiagonal::<f64>::new(vec![], vec![]).unwrap().eigenvalues().unwrap().is_empty());
        assert_eq!(Tridiagonal::new(vec![0.0; 3], vec![0.0; 2]).unwrap().eigenvalues().unwrap(), vec![0.0; 3]);
    }
}
