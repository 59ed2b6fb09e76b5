//! Comparisons against independent reference computations.

use bergspec::assembly::assemble_toeplitz;
use bergspec::eigen::{hermitian_eigenvalues, Tridiagonal};
use bergspec::matrix::Matrix;
use bergspec::moments::{moment_quadrature, power_weight_moment};
use bergspec::spectra::singular_values;
use bergspec::symbol::{AngularFactor, GammaExponent, RadialProfile, RadialWeight, SeparableSymbol};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn weight(gamma: f64, profile: RadialProfile<f64>) -> RadialWeight<f64> {
    RadialWeight::new(GammaExponent::new(gamma).unwrap(), profile)
}

// Reference values of ∫₀¹ r^p (1 + log(1/(1-r)))^{-γ} g(r) dr computed with
// 30-digit tanh-sinh quadrature directly in r.
const FROZEN: &[(f64, u64, f64)] = &[
    (1.0, 0, 0.596_347_362_323_194_074_34),
    (1.0, 1, 0.235_018_745_434_971_489_64),
    (1.0, 10, 0.024_635_875_922_135_832_455),
    (1.0, 100, 0.001_659_691_453_490_741_033_7),
    (1.0, 10_000, 9.389_548_229_358_146_733_4e-6),
    (1.0, 1_000_000, 6.538_733_689_591_696_867_1e-8),
    (0.5, 0, 0.757_872_156_141_312_106_04),
    (0.5, 1, 0.336_502_926_853_257_632_82),
    (0.5, 10, 0.046_839_942_772_884_816_76),
    (0.5, 100, 0.004_035_282_324_871_168_782_6),
    (2.0, 0, 0.403_652_637_676_805_925_66),
    (2.0, 1, 0.126_309_871_453_251_095_05),
    (2.0, 10, 0.007_226_563_212_833_760_959),
    (2.0, 100, 0.000_288_111_801_097_408_922_98),
];

#[test]
fn moments_match_frozen_references() {
    for &(gamma, p, want) in FROZEN {
        let got = moment_quadrature(p, &weight(gamma, RadialProfile::Unit)).unwrap();
        assert!(got.converged);
        let rel = ((got.value - want) / want).abs();
        assert!(rel < 1e-11, "gamma={gamma} p={p}: {} vs {want} (rel {rel:e})", got.value);
    }
}

#[test]
fn gompertz_constant() {
    let got = moment_quadrature(0, &weight(1.0, RadialProfile::Unit)).unwrap().value;
    assert!((got - 0.596_347_362_323_194_074_341).abs() < 1e-13);
}

#[test]
fn inverse_one_plus_r_profile() {
    let got = moment_quadrature(10, &weight(1.0, RadialProfile::InverseOnePlusR)).unwrap().value;
    assert!(((got - 0.013_027_022_958_738_983_812) / got).abs() < 1e-11);
}

#[test]
fn beta_moments_closed_form() {
    // 2(n+1) B(2n+2, 2) = 1/(2n+3); log-gamma differences lose ~log(n) digits
    for n in [0u64, 5, 1000, 100_000] {
        let got = power_weight_moment(n, 1.0f64).unwrap();
        assert!((got * (2 * n + 3) as f64 - 1.0).abs() < 1e-8);
    }
}

/// `(T e_n, e_m) = (1/π) ∫_𝔻 φ(z) e_n(z) conj(e_m(z)) dA`, `e_n = √(n+1) zⁿ`,
/// by a tensor rule: trapezoid in θ and composite Simpson in `t` with
/// `r = 1 - (1-t)³` to resolve the boundary.
fn entry_by_area_quadrature(sym: &SeparableSymbol<f64>, m: usize, n: usize) -> Complex<f64> {
    let (nt, nr) = (256usize, 20_000usize);
    let mut angular = Complex::new(0.0, 0.0);
    for k in 0..nt {
        let th = std::f64::consts::TAU * k as f64 / nt as f64;
        let phase = Complex::from_polar(1.0, (n as f64 - m as f64) * th);
        angular += sym.angular.eval(th) * phase;
    }
    angular *= std::f64::consts::TAU / nt as f64;
    let h = 1.0 / nr as f64;
    let radial = |t: f64| {
        let r = 1.0 - (1.0 - t).powi(3);
        let jac = 3.0 * (1.0 - t).powi(2);
        if r >= 1.0 {
            return 0.0;
        }
        r.powi((m + n + 1) as i32) * sym.radial.eval(r).unwrap() * jac
    };
    let mut s = radial(0.0) + radial(1.0);
    for i in 1..nr {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * radial(i as f64 * h);
    }
    let radial_integral = s * h / 3.0;
    angular * (((m + 1) * (n + 1)) as f64).sqrt() * radial_integral / std::f64::consts::PI
}

#[test]
fn entries_match_area_quadrature() {
    let g = GammaExponent::new(1.0).unwrap();
    let symbols = [
        SeparableSymbol::new(AngularFactor::trig_real(&[0.5, 2.0, 0.5]).unwrap(), RadialWeight::pure(g)),
        SeparableSymbol::new(
            AngularFactor::trig(vec![Complex::new(0.0, 0.3), Complex::new(1.0, 0.0), Complex::new(0.2, -0.1)]).unwrap(),
            RadialWeight::new(GammaExponent::new(0.5).unwrap(), RadialProfile::InverseOnePlusR),
        ),
    ];
    for sym in &symbols {
        let t = assemble_toeplitz(sym, 6).unwrap();
        for m in 0..6 {
            for n in 0..6 {
                let want = entry_by_area_quadrature(sym, m, n);
                let got = t.matrix[(m, n)];
                assert!((got - want).norm() < 1e-8, "({m},{n}): {got} vs {want}");
            }
        }
    }
}

/// Characteristic polynomial coefficients by Faddeev-LeVerrier; roots by
/// scanning for sign changes and bisecting.
fn charpoly_eigenvalues(a: &[[f64; 6]; 6]) -> Vec<f64> {
    let n = 6;
    let mul = |x: &[[f64; 6]; 6], y: &[[f64; 6]; 6]| {
        let mut z = [[0.0; 6]; 6];
        for i in 0..n {
            for j in 0..n {
                z[i][j] = (0..n).map(|k| x[i][k] * y[k][j]).sum();
            }
        }
        z
    };
    let mut coeffs = vec![1.0];
    let mut mk = [[0.0; 6]; 6];
    for k in 1..=n {
        let mut am = mul(a, &mk);
        let c_prev = coeffs[k - 1];
        for (i, row) in am.iter_mut().enumerate() {
            row[i] += c_prev;
        }
        mk = am;
        let amk = mul(a, &mk);
        let tr: f64 = (0..n).map(|i| amk[i][i]).sum();
        coeffs.push(-tr / k as f64);
    }
    let p = |x: f64| coeffs.iter().fold(0.0, |acc, c| acc * x + c);
    let bound = 1.0 + a.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let steps = 200_000;
    let mut roots = Vec::new();
    let mut x0 = -bound;
    let mut p0 = p(x0);
    for i in 1..=steps {
        let x1 = -bound + 2.0 * bound * i as f64 / steps as f64;
        let p1 = p(x1);
        if p0 == 0.0 || p0.signum() != p1.signum() {
            let (mut lo, mut hi) = (x0, x1);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if p(lo).signum() == p(mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        p0 = p1;
    }
    roots
}

#[test]
fn six_by_six_against_characteristic_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let mut a = [[0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..1.0);
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        let want = charpoly_eigenvalues(&a);
        assert_eq!(want.len(), 6);
        let got = hermitian_eigenvalues::<f64, f64>(&Matrix::from_fn(6, 6, |i, j| a[i][j])).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-9, "{got:?} vs {want:?}");
        }
    }
}

/// Cyclic Jacobi rotations until the off-diagonal mass vanishes.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

#[test]
fn sixteen_by_sixteen_against_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let n = 16;
    let mut dense = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = rng.gen_range(-1.0..1.0);
            dense[i][j] = v;
            dense[j][i] = v;
        }
    }
    let want = jacobi_eigenvalues(dense.clone());
    let got = hermitian_eigenvalues::<f64, f64>(&Matrix::from_fn(n, n, |i, j| dense[i][j])).unwrap();
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-10);
    }

    // Jacobi (tridiagonal) matrix with log-decaying entries.
    let diag: Vec<f64> = (0..n).map(|i| 2.0 / ((i + 2) as f64).ln()).collect();
    let off: Vec<f64> = (0..n - 1).map(|i| 1.0 / ((i + 2) as f64).ln()).collect();
    let mut tri = vec![vec![0.0; n]; n];
    for i in 0..n {
        tri[i][i] = diag[i];
        if i + 1 < n {
            tri[i][i + 1] = off[i];
            tri[i + 1][i] = off[i];
        }
    }
    let want = jacobi_eigenvalues(tri);
    let got = Tridiagonal::new(diag, off).unwrap().eigenvalues().unwrap();
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-10);
    }
}

#[test]
fn singular_values_against_jacobi_on_gram() {
    // s_n(A)² are the eigenvalues of A*A; for a well-conditioned A the Gram
    // route is an adequate oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 10;
    let a = Matrix::from_fn(n, n, |_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let gram = a.adjoint().matmul(&a).unwrap();
    // Real symmetric embedding [[Re, -Im], [Im, Re]] doubles every eigenvalue.
    let mut emb = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = gram[(i, j)];
            emb[i][j] = z.re;
            emb[i + n][j + n] = z.re;
            emb[i][j + n] = -z.im;
            emb[i + n][j] = z.im;
        }
    }
    let ev = jacobi_eigenvalues(emb);
    let mut want: Vec<f64> = ev.iter().step_by(2).map(|v| v.max(0.0).sqrt()).collect();
    want.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let got = singular_values(&a).unwrap();
    for (k, w) in want.iter().enumerate() {
        assert!((got.s(k + 1) - w).abs() < 1e-10);
    }
}
