//! Special functions: spherical Bessel functions, `coth`, Hurwitz zeta.

use crate::scalar::Real;
use num_complex::Complex64;

/// Below this argument the power series is used for `j_n(x)/x^m`.
const SERIES_CUTOFF: f64 = 3.0;

/// `j_n(x) / x^m` for `0 ≤ m ≤ n ≤ 4`, stable at `x → 0`.
///
/// Power series below [`SERIES_CUTOFF`], closed trigonometric form above.
pub fn spherical_j_scaled<R: Real>(n: u32, m: u32, x: R) -> R {
    assert!(n <= 4 && m <= n, "spherical_j_scaled supports 0 <= m <= n <= 4");
    let ax = x.abs();
    if ax < R::lit(SERIES_CUTOFF) {
        series(n, m, x)
    } else {
        let (a, b) = trig_coeffs_real(n, x);
        (a * x.sin() + b * x.cos()) / x.powi(m as i32)
    }
}

/// Spherical Bessel function of the first kind `j_n(x)`, `n ≤ 4`.
pub fn spherical_j<R: Real>(n: u32, x: R) -> R {
    spherical_j_scaled(n, 0, x)
}

fn double_factorial_odd(k: u32) -> f64 {
    // (2k+1)!!
    (0..=k).fold(1.0, |acc, i| acc * (2 * i + 1) as f64)
}

fn series<R: Real>(n: u32, m: u32, x: R) -> R {
    // j_n(x) = x^n Σ_k (-x²/2)^k / (k! (2n+2k+1)!!)
    let x2h = -x * x * R::lit(0.5);
    let mut term = R::one() / R::lit(double_factorial_odd(n));
    let mut sum = term;
    let eps = R::epsilon();
    for k in 1..60u32 {
        term = term * x2h / (R::lit(k as f64) * R::lit((2 * n + 2 * k + 1) as f64));
        sum = sum + term;
        if term.abs() <= eps * sum.abs() {
            break;
        }
    }
    sum * x.powi((n - m) as i32)
}

fn trig_coeffs_real<R: Real>(n: u32, x: R) -> (R, R) {
    let inv = R::one() / x;
    let c = |v: f64| R::lit(v);
    match n {
        0 => (inv, R::zero()),
        1 => (inv * inv, -inv),
        2 => (c(3.0) * inv.powi(3) - inv, -c(3.0) * inv.powi(2)),
        3 => (
            c(15.0) * inv.powi(4) - c(6.0) * inv.powi(2),
            -(c(15.0) * inv.powi(3) - inv),
        ),
        4 => (
            c(105.0) * inv.powi(5) - c(45.0) * inv.powi(3) + inv,
            -(c(105.0) * inv.powi(4) - c(10.0) * inv.powi(2)),
        ),
        _ => unreachable!(),
    }
}

/// Coefficients `(A, B)` with `j_n(y) = A(y) sin y + B(y) cos y`, valid for
/// complex `y ≠ 0`.
pub fn spherical_j_trig_coeffs(n: u32, y: Complex64) -> (Complex64, Complex64) {
    let inv = 1.0 / y;
    match n {
        0 => (inv, Complex64::new(0.0, 0.0)),
        1 => (inv * inv, -inv),
        2 => (3.0 * inv.powi(3) - inv, -3.0 * inv.powi(2)),
        3 => (
            15.0 * inv.powi(4) - 6.0 * inv.powi(2),
            -(15.0 * inv.powi(3) - inv),
        ),
        4 => (
            105.0 * inv.powi(5) - 45.0 * inv.powi(3) + inv,
            -(105.0 * inv.powi(4) - 10.0 * inv.powi(2)),
        ),
        _ => panic!("spherical_j_trig_coeffs supports n <= 4"),
    }
}

/// Splits `j_n(y)/y^m` into `P(y)e^{iy} + M(y)e^{-iy}`, returning `(P, M)`.
pub fn spherical_j_exp_parts(n: u32, m: u32, y: Complex64) -> (Complex64, Complex64) {
    let (a, b) = spherical_j_trig_coeffs(n, y);
    let scale = y.powi(-(m as i32));
    let two_i = Complex64::new(0.0, 2.0);
    let plus = (a / two_i + b * 0.5) * scale;
    let minus = (-a / two_i + b * 0.5) * scale;
    (plus, minus)
}

/// `coth(x)` with the small-argument series to avoid `1/(e^{2x}-1)`
/// cancellation.
pub fn coth<R: Real>(x: R) -> R {
    let ax = x.abs();
    if ax < R::lit(1e-4) {
        let x2 = x * x;
        R::one() / x + x / R::lit(3.0) - x * x2 / R::lit(45.0)
    } else if ax > R::lit(40.0) {
        x.signum()
    } else {
        R::one() / x.tanh()
    }
}

/// Hurwitz zeta `ζ(4, q) = Σ_{n≥0} (n+q)^{-4}` for `q > 0`.
///
/// Direct summation of the first terms, Euler–Maclaurin for the tail.
pub fn hurwitz_zeta4(q: f64) -> f64 {
    assert!(q > 0.0, "hurwitz_zeta4 needs q > 0");
    const M: usize = 12;
    let mut sum = 0.0;
    for n in 0..M {
        sum += (n as f64 + q).powi(-4);
    }
    let a = M as f64 + q;
    // ∫_a^∞ x^-4 dx + f(a)/2 + Σ B_2k/(2k)! · (-f^{(2k-1)}(a))
    let mut tail = a.powi(-3) / 3.0 + 0.5 * a.powi(-4);
    // B2=1/6, B4=-1/30, B6=1/42, B8=-1/30 ; -f^{(2k-1)}(a) = (4)_(2k-1) a^{-3-2k}
    let bern = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0];
    let mut fact = 1.0; // (2k)!
    let mut rising = 1.0; // 4·5·…·(4+2k-2)
    for (k, b) in bern.iter().enumerate() {
        let kk = k + 1;
        fact *= ((2 * kk - 1) * (2 * kk)) as f64;
        if kk == 1 {
            rising = 4.0;
        } else {
            rising *= ((4 + 2 * kk - 3) * (4 + 2 * kk - 2)) as f64;
        }
        tail += b / fact * rising * a.powi(-3 - 2 * kk as i32);
    }
    sum + tail
}
