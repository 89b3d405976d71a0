//! Adaptive Gauss–Kronrod (7/15) quadrature.

#![allow(clippy::excessive_precision)]

use crate::error::{DecoError, Result};
use crate::scalar::Real;
use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_3,
    0.949_107_912_342_758_524_526_189_684_047_9,
    0.864_864_423_359_769_072_789_712_788_640_9,
    0.741_531_185_599_394_439_863_864_773_280_8,
    0.586_087_235_467_691_130_294_144_845_693_0,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_2,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_5,
    0.140_653_259_715_525_918_745_189_590_510_2,
    0.169_004_726_639_267_902_826_583_426_598_6,
    0.190_350_578_064_785_409_913_256_402_421_0,
    0.204_432_940_075_298_892_414_161_999_234_6,
    0.209_482_141_084_727_828_012_999_174_891_7,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_1,
    0.279_705_391_489_276_667_901_467_771_423_8,
    0.381_830_050_505_118_944_950_369_775_489_0,
    0.417_959_183_673_469_387_755_102_040_816_3,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad<R> {
    pub value: R,
    pub abs_error: R,
    pub evaluations: usize,
}

/// Tolerances and refinement cap.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<R> {
    pub rel_tol: R,
    pub abs_tol: R,
    pub max_intervals: usize,
}

impl<R: Real> Default for QuadOptions<R> {
    fn default() -> Self {
        QuadOptions {
            rel_tol: R::lit(1e-10),
            abs_tol: R::zero(),
            max_intervals: 4000,
        }
    }
}

struct Segment<R> {
    a: R,
    b: R,
    value: R,
    error: R,
}

fn kronrod<R: Real, F: FnMut(R) -> R>(f: &mut F, a: R, b: R) -> (R, R) {
    let half = R::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut res_k = fc * R::lit(WGK[7]);
    let mut res_g = fc * R::lit(WG[3]);
    for j in 0..7 {
        let dx = half_len * R::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        res_k = res_k + R::lit(WGK[j]) * (f1 + f2);
        if j % 2 == 1 {
            res_g = res_g + R::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let value = res_k * half_len;
    let err = ((res_k - res_g) * half_len).abs();
    (value, err)
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// Bisects the segment with the largest error estimate until the global
/// estimate meets `max(abs_tol, rel_tol·|I|)`. Returns a numeric error if
/// the refinement cap is reached first.
pub fn integrate<R: Real, F: FnMut(R) -> R>(
    mut f: F,
    a: R,
    b: R,
    opts: QuadOptions<R>,
) -> Result<Quad<R>> {
    if a == b {
        return Ok(Quad {
            value: R::zero(),
            abs_error: R::zero(),
            evaluations: 0,
        });
    }
    let (v0, e0) = kronrod(&mut f, a, b);
    let mut segs = vec![Segment {
        a,
        b,
        value: v0,
        error: e0,
    }];
    let mut evals = 15;
    loop {
        let total: R = segs.iter().fold(R::zero(), |s, g| s + g.value);
        let err: R = segs.iter().fold(R::zero(), |s, g| s + g.error);
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if !total.is_finite() {
            return Err(DecoError::Numeric(format!(
                "quadrature produced non-finite value on [{a}, {b}]"
            )));
        }
        if err <= target {
            return Ok(Quad {
                value: total,
                abs_error: err,
                evaluations: evals,
            });
        }
        if segs.len() >= opts.max_intervals {
            return Err(DecoError::Numeric(format!(
                "quadrature did not converge on [{a}, {b}]: estimate {total}, error {err}, \
                 target {target} after {} intervals",
                segs.len()
            )));
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .fold((0, R::neg_infinity()), |(bi, be), (i, s)| {
                if s.error > be {
                    (i, s.error)
                } else {
                    (bi, be)
                }
            });
        let s = segs.swap_remove(idx);
        let mid = R::lit(0.5) * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            return Err(DecoError::Numeric(format!(
                "quadrature interval collapsed near {mid}"
            )));
        }
        let (v1, e1) = kronrod(&mut f, s.a, mid);
        let (v2, e2) = kronrod(&mut f, mid, s.b);
        evals += 30;
        segs.push(Segment {
            a: s.a,
            b: mid,
            value: v1,
            error: e1,
        });
        segs.push(Segment {
            a: mid,
            b: s.b,
            value: v2,
            error: e2,
        });
    }
}

/// Integrates `f` over `[a, ∞)` through the map `x = a + scale·t/(1-t)`.
///
/// `scale` should be the length over which the integrand decays.
pub fn integrate_semi_infinite<R: Real, F: FnMut(R) -> R>(
    mut f: F,
    a: R,
    scale: R,
    opts: QuadOptions<R>,
) -> Result<Quad<R>> {
    let one = R::one();
    integrate(
        |t: R| {
            let u = one - t;
            let x = a + scale * t / u;
            let jac = scale / (u * u);
            let v = f(x) * jac;
            if v.is_finite() {
                v
            } else {
                R::zero()
            }
        },
        R::zero(),
        one,
        opts,
    )
}

/// Complex integrand over a finite real parameter interval; real and
/// imaginary parts are refined independently.
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: QuadOptions<f64>,
) -> Result<(Complex64, f64)> {
    let scale = integrate(
        |t| f(t).norm(),
        a,
        b,
        QuadOptions {
            rel_tol: 1e-3,
            ..opts
        },
    )?;
    let parts = QuadOptions {
        abs_tol: opts.abs_tol.max(opts.rel_tol * scale.value),
        ..opts
    };
    let re = integrate(|t| f(t).re, a, b, parts)?;
    let im = integrate(|t| f(t).im, a, b, parts)?;
    Ok((
        Complex64::new(re.value, im.value),
        re.abs_error + im.abs_error,
    ))
}

/// Laplace-type integral `∫₀^∞ g(y) e^{-s y} dy` of an oscillatory entire
/// function written away from the origin as `g(y) = P(y)e^{iy} + M(y)e^{-iy}`.
///
/// The segment `[0, y0]` is integrated on the real axis with `g`. Beyond
/// `y0` each exponential part is carried along the ray on which its phase
/// factor becomes a pure decay, `y = y0 + r/(s ∓ i)`, which removes the
/// oscillation and the cancellation it causes for small `s`.
pub fn oscillatory_laplace<G, P, M>(
    g: G,
    plus: P,
    minus: M,
    s: f64,
    y0: f64,
    opts: QuadOptions<f64>,
) -> Result<Quad<f64>>
where
    G: Fn(f64) -> f64,
    P: Fn(Complex64) -> Complex64,
    M: Fn(Complex64) -> Complex64,
{
    let head = integrate(|y| g(y) * (-s * y).exp(), 0.0, y0, opts)?;
    let i = Complex64::i();
    let dir_p = 1.0 / (Complex64::new(s, 0.0) - i);
    let dir_m = 1.0 / (Complex64::new(s, 0.0) + i);
    let phase_p = ((i - s) * y0).exp();
    let phase_m = ((-i - s) * y0).exp();
    let tail_p = |r: f64| plus(y0 + r * dir_p) * (-r).exp();
    let tail_m = |r: f64| minus(y0 + r * dir_m) * (-r).exp();
    let map = |t: f64| (t / (1.0 - t), 1.0 / ((1.0 - t) * (1.0 - t)));
    let (tp, ep) = integrate_complex(
        |t| {
            let (r, j) = map(t);
            let v = tail_p(r) * j;
            if v.re.is_finite() && v.im.is_finite() {
                v
            } else {
                Complex64::new(0.0, 0.0)
            }
        },
        0.0,
        1.0,
        opts,
    )?;
    let (tm, em) = integrate_complex(
        |t| {
            let (r, j) = map(t);
            let v = tail_m(r) * j;
            if v.re.is_finite() && v.im.is_finite() {
                v
            } else {
                Complex64::new(0.0, 0.0)
            }
        },
        0.0,
        1.0,
        opts,
    )?;
    let tail = phase_p * dir_p * tp + phase_m * dir_m * tm;
    Ok(Quad {
        value: head.value + tail.re,
        abs_error: head.abs_error + (ep + em) * phase_p.norm() * dir_p.norm(),
        evaluations: head.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x: f64| x * x * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert!((q.value - 4.0).abs() < 1e-13);
    }

    #[test]
    fn gamma_moments_semi_infinite() {
        // ∫ u^n e^{-u} = n!
        for (n, fact) in [(0, 1.0), (3, 6.0), (5, 120.0)] {
            let q = integrate_semi_infinite(
                |u: f64| u.powi(n) * (-u).exp(),
                0.0,
                1.0,
                QuadOptions::default(),
            )
            .unwrap();
            assert!((q.value / fact - 1.0).abs() < 1e-10, "n={n}: {}", q.value);
        }
    }

    #[test]
    fn works_in_f32() {
        let q = integrate(
            |x: f32| x.sin(),
            0.0,
            std::f32::consts::PI,
            QuadOptions {
                rel_tol: 1e-5,
                abs_tol: 0.0,
                max_intervals: 100,
            },
        )
        .unwrap();
        assert!((q.value - 2.0).abs() < 1e-4);
    }

    #[test]
    fn oscillatory_laplace_matches_transform_of_sine() {
        // ∫ y e^{-sy} sin y dy = 2s/(1+s²)²; small s is the hard regime.
        for s in [1e-4, 1e-2, 0.5] {
            let q = oscillatory_laplace(
                |y| y * y.sin(),
                |y| y / (2.0 * Complex64::i()),
                |y| -y / (2.0 * Complex64::i()),
                s,
                2.0,
                QuadOptions::default(),
            )
            .unwrap();
            let exact = 2.0 * s / (1.0 + s * s).powi(2);
            assert!((q.value / exact - 1.0).abs() < 1e-8, "s={s}: {} vs {exact}", q.value);
        }
    }

    #[test]
    fn cap_reports_numeric_error() {
        let r = integrate(
            |x: f64| (1.0 / x).sin(),
            1e-9,
            1.0,
            QuadOptions {
                rel_tol: 1e-14,
                abs_tol: 0.0,
                max_intervals: 10,
            },
        );
        assert!(matches!(r, Err(DecoError::Numeric(_))));
    }
}
