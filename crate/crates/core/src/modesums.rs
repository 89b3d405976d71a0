//! Bath-mode sums in the continuum limit.
//!
//! Radiative sums are written as
//! `P ω_c⁴ ∫₀^∞ u³ e^{−u} coth(u a/2) Φ(u x) du`, with `P = Γ/(2πω₀³)`,
//! `x = ω_c d/c`, `a = ħω_c/k_BT` and `Φ` the polarization-summed angular
//! average of the coupling pattern normalized to `Φ(0) = 1` for the bare
//! dipole. Angular functions are linear combinations of `j_n(y)/y^m`.

use crate::constants::PhysicalConstants;
use crate::error::{DecoError, Result};
use crate::model::{CouplingProfile, Model};
use crate::numerics::quadrature::{integrate_semi_infinite, oscillatory_laplace, QuadOptions};
use crate::numerics::specfun::{hurwitz_zeta4, spherical_j_exp_parts, spherical_j_scaled};
use crate::vec3::{self, Vec3};
use crate::vibrations::ModeSet;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Relative tolerance of radial quadratures.
pub const RADIAL_REL_TOL: f64 = 1e-11;
/// Above this `x = ω_c τ` the radial integral is taken on rotated contours.
pub const OSCILLATORY_SWITCH: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumMethod {
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSumResult {
    /// 1/s²
    pub value: f64,
    pub method: SumMethod,
    pub est_abs_error: f64,
}

/// Planck occupation `1/(e^{ħω/k_BT} − 1)`; exactly 0 at `T = 0`.
pub fn thermal_occupation(omega: f64, temperature: f64, k: &PhysicalConstants) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(DecoError::Misuse(format!(
            "thermal occupation needs ω > 0, got {omega}"
        )));
    }
    if temperature < 0.0 {
        return Err(DecoError::Misuse(format!("negative temperature {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (k.hbar * omega / (k.kb * temperature)).exp_m1())
}

/// `2n̄ + 1` for a mode of frequency `omega`.
pub fn thermal_weight(omega: f64, temperature: f64, k: &PhysicalConstants) -> Result<f64> {
    Ok(2.0 * thermal_occupation(omega, temperature, k)? + 1.0)
}

/// `Γ/(2πω₀³)`, the continuum density factor of `Σ_k |g_k|²`.
pub fn se_prefactor(model: &Model) -> f64 {
    model.gamma_se() / (2.0 * std::f64::consts::PI * model.qubits.omega0.powi(3))
}

/// `Σ c · j_n(y)/y^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularFn {
    pub terms: Vec<(f64, u32, u32)>,
}

impl AngularFn {
    pub fn eval(&self, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, n, m)| c * spherical_j_scaled(n, m, y))
            .sum()
    }

    pub fn at_origin(&self) -> f64 {
        self.eval(0.0)
    }

    /// `y³Φ(y)` split as `P(y)e^{iy} + M(y)e^{−iy}`.
    fn cubed_parts(&self, y: Complex64) -> (Complex64, Complex64) {
        let y3 = y * y * y;
        let mut p = Complex64::new(0.0, 0.0);
        let mut q = Complex64::new(0.0, 0.0);
        for &(c, n, m) in &self.terms {
            let (a, b) = spherical_j_exp_parts(n, m, y);
            p += c * a;
            q += c * b;
        }
        (p * y3, q * y3)
    }
}

/// Normalized dipole pattern for the bare SE coupling:
/// `Φ = (3/2)[j₀ − j₁/y + cos²θ j₂]`.
pub fn angular_se(cos2theta: f64) -> AngularFn {
    AngularFn {
        terms: vec![(1.5, 0, 0), (-1.5, 1, 1), (1.5 * cos2theta, 2, 0)],
    }
}

/// Normalized pattern for the recoil-weighted coupling `(k̂·Q k̂)`:
/// `(3/2)⟨(1 − (û·k̂)²)(k̂ᵀQk̂) e^{iy k̂·n̂}⟩_Ω` for dipole direction `u`
/// and separation direction `n`.
pub fn angular_tensor(q: &[[f64; 3]; 3], u: Vec3, n: Vec3) -> AngularFn {
    let qv = |a: Vec3, b: Vec3| {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += a[i] * q[i][j] * b[j];
            }
        }
        s
    };
    let tr = q[0][0] + q[1][1] + q[2][2];
    let nqn = qv(n, n);
    let uqu = qv(u, u);
    let un = vec3::dot(u, n);
    let mixed = qv(u, n) + qv(n, u);
    let h = 1.5;
    // ⟨k̂k̂ e⟩ = (j₁/y)δ − j₂ nn ; ⟨k̂k̂k̂k̂ e⟩ = (j₂/y²)[δδ] − (j₃/y)[δnn] + j₄ nnnn
    AngularFn {
        terms: vec![
            (h * tr, 1, 1),
            (-h * nqn, 2, 0),
            (-h * (tr + 2.0 * uqu), 2, 2),
            (h * (nqn + tr * un * un + 2.0 * un * mixed), 3, 1),
            (-h * un * un * nqn, 4, 0),
        ],
    }
}

/// `∫₀^∞ u³ e^{−u} coth(u a/2) Φ(u x) du`; `a = None` is zero temperature.
pub fn radial_integral(phi: &AngularFn, x: f64, a: Option<f64>) -> Result<SpectralSumResult> {
    if !(x >= 0.0) {
        return Err(DecoError::Misuse(format!("radial integral needs x >= 0, got {x}")));
    }
    let opts = QuadOptions {
        rel_tol: RADIAL_REL_TOL,
        abs_tol: 0.0,
        max_intervals: 4000,
    };
    let (zero_t, err0) = if x == 0.0 {
        (6.0 * phi.at_origin(), 0.0)
    } else if x <= OSCILLATORY_SWITCH {
        let q = integrate_semi_infinite(|u| u.powi(3) * (-u).exp() * phi.eval(u * x), 0.0, 1.0, opts)?;
        (q.value, q.abs_error)
    } else {
        let q = oscillatory_laplace(
            |y| y.powi(3) * phi.eval(y),
            |y| phi.cubed_parts(y).0,
            |y| phi.cubed_parts(y).1,
            1.0 / x,
            OSCILLATORY_SWITCH,
            QuadOptions {
                abs_tol: 1e-14,
                ..opts
            },
        )
        .map_err(|e| DecoError::Numeric(format!("oscillatory radial sum at ω_cτ = {x:e}: {e}")))?;
        (q.value / x.powi(4), q.abs_error / x.powi(4))
    };
    let (thermal, err_t) = match a {
        None => (0.0, 0.0),
        Some(a) => {
            if !(a > 0.0) {
                return Err(DecoError::Misuse(format!("thermal parameter must be positive, got {a}")));
            }
            // scale of the occupation factor; absolute floor from the diagonal thermal part
            let scale = (1.0 / a).min(1.0);
            let diag_thermal = 12.0 * hurwitz_zeta4(1.0 + 1.0 / a) / a.powi(4);
            let q = integrate_semi_infinite(
                |u| {
                    if u == 0.0 {
                        return 0.0;
                    }
                    let nbar = 1.0 / (a * u).exp_m1();
                    u.powi(3) * (-u).exp() * 2.0 * nbar * phi.eval(u * x)
                },
                0.0,
                scale,
                QuadOptions {
                    rel_tol: RADIAL_REL_TOL,
                    abs_tol: 1e-12 * diag_thermal.abs() * phi.at_origin().abs().max(1e-300),
                    max_intervals: 40_000,
                },
            )?;
            (q.value, q.abs_error)
        }
    };
    Ok(SpectralSumResult {
        value: zero_t + thermal,
        method: SumMethod::Quadrature,
        est_abs_error: err0 + err_t,
    })
}

fn thermal_parameter(model: &Model, temperature: f64) -> Option<f64> {
    (temperature > 0.0).then(|| {
        let k = &model.constants;
        k.hbar * model.se_bath.cutoff_omega_c / (k.kb * temperature)
    })
}

fn scale_sum(model: &Model, r: SpectralSumResult) -> SpectralSumResult {
    let s = se_prefactor(model) * model.se_bath.cutoff_omega_c.powi(4);
    SpectralSumResult {
        value: r.value * s,
        method: r.method,
        est_abs_error: r.est_abs_error * s,
    }
}

/// `Σ_k |g_k|² coth(ħω_k/2k_BT)` by quadrature.
pub fn se_diagonal_sum(model: &Model, temperature: f64) -> Result<SpectralSumResult> {
    let r = radial_integral(&angular_se(0.0), 0.0, thermal_parameter(model, temperature))?;
    // the x = 0 branch is analytic; force the radial quadrature for the record
    let r = if temperature == 0.0 {
        let q = integrate_semi_infinite(
            |u: f64| u.powi(3) * (-u).exp(),
            0.0,
            1.0,
            QuadOptions {
                rel_tol: RADIAL_REL_TOL,
                ..QuadOptions::default()
            },
        )?;
        SpectralSumResult {
            value: q.value,
            method: SumMethod::Quadrature,
            est_abs_error: q.abs_error,
        }
    } else {
        r
    };
    Ok(scale_sum(model, r))
}

/// Closed form of [`se_diagonal_sum`]:
/// `(3/π)Γω_c(ω_c/ω₀)³ + (6/π)(Γ/ω₀³)(k_BT/ħ)⁴ ζ(4, 1 + k_BT/ħω_c)`.
pub fn se_diagonal_closed_form(model: &Model, temperature: f64) -> SpectralSumResult {
    let p = se_prefactor(model);
    let wc = model.se_bath.cutoff_omega_c;
    let mut v = 6.0 * wc.powi(4);
    if temperature > 0.0 {
        let k = &model.constants;
        let t = k.kb * temperature / k.hbar;
        v += 12.0 * t.powi(4) * hurwitz_zeta4(1.0 + t / wc);
    }
    SpectralSumResult {
        value: p * v,
        method: SumMethod::ClosedForm,
        est_abs_error: p * v * 1e-15,
    }
}

/// `Σ_k |g_k|² cos(k·d) coth(ħω_k/2k_BT)` for separation vector `d`.
pub fn se_cross_sum(model: &Model, d: Vec3, temperature: f64) -> Result<SpectralSumResult> {
    let dist = vec3::norm(d);
    let x = model.se_bath.cutoff_omega_c * dist / model.constants.c;
    let c2 = match vec3::unit(d) {
        Some(n) => vec3::dot(n, model.dipole_unit()).powi(2),
        None => 0.0,
    };
    let r = radial_integral(&angular_se(c2), x, thermal_parameter(model, temperature))?;
    Ok(scale_sum(model, r))
}

/// [`se_cross_sum`] between two sites of the model.
pub fn se_cross_sum_sites(model: &Model, i: usize, j: usize, temperature: f64) -> Result<SpectralSumResult> {
    se_cross_sum(model, model.separation(i, j), temperature)
}

/// `F(x, cos²θ)`: zero-temperature cross sum over diagonal sum.
pub fn extract_f(x: f64, cos2theta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&cos2theta) {
        return Err(DecoError::Misuse(format!("cos²θ = {cos2theta} outside [0, 1]")));
    }
    Ok(radial_integral(&angular_se(cos2theta), x, None)?.value / 6.0)
}

/// Closed form of `F` with `s = 1/x`:
/// `(s⁴/4)[(1−c²)(6s²−2)/(1+s²)³ + 2(3c²−1)/(1+s²)²]`.
pub fn f_closed_form(x: f64, cos2theta: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    // written in x to stay finite as x → 0
    let x2 = x * x;
    let d = 1.0 + x2;
    let c2 = cos2theta;
    0.25 * ((1.0 - c2) * (6.0 - 2.0 * x2) / d.powi(3) + 2.0 * (3.0 * c2 - 1.0) / d.powi(2))
}

/// Moments of the cavity-decay bath operator `D = Σ_k (u_k b_k + w_k b_k†)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DecayMoments {
    /// `Σ u_k w_k (2m̄+1)` = `⟨DD⟩` = `⟨D†D†⟩` for real couplings.
    pub dd: f64,
    /// `Σ |u|²(m̄+1)`, `Σ |w|² m̄`: the two parts of `⟨DD†⟩`.
    pub ddag_u: f64,
    pub ddag_w: f64,
    /// `Σ |u|² m̄`, `Σ |w|²(m̄+1)`: the two parts of `⟨D†D⟩`.
    pub dagd_u: f64,
    pub dagd_w: f64,
}

impl DecayMoments {
    pub fn d_ddag(&self) -> f64 {
        self.ddag_u + self.ddag_w
    }

    pub fn ddag_d(&self) -> f64 {
        self.dagd_u + self.dagd_w
    }

    pub fn is_zero(&self) -> bool {
        self.dd == 0.0 && self.d_ddag() == 0.0 && self.ddag_d() == 0.0
    }
}

/// `ρ ∫ dξ A_a A_b (ξ/ξ_c)^{p_a+p_b} e^{−ξ/ξ_c} f(ξ)`.
fn profile_integral(
    model: &Model,
    a: &CouplingProfile,
    b: &CouplingProfile,
    weight: impl Fn(f64) -> f64,
) -> Result<f64> {
    let amp = a.amplitude() * b.amplitude();
    if amp == 0.0 {
        return Ok(0.0);
    }
    let xc = model.cavity_decay.cutoff_xi_c;
    let p = a.power() + b.power();
    if p <= -1.0 {
        return Err(DecoError::Numeric(format!(
            "cavity-decay profile with exponent {p} is not integrable"
        )));
    }
    let q = integrate_semi_infinite(
        |t: f64| {
            if t == 0.0 && p <= 0.0 {
                return 0.0;
            }
            t.powf(p) * (-t).exp() * weight(t * xc)
        },
        0.0,
        1.0,
        QuadOptions {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_intervals: 20_000,
        },
    )?;
    Ok(model.cavity_decay.mode_density * amp * xc * q.value)
}

/// Thermal moments of the cavity-decay bath.
pub fn cavity_decay_moments(model: &Model, temperature: f64) -> Result<DecayMoments> {
    let cd = &model.cavity_decay;
    let k = model.constants;
    if temperature > 0.0 {
        for (name, prof, other) in [("u", &cd.u, &cd.w), ("w", &cd.w, &cd.u)] {
            // n̄ ~ k_BT/ħξ near ξ = 0
            if !prof.is_zero() && 2.0 * prof.power() <= 0.0 {
                return Err(DecoError::Numeric(format!(
                    "cavity_decay.{name} profile is not integrable against the thermal occupation \
                     (power must be > 0 at T > 0)"
                )));
            }
            if !prof.is_zero() && !other.is_zero() && prof.power() + other.power() <= 0.0 {
                return Err(DecoError::Numeric(
                    "cavity-decay u·w product is not integrable against the thermal occupation".into(),
                ));
            }
        }
    }
    let nbar = |xi: f64| {
        if temperature == 0.0 || xi == 0.0 {
            0.0
        } else {
            1.0 / (k.hbar * xi / (k.kb * temperature)).exp_m1()
        }
    };
    let uu = |w: &dyn Fn(f64) -> f64| profile_integral(model, &cd.u, &cd.u, w);
    let ww = |w: &dyn Fn(f64) -> f64| profile_integral(model, &cd.w, &cd.w, w);
    Ok(DecayMoments {
        dd: profile_integral(model, &cd.u, &cd.w, |xi| 2.0 * nbar(xi) + 1.0)?,
        ddag_u: uu(&|xi| nbar(xi) + 1.0)?,
        ddag_w: ww(&|xi| nbar(xi))?,
        dagd_u: uu(&|xi| nbar(xi))?,
        dagd_w: ww(&|xi| nbar(xi) + 1.0)?,
    })
}

/// `L = Σ_k |w_k|²`.
pub fn cavity_decay_sum(model: &Model) -> Result<SpectralSumResult> {
    let cd = &model.cavity_decay;
    match cd.w {
        CouplingProfile::Zero => Ok(SpectralSumResult {
            value: 0.0,
            method: SumMethod::ClosedForm,
            est_abs_error: 0.0,
        }),
        CouplingProfile::Flat { amplitude } => Ok(SpectralSumResult {
            value: amplitude * amplitude * cd.mode_density * cd.cutoff_xi_c,
            method: SumMethod::ClosedForm,
            est_abs_error: 0.0,
        }),
        CouplingProfile::Power { .. } => {
            let v = profile_integral(model, &cd.w, &cd.w, |_| 1.0)?;
            Ok(SpectralSumResult {
                value: v,
                method: SumMethod::Quadrature,
                est_abs_error: v * 1e-10,
            })
        }
    }
}

pub type Mat3 = [[f64; 3]; 3];

/// Thermal displacement covariance
/// `Q_ij = Σ_K (ħ/2mν_K)(2N̄_K+1) S_{i;K} S_{j;K}ᵀ`, m².
pub fn displacement_covariance(
    modes: &ModeSet<f64>,
    i: usize,
    j: usize,
    temperature: f64,
    k: &PhysicalConstants,
) -> Result<Mat3> {
    let mut q = [[0.0; 3]; 3];
    match modes {
        ModeSet::Independent { nu, zero_point, .. } => {
            if i == j {
                let v = zero_point * zero_point * thermal_weight(*nu, temperature, k)?;
                for (a, row) in q.iter_mut().enumerate() {
                    row[a] = v;
                }
            }
        }
        ModeSet::Solved(nm) => {
            let t = &nm.transform;
            for kk in 0..nm.frequencies.len() {
                let w = nm.zero_point_lengths[kk].powi(2)
                    * thermal_weight(nm.frequencies[kk], temperature, k)?;
                for a in 0..3 {
                    let sa = t[(3 * i + a, kk)];
                    if sa == 0.0 {
                        continue;
                    }
                    for b in 0..3 {
                        q[a][b] += w * sa * t[(3 * j + b, kk)];
                    }
                }
            }
        }
    }
    Ok(q)
}

pub fn quad_form(a: Vec3, q: &Mat3, b: Vec3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += a[i] * q[i][j] * b[j];
        }
    }
    s
}

/// Cavity Lamb-Dicke coupling amplitude of site `i`, `p_K^i = α_i c_K^i(k_b)`
/// with `α_i = √(ω_b/2ε₀ħV_b)(d₁₀·e_b) e^{ik_b·r_i}`.
pub fn cavity_ld_amplitude(model: &Model, site: usize) -> Complex64 {
    let phase = vec3::dot(model.cavity.wavevector, model.position(site));
    let g = model.cavity_field_factor() * vec3::dot(model.qubits.dipole_d10, model.cavity.polarization);
    Complex64::from_polar(g, phase)
}

/// `K_ij = Σ_K p_K^i p_K^{j*} (2N̄_K+1)`.
pub fn lamb_dicke_cavity_sum_thermal(
    model: &Model,
    modes: &ModeSet<f64>,
    i: usize,
    j: usize,
    temperature: f64,
) -> Result<Complex64> {
    let q = displacement_covariance(modes, i, j, temperature, &model.constants)?;
    let kb = model.cavity.wavevector;
    Ok(cavity_ld_amplitude(model, i) * cavity_ld_amplitude(model, j).conj() * quad_form(kb, &q, kb))
}

/// `K_ij = Σ_K p_K^i p_K^{j*}` (zero temperature).
pub fn lamb_dicke_cavity_sum(model: &Model, modes: &ModeSet<f64>, i: usize, j: usize) -> Result<Complex64> {
    lamb_dicke_cavity_sum_thermal(model, modes, i, j, 0.0)
}

/// Lamb-Dicke part of `G_ij`:
/// `Σ_{kK} [n^i n^{j*}(n̄_k+1) + n^{i*} n^j n̄_k](2N̄_K+1)`.
///
/// The recoil wavevector of SE mode `k` is taken as `|k_b| k̂`, so that the
/// independent-trap diagonal equals `η²Σ_k|g_k|²coth(…)`.
pub fn lamb_dicke_se_sum(
    model: &Model,
    modes: &ModeSet<f64>,
    i: usize,
    j: usize,
    temperature: f64,
) -> Result<SpectralSumResult> {
    let q = displacement_covariance(modes, i, j, temperature, &model.constants)?;
    let k2 = vec3::dot(model.cavity.wavevector, model.cavity.wavevector);
    if k2 == 0.0 || q.iter().flatten().all(|v| *v == 0.0) {
        return Ok(SpectralSumResult {
            value: 0.0,
            method: SumMethod::ClosedForm,
            est_abs_error: 0.0,
        });
    }
    let qs = q.map(|row| row.map(|v| v * k2));
    let d = model.separation(i, j);
    let n = vec3::unit(d).unwrap_or([0.0, 0.0, 1.0]);
    let x = model.se_bath.cutoff_omega_c * vec3::norm(d) / model.constants.c;
    let phi = angular_tensor(&qs, model.dipole_unit(), n);
    let r = radial_integral(&phi, x, thermal_parameter(model, temperature))?;
    Ok(scale_sum(model, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::integrate;
    use crate::numerics::specfun::coth;

    fn angular_numeric(u: Vec3, n: Vec3, q: &Mat3, y: f64) -> f64 {
        // ∫dΩ/4π (1 − (u·k)²)(kQk) cos(y k·n), polar axis along z
        let opts = QuadOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            max_intervals: 4000,
        };
        let inner = |th: f64| {
            integrate(
                |ph: f64| {
                    let k = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
                    let uk = vec3::dot(u, k);
                    (1.0 - uk * uk) * quad_form(k, q, k) * (y * vec3::dot(k, n)).cos()
                },
                0.0,
                2.0 * std::f64::consts::PI,
                opts,
            )
            .unwrap()
            .value
                * th.sin()
        };
        integrate(inner, 0.0, std::f64::consts::PI, opts).unwrap().value / (4.0 * std::f64::consts::PI)
    }

    #[test]
    fn tensor_angular_matches_direct_quadrature() {
        let u = [1.0, 0.0, 0.0];
        let n = vec3::unit([0.3, -0.5, 0.8]).unwrap();
        let q = [[1.0, 0.2, -0.1], [0.3, 0.7, 0.05], [-0.1, 0.0, 0.4]];
        let phi = angular_tensor(&q, u, n);
        for &y in &[0.0, 0.4, 2.5, 7.0] {
            let direct = 1.5 * angular_numeric(u, n, &q, y);
            assert!((phi.eval(y) - direct).abs() < 1e-10, "y={y}: {} vs {direct}", phi.eval(y));
        }
    }

    #[test]
    fn tensor_with_identity_reduces_to_dipole_pattern() {
        let u = [1.0, 0.0, 0.0];
        let n = vec3::unit([1.0, 1.0, 0.0]).unwrap();
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let a = angular_tensor(&id, u, n);
        let b = angular_se(0.5);
        for &y in &[0.0, 0.7, 3.3, 12.0] {
            assert!((a.eval(y) - b.eval(y)).abs() < 1e-13);
        }
    }

    #[test]
    fn f_function_quadrature_vs_closed_form() {
        for &c2 in &[0.0, 0.3, 1.0] {
            for &x in &[0.0, 0.5, 1.9, 2.1, 10.0, 1e3, 1e4] {
                let num = extract_f(x, c2).unwrap();
                let cf = f_closed_form(x, c2);
                let scale = cf.abs().max(1e-3 * x.max(1.0).powi(-4));
                assert!((num - cf).abs() < 1e-8 * scale, "x={x} c2={c2}: {num} vs {cf}");
            }
        }
    }

    #[test]
    fn planck_occupation() {
        let k = PhysicalConstants::default();
        assert_eq!(thermal_occupation(1e9, 0.0, &k).unwrap(), 0.0);
        let t = 300.0;
        let w = k.kb * t * std::f64::consts::LN_2 / k.hbar;
        assert!((thermal_occupation(w, t, &k).unwrap() - 1.0).abs() < 1e-12);
        let w1 = k.kb * t / k.hbar;
        assert!((thermal_weight(w1, t, &k).unwrap() - coth(0.5)).abs() < 1e-12);
        assert!(thermal_occupation(0.0, t, &k).is_err());
    }
}
