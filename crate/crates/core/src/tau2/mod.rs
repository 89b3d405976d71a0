//! Short-time decoherence time `τ₂` from the variance of `V_I`.
//!
//! `1/2τ₂² = Σ_ab [⟨S_aS_b⟩ − ⟨S_a⟩⟨S_b⟩] ⟨B_aB_b⟩` in rate units, with
//! bath moments taken in thermal Gaussian states. The linear timescale
//! `τ₁` vanishes identically since every bath operator has zero mean.

pub mod closed;
pub mod engine;
pub mod sweep;
pub mod terms;

pub use closed::{tau2_closed_form, StateClass};
pub use engine::tau2_general;
pub use sweep::{scaling_sweep, SweepOptions, SweepRow, SweepTable};
pub use terms::{
    assemble_interaction_terms, CavityOp, CoherentTerm, Couplings, Label, SystemOp, TermList, VibCoupling,
    VibTerm, CAVITY_DECAY_UW, LD_INTERFERENCE,
};

use crate::error::{DecoError, Result};
use crate::model::Model;
use crate::vec3;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;

/// `1 − F` above which the quadratic expansion is flagged.
pub const EXPANSION_WARN: f64 = 0.1;

fn finite_or_inf<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoherenceReport {
    /// s; infinite when the variance vanishes.
    #[serde(serialize_with = "finite_or_inf")]
    pub tau2: f64,
    /// Linear timescale rate `1/τ₁`; zero for thermal baths.
    pub inv_tau1: f64,
    /// `1/2τ₂²`, 1/s².
    pub inv_half_tau2_sq: f64,
    /// Contribution per family, 1/s²; sums to the total.
    pub breakdown: BTreeMap<String, f64>,
    /// Part of each breakdown entry coming from `i ≠ j` pairs.
    pub cross_by_label: BTreeMap<String, f64>,
    /// Share of the total from `i ≠ j` terms.
    pub cross_site_fraction: f64,
    pub state_class: String,
    pub method: String,
    /// Register size; a float so that extrapolated sizes fit.
    pub n_qubits: f64,
    pub temperature: f64,
    /// Leading-order approximation of `1/2τ₂²` where one is customary.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub approximation: Option<f64>,
    /// The total is `N` times a per-site value plus the cavity-decay part.
    pub uniform_per_site: bool,
}

/// Tolerance on negative totals attributed to rounding.
const NEGATIVE_TOL: f64 = 1e-9;

impl DecoherenceReport {
    pub(crate) fn assemble(
        breakdown: BTreeMap<String, f64>,
        cross_by_label: BTreeMap<String, f64>,
        state_class: &str,
        method: &str,
        n_qubits: f64,
        temperature: f64,
    ) -> Result<Self> {
        let total = breakdown.values().fold(0.0, |s, v| s + v);
        let scale = breakdown.values().fold(0.0, |s, v| s + v.abs());
        if !total.is_finite() {
            return Err(DecoError::Numeric(format!("variance is not finite ({total})")));
        }
        if total < -NEGATIVE_TOL * scale {
            return Err(DecoError::Numeric(format!(
                "variance is negative ({total:e}); bath moments are inconsistent"
            )));
        }
        let total = total.max(0.0);
        let cross = cross_by_label.values().fold(0.0, |s, v| s + v);
        Ok(DecoherenceReport {
            tau2: tau2_from_rate(total),
            inv_tau1: 0.0,
            inv_half_tau2_sq: total,
            breakdown,
            cross_by_label,
            cross_site_fraction: if total > 0.0 { cross / total } else { 0.0 },
            state_class: state_class.to_string(),
            method: method.to_string(),
            n_qubits,
            temperature,
            approximation: None,
            uniform_per_site: false,
        })
    }

    pub fn entry(&self, key: &str) -> f64 {
        self.breakdown.get(key).copied().unwrap_or(0.0)
    }

    /// Share of one family's contribution coming from `i ≠ j` pairs.
    pub fn label_cross_fraction(&self, key: &str) -> f64 {
        let tot = self.entry(key);
        let cross = self.cross_by_label.get(key).copied().unwrap_or(0.0);
        if tot == 0.0 {
            0.0
        } else {
            cross / tot
        }
    }

    /// `τ₂` of the leading-order approximation, if recorded.
    pub fn approximate_tau2(&self) -> Option<f64> {
        self.approximation.map(tau2_from_rate)
    }
}

/// `1/√(2r)` for `r = 1/2τ₂²`.
pub fn tau2_from_rate(rate: f64) -> f64 {
    if rate > 0.0 {
        1.0 / (2.0 * rate).sqrt()
    } else {
        f64::INFINITY
    }
}

/// `F(t) = 1 − t²/2τ₂²`. Warns when the expansion leaves its regime.
pub fn fidelity_short_time(report: &DecoherenceReport, t: f64) -> f64 {
    let loss = report.inv_half_tau2_sq * t * t;
    if loss > EXPANSION_WARN {
        log::warn!("1 − F = {loss:.3} at t = {t:e} s; the short-time expansion is not reliable there");
    }
    1.0 - loss
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Independent,
    Collective,
    Intermediate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    pub high: f64,
    pub low: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds { high: 10.0, low: 0.1 }
    }
}

/// Regime from the dimensionless products `Δk·d` and `k̄·d`.
pub fn classify_products(dk_d: f64, kbar_d: f64, th: RegimeThresholds) -> Regime {
    if dk_d > th.high {
        Regime::Independent
    } else if dk_d < th.low && kbar_d < th.low {
        Regime::Collective
    } else {
        Regime::Intermediate
    }
}

/// Decoherence regime of the pair `(i, j)`.
pub fn classify_decoherence(model: &Model, i: usize, j: usize, th: RegimeThresholds) -> Regime {
    let d = vec3::norm(model.separation(i, j));
    classify_products(model.delta_k() * d, model.kbar() * d, th)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        let th = RegimeThresholds::default();
        assert_eq!(classify_products(1e3, 1e1, th), Regime::Independent);
        assert_eq!(classify_products(1e-3, 1e-2, th), Regime::Collective);
        assert_eq!(classify_products(1.0, 1e-2, th), Regime::Intermediate);
        assert_eq!(classify_products(1e-3, 1.0, th), Regime::Intermediate);
    }

    fn report(rate: f64) -> DecoherenceReport {
        let mut b = BTreeMap::new();
        b.insert("SE-dipole".to_string(), rate);
        DecoherenceReport::assemble(b, BTreeMap::new(), "test", "general", 1.0, 0.0).unwrap()
    }

    #[test]
    fn fidelity_expansion() {
        let r = report(0.5e14);
        assert_eq!(fidelity_short_time(&r, 0.0), 1.0);
        assert!((fidelity_short_time(&r, r.tau2) - 0.5).abs() < 1e-15);
        let z = report(0.0);
        assert!(z.tau2.is_infinite());
        assert_eq!(fidelity_short_time(&z, 1e9), 1.0);
    }

    #[test]
    fn infinite_tau2_serializes() {
        let z = report(0.0);
        let j = serde_json::to_value(&z).unwrap();
        assert_eq!(j["tau2"], "inf");
    }
}
