//! Closed-form `τ₂` for special state classes.
//!
//! With `M_ij = ⟨Δσ_X^iΔσ_X^j⟩`, `G_ij` the SE plus LD-SE moments,
//! `K_ij = Σ_K p_K^i p_K^{j*}(2N̄_K+1)` and `L = ⟨D†D⟩` (`Σ_k|w_k|²` at zero
//! temperature):
//!
//! | class | `1/2τ₂²` |
//! |---|---|
//! | SE stationary | `Σ_ij M_ij C^SE_ij` |
//! | correlated, vacuum | `Σ_ij M_ij G_ij + Σ_ij ⟨σ_X^iσ_X^j⟩ K_ij + L` |
//! | uncorrelated, vacuum | `Σ_i (1 − ⟨σ_X^i⟩²)(G_ii + K_ii) + Σ_ij ⟨σ_X^i⟩⟨σ_X^j⟩ K_ij + L` |
//! | Hadamard | `Σ_ij K_ij + L` |
//! | GHZ (`N ≥ 3`) | `Σ_i (G_ii + K_ii) + L` |
//! | no SE modes | `Σ_ij ⟨σ_X^iσ_X^j⟩ K_ij + L` |

use super::engine::{state_tag, QubitMoments};
use super::terms::{assemble_interaction_terms, Couplings, Label, TermList};
use super::DecoherenceReport;
use crate::error::{DecoError, Result};
use crate::model::{derived_quantities, ValidatedModel};
use crate::modesums::se_diagonal_closed_form;
use crate::states::{Axis, CavityState, RegisterState, Representation, Structured};
use crate::vibrations::ModeSet;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateClass {
    SeStationary,
    CorrelatedVacuum,
    UncorrelatedVacuum,
    Hadamard,
    Ghz,
    NoSe,
}

impl StateClass {
    pub const ALL: [StateClass; 6] = [
        StateClass::SeStationary,
        StateClass::CorrelatedVacuum,
        StateClass::UncorrelatedVacuum,
        StateClass::Hadamard,
        StateClass::Ghz,
        StateClass::NoSe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StateClass::SeStationary => "se-stationary",
            StateClass::CorrelatedVacuum => "correlated-vacuum",
            StateClass::UncorrelatedVacuum => "uncorrelated-vacuum",
            StateClass::Hadamard => "hadamard",
            StateClass::Ghz => "ghz",
            StateClass::NoSe => "no-se",
        }
    }

    /// Families the class formula accounts for; the general engine
    /// restricted to these reproduces it.
    pub fn families(self) -> &'static [Label] {
        match self {
            StateClass::SeStationary => &[Label::SeDipole],
            StateClass::NoSe => &[Label::LdCavity, Label::CavityDecayU, Label::CavityDecayW],
            _ => &[
                Label::SeDipole,
                Label::LdSe,
                Label::LdCavity,
                Label::CavityDecayU,
                Label::CavityDecayW,
            ],
        }
    }
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

const MATCH_TOL: f64 = 1e-12;

fn mismatch(class: StateClass, reason: impl Into<String>) -> DecoError {
    DecoError::StateClassMismatch {
        class: class.as_str().to_string(),
        reason: reason.into(),
    }
}

fn is_ghz(state: &RegisterState<f64>) -> bool {
    match state.representation() {
        Representation::Structured(Structured::Ghz) => true,
        Representation::Sparse(m) => {
            let n = state.n_qubits();
            let top = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            m.len() == 2
                && match (m.get(&0), m.get(&top)) {
                    (Some(a), Some(b)) => (a - b).norm() < MATCH_TOL && (a.norm_sqr() - 0.5).abs() < MATCH_TOL,
                    _ => false,
                }
        }
        _ => false,
    }
}

fn is_hadamard(state: &RegisterState<f64>, qm: &QubitMoments) -> Result<bool> {
    match state.representation() {
        Representation::Structured(Structured::Hadamard) => Ok(true),
        Representation::Structured(Structured::Ghz | Structured::W | Structured::AllZero) => Ok(false),
        _ => {
            for i in 0..state.n_qubits() {
                if (qm.mean(i, Axis::X)? - 1.0).abs() > MATCH_TOL {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

fn check_preconditions(
    class: StateClass,
    state: &RegisterState<f64>,
    qm: &QubitMoments,
    model: &ValidatedModel,
    terms: &TermList,
) -> Result<()> {
    if class != StateClass::SeStationary {
        if !matches!(model.cavity.state, CavityState::Vacuum | CavityState::Fock(0)) {
            return Err(mismatch(class, "the cavity must be in the vacuum state"));
        }
        if terms.active(Label::LdClassical) || terms.active(Label::LdMagnetic) {
            return Err(mismatch(
                class,
                "gating-induced Lamb-Dicke couplings are outside the vacuum-class formulas",
            ));
        }
    }
    match class {
        StateClass::UncorrelatedVacuum => {
            if !state.is_uncorrelated(MATCH_TOL)? {
                return Err(mismatch(class, "⟨σ_X^iσ_X^j⟩ ≠ ⟨σ_X^i⟩⟨σ_X^j⟩ for some i ≠ j"));
            }
        }
        StateClass::Hadamard => {
            if !is_hadamard(state, qm)? {
                return Err(mismatch(class, "state is not the Hadamard product state"));
            }
        }
        StateClass::Ghz => {
            if !is_ghz(state) {
                return Err(mismatch(class, "state is not a GHZ state"));
            }
            if state.n_qubits() < 3 {
                return Err(mismatch(class, "the GHZ formula needs N ≥ 3 (N = 2 has ⟨σ_X^1σ_X^2⟩ = 1)"));
            }
        }
        _ => {}
    }
    Ok(())
}

#[derive(Default)]
struct Sums {
    total: BTreeMap<&'static str, f64>,
    cross: BTreeMap<&'static str, f64>,
}

impl Sums {
    fn add(&mut self, key: &'static str, v: f64, cross: bool) {
        *self.total.entry(key).or_default() += v;
        if cross {
            *self.cross.entry(key).or_default() += v;
        }
    }
}

struct Eval<'a> {
    terms: &'a TermList,
    temperature: f64,
    n: usize,
    /// Evaluate site 0 and multiply by `N`.
    uniform: bool,
}

impl Eval<'_> {
    fn g(&self, i: usize, j: usize, se: bool, ld: bool) -> Result<(f64, f64)> {
        let s = if se { self.terms.se_correlator(i, j, self.temperature)?.re } else { 0.0 };
        let l = if ld && (i == j || !self.terms.sites_disjoint()) {
            self.terms.ld_se_correlator(i, j, self.temperature)?.re
        } else {
            0.0
        };
        Ok((s, l))
    }

    fn k(&self, i: usize, j: usize) -> Result<f64> {
        if i != j && self.terms.sites_disjoint() {
            return Ok(0.0);
        }
        Ok(self.terms.cavity_ld_sum(i, j, self.temperature)?.re)
    }

    /// `Σ_i w_i (G_ii, K_ii)` over the diagonal.
    fn diagonal(
        &self,
        out: &mut Sums,
        weight: impl Fn(usize) -> Result<(f64, f64)>,
        se: bool,
        ld: bool,
    ) -> Result<()> {
        let sites = if self.uniform { 1 } else { self.n };
        let scale = if self.uniform { self.n as f64 } else { 1.0 };
        for i in 0..sites {
            let (wg, wk) = weight(i)?;
            if wg != 0.0 {
                let (s, l) = self.g(i, i, se, ld)?;
                out.add(Label::SeDipole.as_str(), scale * wg * s, false);
                out.add(Label::LdSe.as_str(), scale * wg * l, false);
            }
            if wk != 0.0 {
                out.add(Label::LdCavity.as_str(), scale * wk * self.k(i, i)?, false);
            }
        }
        Ok(())
    }

    /// `Σ_{i≠j} (a_ij G_ij + b_ij K_ij)`.
    fn off_diagonal(
        &self,
        out: &mut Sums,
        weight: impl Fn(usize, usize) -> Result<(f64, f64)>,
        se: bool,
        ld: bool,
    ) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    continue;
                }
                let (wg, wk) = weight(i, j)?;
                if wg != 0.0 && (se || (ld && !self.terms.sites_disjoint())) {
                    let (s, l) = self.g(i, j, se, ld)?;
                    out.add(Label::SeDipole.as_str(), wg * s, true);
                    out.add(Label::LdSe.as_str(), wg * l, true);
                }
                if wk != 0.0 && !self.terms.sites_disjoint() {
                    out.add(Label::LdCavity.as_str(), wk * self.k(i, j)?, true);
                }
            }
        }
        Ok(())
    }
}

/// Evaluates the class formula at `temperature`.
///
/// Hadamard, GHZ and no-SE reports also carry the leading-order value
/// `Nη²g_b²` (plus `N(1+η²)Σ_k|g_k|²` for GHZ) as `approximation`.
pub fn tau2_closed_form(
    class: StateClass,
    state: &RegisterState<f64>,
    model: &ValidatedModel,
    modes: Option<&ModeSet<f64>>,
    temperature: f64,
) -> Result<DecoherenceReport> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(DecoError::Unsupported(format!(
            "baths must be thermal with a finite non-negative temperature, got {temperature}"
        )));
    }
    let n = state.n_qubits();
    if n != model.n_qubits() {
        return Err(DecoError::Misuse(format!(
            "state has {n} qubits, model {}",
            model.n_qubits()
        )));
    }
    let terms = assemble_interaction_terms(model, modes)?.restrict(class.families());
    let qm = QubitMoments::new(state)?;
    check_preconditions(class, state, &qm, model, &terms)?;

    let se = terms.active(Label::SeDipole);
    let ld = terms.active(Label::LdSe);
    let xx_free = state.offdiag_covariance_vanishes(Axis::X, Axis::X);
    let uniform = state.is_site_symmetric() && terms.sites_disjoint() && terms.site_uniform();
    let ev = Eval {
        terms: &terms,
        temperature,
        n,
        uniform,
    };
    let mut s = Sums::default();
    let mean = |i: usize| qm.mean(i, Axis::X);
    match class {
        StateClass::SeStationary | StateClass::CorrelatedVacuum | StateClass::NoSe => {
            let with_g = class != StateClass::NoSe;
            let with_k = class != StateClass::SeStationary;
            ev.diagonal(
                &mut s,
                |i| Ok((if with_g { qm.cov_xx(i, i)? } else { 0.0 }, if with_k { 1.0 } else { 0.0 })),
                se,
                ld,
            )?;
            let need_g = with_g && !xx_free;
            let need_k = with_k && !terms.sites_disjoint();
            if need_g || need_k {
                ev.off_diagonal(
                    &mut s,
                    |i, j| {
                        Ok((
                            if need_g { qm.cov_xx(i, j)? } else { 0.0 },
                            if need_k { qm.product(i, j, Axis::X, Axis::X)? } else { 0.0 },
                        ))
                    },
                    se,
                    ld,
                )?;
            }
        }
        StateClass::UncorrelatedVacuum => {
            ev.diagonal(&mut s, |i| {
                // (1 − m²) K_ii + m² K_ii
                Ok((qm.cov_xx(i, i)?, 1.0))
            }, se, ld)?;
            if !terms.sites_disjoint() {
                ev.off_diagonal(&mut s, |i, j| Ok((0.0, mean(i)? * mean(j)?)), se, ld)?;
            }
        }
        StateClass::Hadamard => {
            ev.diagonal(&mut s, |_| Ok((0.0, 1.0)), se, ld)?;
            if !terms.sites_disjoint() {
                ev.off_diagonal(&mut s, |_, _| Ok((0.0, 1.0)), se, ld)?;
            }
        }
        StateClass::Ghz => {
            ev.diagonal(&mut s, |_| Ok((1.0, 1.0)), se, ld)?;
        }
    }
    if class != StateClass::SeStationary {
        let d = terms.decay_moments(temperature)?;
        s.add(Label::CavityDecayU.as_str(), d.dagd_u, false);
        s.add(Label::CavityDecayW.as_str(), d.dagd_w, false);
    }

    let mut breakdown: BTreeMap<String, f64> =
        Label::BATH.iter().map(|l| (l.as_str().to_string(), 0.0)).collect();
    for (k, v) in s.total {
        breakdown.insert(k.to_string(), v);
    }
    let cross = s.cross.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    let mut r = DecoherenceReport::assemble(
        breakdown,
        cross,
        &format!("{}:{}", class.as_str(), state_tag(state)),
        "closed-form",
        n as f64,
        temperature,
    )?;
    r.uniform_per_site = uniform;
    if matches!(class, StateClass::Hadamard | StateClass::Ghz | StateClass::NoSe) {
        if let Some(nm) = modes {
            let dq = derived_quantities(model, Some(nm))?;
            let nf = n as f64;
            let cav = nf * (dq.eta * dq.g_b).powi(2);
            r.approximation = Some(match class {
                StateClass::Ghz => {
                    let sdiag = if se { se_diagonal_closed_form(model, temperature).value } else { 0.0 };
                    nf * sdiag * (1.0 + dq.eta * dq.eta) + cav
                }
                _ => cav,
            });
        }
    }
    Ok(r)
}
