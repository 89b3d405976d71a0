//! Interaction terms `V_I = Σ_a S_a ⊗ B_a` and their bath second moments.

use crate::error::{DecoError, Result};
use crate::model::{Geometry, Model, ValidatedModel};
use crate::modesums::{
    cavity_decay_moments, cavity_ld_amplitude, displacement_covariance, lamb_dicke_se_sum, quad_form,
    se_cross_sum, DecayMoments,
};
use crate::states::Axis;
use crate::vec3::{self, Vec3};
use crate::vibrations::{ModeSet, Topology};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "SE-dipole")]
    SeDipole,
    #[serde(rename = "cavity-decay-u")]
    CavityDecayU,
    #[serde(rename = "cavity-decay-w")]
    CavityDecayW,
    #[serde(rename = "LD-SE")]
    LdSe,
    #[serde(rename = "LD-cavity")]
    LdCavity,
    #[serde(rename = "LD-classical")]
    LdClassical,
    #[serde(rename = "LD-magnetic")]
    LdMagnetic,
    #[serde(rename = "gating-rabi")]
    GatingRabi,
    #[serde(rename = "gating-zeeman")]
    GatingZeeman,
}

impl Label {
    /// Families coupled to a bath, in reporting order.
    pub const BATH: [Label; 7] = [
        Label::SeDipole,
        Label::CavityDecayU,
        Label::CavityDecayW,
        Label::LdSe,
        Label::LdCavity,
        Label::LdClassical,
        Label::LdMagnetic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::SeDipole => "SE-dipole",
            Label::CavityDecayU => "cavity-decay-u",
            Label::CavityDecayW => "cavity-decay-w",
            Label::LdSe => "LD-SE",
            Label::LdCavity => "LD-cavity",
            Label::LdClassical => "LD-classical",
            Label::LdMagnetic => "LD-magnetic",
            Label::GatingRabi => "gating-rabi",
            Label::GatingZeeman => "gating-zeeman",
        }
    }

    pub fn is_coherent(self) -> bool {
        matches!(self, Label::GatingRabi | Label::GatingZeeman)
    }

    pub fn parse(s: &str) -> Option<Label> {
        Label::BATH
            .into_iter()
            .chain([Label::GatingRabi, Label::GatingZeeman])
            .find(|l| l.as_str() == s)
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Breakdown key for cross terms between different vibration-linear families.
pub const LD_INTERFERENCE: &str = "LD-interference";
/// Breakdown key for the `⟨DD⟩` (u·w) part of the cavity-decay variance.
pub const CAVITY_DECAY_UW: &str = "cavity-decay-uw";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CavityOp {
    Identity,
    /// `b`
    Lower,
    /// `b†`
    Raise,
}

/// `σ_A^{site} ⊗ c`; `pauli = None` is the qubit identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemOp {
    pub site: usize,
    pub pauli: Option<Axis>,
    pub cavity: CavityOp,
}

impl SystemOp {
    pub fn qubit(site: usize, axis: Axis) -> Self {
        SystemOp {
            site,
            pauli: Some(axis),
            cavity: CavityOp::Identity,
        }
    }

    pub fn cavity(op: CavityOp) -> Self {
        SystemOp {
            site: 0,
            pauli: None,
            cavity: op,
        }
    }
}

/// Vibrational bath operator `Σ_K v_K (A_K + A_K†)`.
#[derive(Debug, Clone, PartialEq)]
pub enum VibCoupling {
    /// `v_K = α √(ħ/2mν_K) (k·S_{site;K})`.
    Geometric { alpha: Complex64, k: Vec3 },
    /// `v_K` listed per mode.
    Explicit(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VibTerm {
    pub label: Label,
    pub op: SystemOp,
    pub coupling: VibCoupling,
}

/// Coherent gating term `amplitude · S` (no bath operator), rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentTerm {
    pub label: Label,
    pub op: SystemOp,
    pub amplitude: f64,
}

/// Second moments of the bath operators of an interaction-term list.
///
/// SE-type families couple `σ_X^i ⊗ B_i`; vibration-linear families are
/// listed per site as [`VibTerm`]s; the cavity-decay family couples
/// `b† ⊗ D + b ⊗ D†`. The three baths are independent, so moments
/// between families of different baths vanish.
pub trait Couplings: Sync {
    fn n_sites(&self) -> usize;
    fn active(&self, label: Label) -> bool;
    /// `⟨B_i B_j⟩` of the SE-dipole family.
    fn se_correlator(&self, i: usize, j: usize, temperature: f64) -> Result<Complex64>;
    /// `⟨B_i B_j⟩` of the LD-SE family.
    fn ld_se_correlator(&self, i: usize, j: usize, temperature: f64) -> Result<Complex64>;
    fn vib_terms(&self, site: usize) -> Vec<VibTerm>;
    /// `⟨B_a B_b⟩` for all `a ∈ ti`, `b ∈ tj`, row-major.
    fn vib_block(&self, i: usize, j: usize, ti: &[VibTerm], tj: &[VibTerm], temperature: f64)
        -> Result<Vec<Complex64>>;
    fn decay_moments(&self, temperature: f64) -> Result<DecayMoments>;
    fn coherent_terms(&self) -> Vec<CoherentTerm>;
    /// Vibrational and LD-SE moments vanish between different sites.
    fn sites_disjoint(&self) -> bool;
    /// Diagonal data of every site is identical, up to cavity phases.
    fn site_uniform(&self) -> bool;
    /// The cavity phase `e^{ik_b·r_i}` is the same at every site.
    fn cavity_phase_uniform(&self) -> bool;
}

/// Interaction terms of a configured model.
#[derive(Debug)]
pub struct TermList {
    model: Model,
    modes: Option<ModeSet<f64>>,
    active: BTreeSet<Label>,
    se_cache: Mutex<HashMap<([u64; 3], u64), f64>>,
}

impl Clone for TermList {
    fn clone(&self) -> Self {
        TermList {
            model: self.model.clone(),
            modes: self.modes.clone(),
            active: self.active.clone(),
            se_cache: Mutex::new(HashMap::new()),
        }
    }
}

fn nonzero(v: Vec3) -> bool {
    v.iter().any(|c| *c != 0.0)
}

fn magnetic_delta(model: &Model, site: usize) -> Vec3 {
    vec3::sub(
        model.gating.field_gradient_m11.get(site),
        model.gating.field_gradient_m00.get(site),
    )
}

fn any_site(model: &Model, f: impl Fn(usize) -> bool) -> bool {
    let g = &model.gating;
    let lists = [
        g.omega_rabi.is_uniform(),
        g.delta_shift.is_uniform(),
        g.field_gradient_m00.is_uniform(),
        g.field_gradient_m11.is_uniform(),
    ];
    if lists.iter().all(|u| *u) {
        f(0)
    } else {
        (0..model.n_qubits()).any(f)
    }
}

/// Builds the term list of a validated model.
///
/// `modes` is required whenever a Lamb-Dicke family has a non-zero
/// coupling. Gating-off models carry no coherent terms.
pub fn assemble_interaction_terms(model: &ValidatedModel, modes: Option<&ModeSet<f64>>) -> Result<TermList> {
    let m: &Model = model;
    let kb = m.cavity.wavevector;
    let mut active = BTreeSet::new();
    if m.se_active() {
        active.insert(Label::SeDipole);
        if nonzero(kb) {
            active.insert(Label::LdSe);
        }
    }
    if !m.cavity_decay.u.is_zero() {
        active.insert(Label::CavityDecayU);
    }
    if !m.cavity_decay.w.is_zero() {
        active.insert(Label::CavityDecayW);
    }
    if nonzero(kb) && m.cavity_coupling() > 0.0 {
        active.insert(Label::LdCavity);
    }
    if nonzero(m.gating.classical_wavevector) && any_site(m, |i| m.gating.omega(i).im != 0.0) {
        active.insert(Label::LdClassical);
    }
    if any_site(m, |i| nonzero(magnetic_delta(m, i))) {
        active.insert(Label::LdMagnetic);
    }
    let needs_modes = active
        .iter()
        .any(|l| matches!(l, Label::LdSe | Label::LdCavity | Label::LdClassical | Label::LdMagnetic));
    if needs_modes {
        match modes {
            None => {
                return Err(DecoError::RequiresNormalModes(
                    "Lamb-Dicke couplings are non-zero; solve the vibrational modes first".into(),
                ))
            }
            Some(nm) if nm.n_sites() != m.n_qubits() => {
                return Err(DecoError::Misuse(format!(
                    "mode set covers {} sites, model has {}",
                    nm.n_sites(),
                    m.n_qubits()
                )))
            }
            _ => {}
        }
    }
    Ok(TermList {
        model: m.clone(),
        modes: modes.cloned(),
        active,
        se_cache: Mutex::new(HashMap::new()),
    })
}

impl TermList {
    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn modes(&self) -> Option<&ModeSet<f64>> {
        self.modes.as_ref()
    }

    /// The seven bath-coupled families; each is represented exactly once,
    /// possibly with zero coupling.
    pub fn represented_families(&self) -> [Label; 7] {
        Label::BATH
    }

    /// Families with non-zero coupling.
    pub fn active_families(&self) -> Vec<Label> {
        self.active.iter().copied().collect()
    }

    /// Keeps only the listed families.
    pub fn restrict(&self, keep: &[Label]) -> TermList {
        let mut t = self.clone();
        t.active.retain(|l| keep.contains(l));
        t
    }

    /// Drops the listed families.
    pub fn without(&self, drop: &[Label]) -> TermList {
        let mut t = self.clone();
        t.active.retain(|l| !drop.contains(l));
        t
    }

    fn mode_set(&self) -> Result<&ModeSet<f64>> {
        self.modes
            .as_ref()
            .ok_or_else(|| DecoError::RequiresNormalModes("term list was built without modes".into()))
    }

    /// `K_ij = Σ_K p_K^i p_K^{j*}(2N̄_K+1)`.
    pub fn cavity_ld_sum(&self, i: usize, j: usize, temperature: f64) -> Result<Complex64> {
        if !self.active.contains(&Label::LdCavity) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let nm = self.mode_set()?;
        let q = displacement_covariance(nm, i, j, temperature, &self.model.constants)?;
        let kb = self.model.cavity.wavevector;
        Ok(cavity_ld_amplitude(&self.model, i)
            * cavity_ld_amplitude(&self.model, j).conj()
            * quad_form(kb, &q, kb))
    }

    fn vib_q(&self, i: usize, j: usize, temperature: f64) -> Result<[[f64; 3]; 3]> {
        displacement_covariance(self.mode_set()?, i, j, temperature, &self.model.constants)
    }
}

fn canonical_separation(d: Vec3) -> [u64; 3] {
    let flip = d.iter().find(|c| **c != 0.0).is_some_and(|c| *c < 0.0);
    let d = if flip { vec3::scale(d, -1.0) } else { d };
    d.map(|c| (c + 0.0).to_bits())
}

impl Couplings for TermList {
    fn n_sites(&self) -> usize {
        self.model.n_qubits()
    }

    fn active(&self, label: Label) -> bool {
        self.active.contains(&label)
    }

    fn se_correlator(&self, i: usize, j: usize, temperature: f64) -> Result<Complex64> {
        if !self.active(Label::SeDipole) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let d = self.model.separation(i, j);
        let key = (canonical_separation(d), temperature.to_bits());
        if let Some(v) = self.se_cache.lock().expect("cache lock").get(&key) {
            return Ok(Complex64::new(*v, 0.0));
        }
        let v = se_cross_sum(&self.model, d, temperature)?.value;
        self.se_cache.lock().expect("cache lock").insert(key, v);
        Ok(Complex64::new(v, 0.0))
    }

    fn ld_se_correlator(&self, i: usize, j: usize, temperature: f64) -> Result<Complex64> {
        if !self.active(Label::LdSe) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let v = lamb_dicke_se_sum(&self.model, self.mode_set()?, i, j, temperature)?.value;
        Ok(Complex64::new(v, 0.0))
    }

    fn vib_terms(&self, site: usize) -> Vec<VibTerm> {
        let m = &self.model;
        let mut out = Vec::new();
        if self.active(Label::LdCavity) {
            let a = cavity_ld_amplitude(m, site);
            for (op, alpha) in [(CavityOp::Lower, a), (CavityOp::Raise, a.conj())] {
                out.push(VibTerm {
                    label: Label::LdCavity,
                    op: SystemOp {
                        site,
                        pauli: Some(Axis::X),
                        cavity: op,
                    },
                    coupling: VibCoupling::Geometric {
                        alpha,
                        k: m.cavity.wavevector,
                    },
                });
            }
        }
        if self.active(Label::LdClassical) {
            // Θ_K = iΩ c_K(k_c); the term is 2Re(Θ_K) σ_X X_K
            let alpha = -2.0 * m.gating.omega(site).im;
            if alpha != 0.0 {
                out.push(VibTerm {
                    label: Label::LdClassical,
                    op: SystemOp::qubit(site, Axis::X),
                    coupling: VibCoupling::Geometric {
                        alpha: Complex64::new(alpha, 0.0),
                        k: m.gating.classical_wavevector,
                    },
                });
            }
        }
        if self.active(Label::LdMagnetic) {
            let dg = magnetic_delta(m, site);
            if nonzero(dg) {
                out.push(VibTerm {
                    label: Label::LdMagnetic,
                    op: SystemOp::qubit(site, Axis::Z),
                    coupling: VibCoupling::Geometric {
                        alpha: Complex64::new(-0.5 / m.constants.hbar, 0.0),
                        k: dg,
                    },
                });
            }
        }
        out
    }

    fn vib_block(
        &self,
        i: usize,
        j: usize,
        ti: &[VibTerm],
        tj: &[VibTerm],
        temperature: f64,
    ) -> Result<Vec<Complex64>> {
        if ti.is_empty() || tj.is_empty() {
            return Ok(Vec::new());
        }
        let q = self.vib_q(i, j, temperature)?;
        let mut out = Vec::with_capacity(ti.len() * tj.len());
        for a in ti {
            for b in tj {
                match (&a.coupling, &b.coupling) {
                    (
                        VibCoupling::Geometric { alpha: aa, k: ka },
                        VibCoupling::Geometric { alpha: ab, k: kb },
                    ) => out.push(aa * ab * quad_form(*ka, &q, *kb)),
                    _ => {
                        return Err(DecoError::Misuse(
                            "model term lists carry geometric couplings only".into(),
                        ))
                    }
                }
            }
        }
        Ok(out)
    }

    fn decay_moments(&self, temperature: f64) -> Result<DecayMoments> {
        let (u, w) = (self.active(Label::CavityDecayU), self.active(Label::CavityDecayW));
        if !u && !w {
            return Ok(DecayMoments::default());
        }
        let mut model = self.model.clone();
        if !u {
            model.cavity_decay.u = crate::model::CouplingProfile::Zero;
        }
        if !w {
            model.cavity_decay.w = crate::model::CouplingProfile::Zero;
        }
        cavity_decay_moments(&model, temperature)
    }

    fn coherent_terms(&self) -> Vec<CoherentTerm> {
        let g = &self.model.gating;
        let mut out = Vec::new();
        if g.rabi_is_zero() && g.shift_is_zero() {
            return out;
        }
        for site in 0..self.model.n_qubits() {
            let om = g.omega(site);
            if om != Complex64::new(0.0, 0.0) {
                out.push(CoherentTerm {
                    label: Label::GatingRabi,
                    op: SystemOp::qubit(site, Axis::X),
                    amplitude: 2.0 * om.re,
                });
            }
            let d = g.delta_shift.get(site);
            if d != 0.0 {
                out.push(CoherentTerm {
                    label: Label::GatingZeeman,
                    op: SystemOp::qubit(site, Axis::Z),
                    amplitude: 0.5 * d,
                });
            }
        }
        out
    }

    fn sites_disjoint(&self) -> bool {
        matches!(self.model.vibrations.topology, Topology::Independent { .. })
    }

    fn site_uniform(&self) -> bool {
        let g = &self.model.gating;
        self.sites_disjoint()
            && (g.omega_rabi.is_uniform() || !self.active(Label::LdClassical))
            && ((g.field_gradient_m00.is_uniform() && g.field_gradient_m11.is_uniform())
                || !self.active(Label::LdMagnetic))
    }

    fn cavity_phase_uniform(&self) -> bool {
        let m = &self.model;
        let k = m.cavity.wavevector;
        if !nonzero(k) || m.n_qubits() == 1 {
            return true;
        }
        match &m.geometry {
            Geometry::Line { axis, .. } => vec3::dot(k, *axis) == 0.0,
            _ => {
                let p0 = vec3::dot(k, m.position(0));
                (1..m.n_qubits()).all(|i| vec3::dot(k, m.position(i)) == p0)
            }
        }
    }
}
