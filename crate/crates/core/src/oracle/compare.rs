use super::evolve::{default_grid, evolve_fidelity, EvolveOptions};
use super::fit::{fit_tau2, Tau2Fit};
use super::system::build_small_system;
use super::{full_suite, quick_suite, OracleSpec};
use crate::error::{DecoError, Result};
use crate::modesums::DecayMoments;
use crate::states::{build_state, Axis, CavityState};
use crate::tau2::{tau2_general, CavityOp, CoherentTerm, Couplings, Label, SystemOp, VibCoupling, VibTerm};
use num_complex::Complex64;
use serde::Serialize;

pub const DEVIATION_TOL: f64 = 0.01;
pub const CONVERGENCE_TOL: f64 = 0.002;
pub const MAX_ROUNDS: usize = 4;
pub const UNITARITY_TOL: f64 = 1e-10;
pub const F0_TOL: f64 = 1e-12;

/// Bath moments of an [`OracleSpec`]'s discrete modes, for the variance
/// engine. Occupations are taken from the spec; the temperature argument
/// of the trait methods is ignored.
#[derive(Debug, Clone)]
pub struct DiscreteTerms {
    spec: OracleSpec,
}

impl DiscreteTerms {
    pub fn new(spec: &OracleSpec) -> Result<Self> {
        spec.validate()?;
        Ok(DiscreteTerms { spec: spec.clone() })
    }
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Couplings for DiscreteTerms {
    fn n_sites(&self) -> usize {
        self.spec.n_qubits
    }

    fn active(&self, label: Label) -> bool {
        let s = &self.spec;
        match label {
            Label::SeDipole => !s.se_modes.is_empty(),
            Label::LdSe => !s.ld_se.is_empty(),
            Label::LdCavity => s.vib_modes.iter().any(|m| !m.ld_cavity.is_empty()),
            Label::LdClassical => s.vib_modes.iter().any(|m| !m.ld_classical.is_empty()),
            Label::LdMagnetic => s.vib_modes.iter().any(|m| !m.ld_magnetic.is_empty()),
            Label::CavityDecayU | Label::CavityDecayW => !s.decay_modes.is_empty(),
            Label::GatingRabi => !s.rabi.is_empty(),
            Label::GatingZeeman => !s.zeeman.is_empty(),
        }
    }

    fn se_correlator(&self, i: usize, j: usize, _temperature: f64) -> Result<Complex64> {
        Ok(self.spec.se_modes.iter().fold(zero(), |acc, m| {
            let (gi, gj) = (m.g[i], m.g[j]);
            acc + gi * gj.conj() * (m.occupation + 1.0) + gi.conj() * gj * m.occupation
        }))
    }

    fn ld_se_correlator(&self, i: usize, j: usize, _temperature: f64) -> Result<Complex64> {
        let s = &self.spec;
        let mut acc = zero();
        for a in s.ld_se.iter().filter(|c| c.qubit == i) {
            for b in s.ld_se.iter().filter(|c| c.qubit == j) {
                if a.se_mode != b.se_mode || a.vib_mode != b.vib_mode {
                    continue;
                }
                let m = s.se_modes[a.se_mode].occupation;
                let xx = 2.0 * s.vib_modes[a.vib_mode].occupation + 1.0;
                acc += xx * (a.n * b.n.conj() * (m + 1.0) + a.n.conj() * b.n * m);
            }
        }
        Ok(acc)
    }

    fn vib_terms(&self, site: usize) -> Vec<VibTerm> {
        let modes = &self.spec.vib_modes;
        let per_mode = |f: &dyn Fn(&super::VibMode) -> Complex64| -> Vec<Complex64> { modes.iter().map(f).collect() };
        let nonzero = |v: &[Complex64]| v.iter().any(|z| *z != zero());
        let mut out = Vec::new();
        let cav = per_mode(&|m| m.ld_cavity.get(site).copied().unwrap_or_default());
        if nonzero(&cav) {
            for (op, v) in [
                (CavityOp::Lower, cav.clone()),
                (CavityOp::Raise, cav.iter().map(|z| z.conj()).collect()),
            ] {
                out.push(VibTerm {
                    label: Label::LdCavity,
                    op: SystemOp {
                        site,
                        pauli: Some(Axis::X),
                        cavity: op,
                    },
                    coupling: VibCoupling::Explicit(v),
                });
            }
        }
        let cls = per_mode(&|m| Complex64::new(m.ld_classical.get(site).copied().unwrap_or(0.0), 0.0));
        if nonzero(&cls) {
            out.push(VibTerm {
                label: Label::LdClassical,
                op: SystemOp::qubit(site, Axis::X),
                coupling: VibCoupling::Explicit(cls),
            });
        }
        let mag = per_mode(&|m| Complex64::new(m.ld_magnetic.get(site).copied().unwrap_or(0.0), 0.0));
        if nonzero(&mag) {
            out.push(VibTerm {
                label: Label::LdMagnetic,
                op: SystemOp::qubit(site, Axis::Z),
                coupling: VibCoupling::Explicit(mag),
            });
        }
        out
    }

    fn vib_block(
        &self,
        _i: usize,
        _j: usize,
        ti: &[VibTerm],
        tj: &[VibTerm],
        _temperature: f64,
    ) -> Result<Vec<Complex64>> {
        let xx: Vec<f64> = self.spec.vib_modes.iter().map(|m| 2.0 * m.occupation + 1.0).collect();
        let mut out = Vec::with_capacity(ti.len() * tj.len());
        for a in ti {
            for b in tj {
                match (&a.coupling, &b.coupling) {
                    (VibCoupling::Explicit(va), VibCoupling::Explicit(vb)) => {
                        out.push(va.iter().zip(vb).zip(&xx).map(|((x, y), w)| x * y * *w).sum())
                    }
                    _ => return Err(DecoError::Misuse("discrete terms carry explicit couplings only".into())),
                }
            }
        }
        Ok(out)
    }

    fn decay_moments(&self, _temperature: f64) -> Result<DecayMoments> {
        let mut d = DecayMoments::default();
        for m in &self.spec.decay_modes {
            let n = m.occupation;
            d.dd += m.u * m.w * (2.0 * n + 1.0);
            d.ddag_u += m.u * m.u * (n + 1.0);
            d.ddag_w += m.w * m.w * n;
            d.dagd_u += m.u * m.u * n;
            d.dagd_w += m.w * m.w * (n + 1.0);
        }
        Ok(d)
    }

    fn coherent_terms(&self) -> Vec<CoherentTerm> {
        let s = &self.spec;
        let rabi = s.rabi.iter().enumerate().map(|(i, a)| CoherentTerm {
            label: Label::GatingRabi,
            op: SystemOp::qubit(i, Axis::X),
            amplitude: *a,
        });
        let zeeman = s.zeeman.iter().enumerate().map(|(i, a)| CoherentTerm {
            label: Label::GatingZeeman,
            op: SystemOp::qubit(i, Axis::Z),
            amplitude: *a,
        });
        rabi.chain(zeeman).filter(|t| t.amplitude != 0.0).collect()
    }

    fn sites_disjoint(&self) -> bool {
        false
    }

    fn site_uniform(&self) -> bool {
        false
    }

    fn cavity_phase_uniform(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub name: String,
    /// `ħ = 1` units.
    pub tau2_engine: f64,
    pub tau2_oracle: f64,
    /// `|τ₂_engine/τ₂_oracle − 1|`.
    pub deviation: f64,
    pub truncation_converged: bool,
    /// Relative `τ₂` shift of the last truncation increase.
    pub truncation_shift: f64,
    pub rounds: usize,
    pub dimension: usize,
    pub fit: Tau2Fit,
    pub f0_error: f64,
    pub trace_error: f64,
    pub purity_error: f64,
    pub passed: bool,
}

struct OracleRun {
    tau2: f64,
    fit: Tau2Fit,
    dimension: usize,
    f0_error: f64,
    trace_error: f64,
    purity_error: f64,
}

fn run_oracle(spec: &OracleSpec) -> Result<OracleRun> {
    let sys = build_small_system(spec)?;
    let opts = EvolveOptions::default();
    let curve = evolve_fidelity(&sys, &default_grid(&sys), opts)?;
    let fit = fit_tau2(&curve, opts.fit)?;
    Ok(OracleRun {
        tau2: fit.tau2,
        dimension: sys.dimension(),
        f0_error: (curve.fidelity[0] - 1.0).abs(),
        trace_error: curve.trace_error,
        purity_error: curve.purity_error,
        fit,
    })
}

/// Engine `τ₂` from `engine_spec`'s discrete moments against the oracle
/// fit on `oracle_spec`, raising truncations until the fit settles.
pub fn compare(engine_spec: &OracleSpec, oracle_spec: &OracleSpec) -> Result<Comparison> {
    let terms = DiscreteTerms::new(engine_spec)?;
    let state = build_state(engine_spec.state.clone(), engine_spec.n_qubits)?;
    let cavity = match &engine_spec.cavity {
        Some(c) => CavityState::Fock(c.fock),
        None => CavityState::Vacuum,
    };
    let engine = tau2_general(&state, cavity, &terms, 0.0)?;

    let mut run = run_oracle(oracle_spec)?;
    let mut converged = false;
    let mut shift = f64::INFINITY;
    let mut rounds = 0;
    for extra in 1..=MAX_ROUNDS {
        let next = match run_oracle(&oracle_spec.with_extra_levels(extra)) {
            Ok(r) => r,
            Err(DecoError::Dimension { .. }) => break,
            Err(e) => return Err(e),
        };
        rounds = extra;
        shift = (next.tau2 / run.tau2 - 1.0).abs();
        run = next;
        if shift < CONVERGENCE_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("{}: truncation did not converge (last shift {shift:.2e})", oracle_spec.name);
    }
    let deviation = (engine.tau2 / run.tau2 - 1.0).abs();
    let passed = deviation < DEVIATION_TOL
        && converged
        && run.fit.tau1_ok
        && run.f0_error <= F0_TOL
        && run.trace_error <= UNITARITY_TOL
        && run.purity_error <= UNITARITY_TOL;
    Ok(Comparison {
        name: oracle_spec.name.clone(),
        tau2_engine: engine.tau2,
        tau2_oracle: run.tau2,
        deviation,
        truncation_converged: converged,
        truncation_shift: shift,
        rounds,
        dimension: run.dimension,
        fit: run.fit,
        f0_error: run.f0_error,
        trace_error: run.trace_error,
        purity_error: run.purity_error,
        passed,
    })
}

pub fn cross_validate(spec: &OracleSpec) -> Result<Comparison> {
    compare(spec, spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Quick,
    Full,
}

impl Suite {
    pub fn specs(self) -> Vec<OracleSpec> {
        match self {
            Suite::Quick => quick_suite(),
            Suite::Full => full_suite(),
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        match s {
            "quick" => Some(Suite::Quick),
            "full" => Some(Suite::Full),
            _ => None,
        }
    }
}

/// Cross-validates every spec of the suite, one thread per spec.
pub fn run_suite(suite: Suite) -> Vec<(String, Result<Comparison>)> {
    let specs = suite.specs();
    std::thread::scope(|sc| {
        let handles: Vec<_> = specs.iter().map(|s| sc.spawn(move || cross_validate(s))).collect();
        specs
            .iter()
            .zip(handles)
            .map(|(s, h)| {
                let r = h
                    .join()
                    .unwrap_or_else(|_| Err(DecoError::Numeric(format!("{}: worker panicked", s.name))));
                (s.name.clone(), r)
            })
            .collect()
    })
}
