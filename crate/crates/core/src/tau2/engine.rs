use super::terms::{CavityOp, Couplings, Label, SystemOp, VibTerm, CAVITY_DECAY_UW, LD_INTERFERENCE};
use super::DecoherenceReport;
use crate::error::{DecoError, Result};
use crate::states::{cavity_moments, Axis, CavityMoments, CavityState, RegisterState, Representation, Structured};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Qubit expectation values, precomputed for sparse states.
pub(crate) struct QubitMoments<'a> {
    state: &'a RegisterState<f64>,
    dense: Option<Dense>,
}

struct Dense {
    n: usize,
    x: Vec<f64>,
    z: Vec<f64>,
    // covariances XX, XZ, ZX, ZZ, row-major n×n
    cov: [Vec<f64>; 4],
}

fn axis_index(a: Axis, b: Axis) -> usize {
    match (a, b) {
        (Axis::X, Axis::X) => 0,
        (Axis::X, Axis::Z) => 1,
        (Axis::Z, Axis::X) => 2,
        (Axis::Z, Axis::Z) => 3,
    }
}

impl<'a> QubitMoments<'a> {
    pub(crate) fn new(state: &'a RegisterState<f64>) -> Result<Self> {
        let dense = match state.representation() {
            Representation::Structured(_) => None,
            Representation::Sparse(_) => {
                let n = state.n_qubits();
                let x = (0..n).map(|i| state.expect_pauli(i, Axis::X)).collect::<Result<Vec<_>>>()?;
                let z = (0..n).map(|i| state.expect_pauli(i, Axis::Z)).collect::<Result<Vec<_>>>()?;
                let mut cov = [vec![0.0; n * n], vec![0.0; n * n], vec![0.0; n * n], vec![0.0; n * n]];
                for i in 0..n {
                    for j in 0..n {
                        for (a, b) in [(Axis::X, Axis::X), (Axis::X, Axis::Z), (Axis::Z, Axis::X), (Axis::Z, Axis::Z)] {
                            cov[axis_index(a, b)][i * n + j] = state.covariance(i, j, a, b)?;
                        }
                    }
                }
                Some(Dense { n, x, z, cov })
            }
        };
        Ok(QubitMoments { state, dense })
    }

    pub(crate) fn mean(&self, i: usize, a: Axis) -> Result<f64> {
        match &self.dense {
            Some(d) => Ok(match a {
                Axis::X => d.x[i],
                Axis::Z => d.z[i],
            }),
            None => self.state.expect_pauli(i, a),
        }
    }

    /// `⟨σ_A^i σ_B^j⟩` with `σ_A² = 1` and the symmetrized same-site mixed
    /// product set to zero.
    pub(crate) fn product(&self, i: usize, j: usize, a: Axis, b: Axis) -> Result<f64> {
        if i == j {
            return Ok(if a == b { 1.0 } else { 0.0 });
        }
        match &self.dense {
            Some(_) => Ok(self.cov(i, j, a, b)? + self.mean(i, a)? * self.mean(j, b)?),
            None => self.state.expect_pauli_pair(i, j, a, b),
        }
    }

    /// `⟨σ_A^i σ_B^j⟩ − ⟨σ_A^i⟩⟨σ_B^j⟩` under the same convention.
    pub(crate) fn cov(&self, i: usize, j: usize, a: Axis, b: Axis) -> Result<f64> {
        match &self.dense {
            Some(d) => Ok(d.cov[axis_index(a, b)][i * d.n + j]),
            None => self.state.covariance(i, j, a, b),
        }
    }

    pub(crate) fn cov_xx(&self, i: usize, j: usize) -> Result<f64> {
        self.cov(i, j, Axis::X, Axis::X)
    }
}

fn cavity_mean(cm: &CavityMoments<f64>, c: CavityOp) -> Complex64 {
    match c {
        CavityOp::Identity => Complex64::new(1.0, 0.0),
        CavityOp::Lower => cm.b,
        CavityOp::Raise => cm.bdag,
    }
}

fn cavity_product(cm: &CavityMoments<f64>, a: CavityOp, b: CavityOp) -> Complex64 {
    use CavityOp::*;
    match (a, b) {
        (Identity, c) | (c, Identity) => cavity_mean(cm, c),
        (Lower, Lower) => cm.b2,
        (Lower, Raise) => Complex64::new(cm.b_bdag, 0.0),
        (Raise, Lower) => Complex64::new(cm.bdag_b, 0.0),
        (Raise, Raise) => cm.bdag2,
    }
}

/// `⟨S_aS_b⟩ − ⟨S_a⟩⟨S_b⟩` for qubit ⊗ cavity products.
pub(crate) fn system_covariance(
    qm: &QubitMoments,
    cm: &CavityMoments<f64>,
    a: &SystemOp,
    b: &SystemOp,
) -> Result<Complex64> {
    let (qa, qb, cq) = match (a.pauli, b.pauli) {
        (None, None) => (1.0, 1.0, 0.0),
        (Some(x), None) => (qm.mean(a.site, x)?, 1.0, 0.0),
        (None, Some(y)) => (1.0, qm.mean(b.site, y)?, 0.0),
        (Some(x), Some(y)) => (
            qm.mean(a.site, x)?,
            qm.mean(b.site, y)?,
            qm.cov(a.site, b.site, x, y)?,
        ),
    };
    let cab = cavity_product(cm, a.cavity, b.cavity);
    let ca = cavity_mean(cm, a.cavity);
    let cb = cavity_mean(cm, b.cavity);
    // written as covariances so that nothing cancels
    Ok(cq * cab + qa * qb * (cab - ca * cb))
}

/// Short tag naming the state's structure.
pub fn state_tag(state: &RegisterState<f64>) -> &'static str {
    match state.representation() {
        Representation::Structured(s) => match s {
            Structured::Hadamard => "hadamard",
            Structured::Ghz => "ghz",
            Structured::AllZero => "all-zero",
            Structured::W => "w",
            Structured::Product(_) => "product",
        },
        Representation::Sparse(_) => "sparse",
    }
}

#[derive(Default)]
struct Acc {
    total: BTreeMap<&'static str, Complex64>,
    cross: BTreeMap<&'static str, Complex64>,
}

impl Acc {
    fn add(&mut self, key: &'static str, v: Complex64, cross: bool) {
        *self.total.entry(key).or_default() += v;
        if cross {
            *self.cross.entry(key).or_default() += v;
        }
    }

    fn scaled(self, s: f64) -> Acc {
        Acc {
            total: self.total.into_iter().map(|(k, v)| (k, v * s)).collect(),
            cross: self.cross.into_iter().map(|(k, v)| (k, v * s)).collect(),
        }
    }

    fn merge(&mut self, other: Acc) {
        for (k, v) in other.total {
            *self.total.entry(k).or_default() += v;
        }
        for (k, v) in other.cross {
            *self.cross.entry(k).or_default() += v;
        }
    }
}

struct Ctx<'a, C: Couplings + ?Sized> {
    qm: QubitMoments<'a>,
    cm: CavityMoments<f64>,
    terms: &'a C,
    temperature: f64,
}

impl<C: Couplings + ?Sized> Ctx<'_, C> {
    fn se_pair(&self, i: usize, j: usize, acc: &mut Acc) -> Result<()> {
        let se = self.terms.active(Label::SeDipole);
        let ld = self.terms.active(Label::LdSe) && (i == j || !self.terms.sites_disjoint());
        if !se && !ld {
            return Ok(());
        }
        let cov = self.qm.cov_xx(i, j)?;
        if cov == 0.0 {
            return Ok(());
        }
        if se {
            let c = self.terms.se_correlator(i, j, self.temperature)?;
            acc.add(Label::SeDipole.as_str(), c * cov, i != j);
        }
        if ld {
            let c = self.terms.ld_se_correlator(i, j, self.temperature)?;
            acc.add(Label::LdSe.as_str(), c * cov, i != j);
        }
        Ok(())
    }

    fn vib_pair(&self, i: usize, j: usize, ti: &[VibTerm], tj: &[VibTerm], acc: &mut Acc) -> Result<()> {
        if ti.is_empty() || tj.is_empty() {
            return Ok(());
        }
        let block = self.terms.vib_block(i, j, ti, tj, self.temperature)?;
        for (ia, a) in ti.iter().enumerate() {
            for (ib, b) in tj.iter().enumerate() {
                let corr = block[ia * tj.len() + ib];
                if corr == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let cov = system_covariance(&self.qm, &self.cm, &a.op, &b.op)?;
                let key = if a.label == b.label { a.label.as_str() } else { LD_INTERFERENCE };
                acc.add(key, cov * corr, i != j);
            }
        }
        Ok(())
    }

    fn decay(&self, acc: &mut Acc) -> Result<()> {
        let d = self.terms.decay_moments(self.temperature)?;
        if d.is_zero() {
            return Ok(());
        }
        let raise = SystemOp::cavity(CavityOp::Raise);
        let lower = SystemOp::cavity(CavityOp::Lower);
        let cov = |a: &SystemOp, b: &SystemOp| system_covariance(&self.qm, &self.cm, a, b);
        // V = b†D + bD†
        let rr = cov(&raise, &raise)?;
        let rl = cov(&raise, &lower)?;
        let lr = cov(&lower, &raise)?;
        let ll = cov(&lower, &lower)?;
        acc.add(CAVITY_DECAY_UW, (rr + ll) * d.dd, false);
        acc.add(Label::CavityDecayU.as_str(), rl * d.ddag_u + lr * d.dagd_u, false);
        acc.add(Label::CavityDecayW.as_str(), rl * d.ddag_w + lr * d.dagd_w, false);
        Ok(())
    }
}

fn finish(acc: Acc, class: &str, n: f64, temperature: f64, uniform: bool) -> Result<DecoherenceReport> {
    let mut breakdown: BTreeMap<String, f64> = Label::BATH
        .iter()
        .map(|l| (l.as_str().to_string(), 0.0))
        .chain([(LD_INTERFERENCE.to_string(), 0.0), (CAVITY_DECAY_UW.to_string(), 0.0)])
        .collect();
    let mut scale = 0.0f64;
    let mut imag = 0.0f64;
    for (k, v) in &acc.total {
        breakdown.insert((*k).to_string(), v.re);
        scale += v.re.abs();
        imag += v.im;
    }
    if imag.abs() > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        log::debug!("variance has imaginary residue {imag:e} (scale {scale:e})");
    }
    let cross = acc.cross.iter().map(|(k, v)| ((*k).to_string(), v.re)).collect();
    let mut r = DecoherenceReport::assemble(breakdown, cross, class, "general", n, temperature)?;
    r.uniform_per_site = uniform;
    Ok(r)
}

/// Variance of `V_I` in the product of the pure system state and thermal
/// baths at `temperature`.
///
/// Site-symmetric states on independent traps whose SE cross covariances
/// vanish take an `O(1)` path (one site times `N`); states with vanishing
/// cross covariances take an `O(N)` path; everything else sums all pairs.
pub fn tau2_general<C: Couplings + ?Sized>(
    state: &RegisterState<f64>,
    cavity: CavityState<f64>,
    terms: &C,
    temperature: f64,
) -> Result<DecoherenceReport> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(DecoError::Unsupported(format!(
            "baths must be thermal with a finite non-negative temperature, got {temperature}"
        )));
    }
    let n = state.n_qubits();
    if terms.n_sites() != n {
        return Err(DecoError::Misuse(format!(
            "state has {n} qubits, term list {} sites",
            terms.n_sites()
        )));
    }
    let cm = cavity_moments(cavity);
    let ctx = Ctx {
        qm: QubitMoments::new(state)?,
        cm,
        terms,
        temperature,
    };
    let se_any = terms.active(Label::SeDipole) || terms.active(Label::LdSe);
    let xx_free = state.offdiag_covariance_vanishes(Axis::X, Axis::X);
    let cavity_phase_free = cm.b == Complex64::new(0.0, 0.0) && cm.b2 == Complex64::new(0.0, 0.0);
    let disjoint = terms.sites_disjoint();
    let fast = state.is_site_symmetric()
        && disjoint
        && terms.site_uniform()
        && (cavity_phase_free || terms.cavity_phase_uniform())
        && (!se_any || xx_free);

    let mut acc = Acc::default();
    if fast {
        let mut site = Acc::default();
        ctx.se_pair(0, 0, &mut site)?;
        let t0 = terms.vib_terms(0);
        ctx.vib_pair(0, 0, &t0, &t0, &mut site)?;
        acc.merge(site.scaled(n as f64));
    } else {
        let vib: Vec<Vec<VibTerm>> = (0..n).map(|i| terms.vib_terms(i)).collect();
        let se_cross = se_any && !xx_free;
        for i in 0..n {
            ctx.se_pair(i, i, &mut acc)?;
            ctx.vib_pair(i, i, &vib[i], &vib[i], &mut acc)?;
            if !se_cross && disjoint {
                continue;
            }
            for j in 0..n {
                if j == i {
                    continue;
                }
                if se_cross {
                    ctx.se_pair(i, j, &mut acc)?;
                }
                if !disjoint {
                    ctx.vib_pair(i, j, &vib[i], &vib[j], &mut acc)?;
                }
            }
        }
    }
    ctx.decay(&mut acc)?;
    finish(acc, state_tag(state), n as f64, temperature, fast)
}
