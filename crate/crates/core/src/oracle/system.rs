use super::{OracleSpec, MAX_DIMENSION, MAX_SE_TRUNCATION, THERMAL_TAIL};
use crate::error::{DecoError, Result};
use crate::states::build_state;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

const HERMITICITY_TOL: f64 = 1e-14;

/// Truncated Hilbert space `qubits ⊗ cavity ⊗ bath`, where the bath is
/// the SE, vibrational and decay modes in that order. Composite index
/// `s · dim_bath + b` with `s = qubits · dim_cavity + cavity level`.
#[derive(Debug, Clone)]
pub struct SmallSystem {
    pub name: String,
    pub n_qubits: usize,
    pub cavity_dim: usize,
    /// Truncation of every bath factor.
    pub bath_dims: Vec<usize>,
    /// Full Hamiltonian.
    pub h: DMatrix<Complex64>,
    /// Coherent system Hamiltonian on `qubits ⊗ cavity`.
    pub h_s0: DMatrix<Complex64>,
    /// Initial system state on `qubits ⊗ cavity`.
    pub psi_s: DVector<Complex64>,
    /// Bath basis states with nonzero thermal weight: `(index, p)`.
    pub bath_weights: Vec<(usize, f64)>,
    /// Max absolute row sum of `V_I`, an upper bound on its spectral norm.
    pub v_norm: f64,
    pub hermiticity_residual: f64,
}

impl SmallSystem {
    pub fn system_dim(&self) -> usize {
        (1usize << self.n_qubits) * self.cavity_dim
    }

    pub fn bath_dim(&self) -> usize {
        self.bath_dims.iter().product()
    }

    pub fn dimension(&self) -> usize {
        self.system_dim() * self.bath_dim()
    }
}

/// Levels kept for a mode at occupation `n̄`: the smallest `L` carrying
/// thermal weight `≥ 1 − THERMAL_TAIL`, plus one, and at least `min`.
pub fn mode_truncation(fixed: Option<usize>, occupation: f64, min: usize) -> usize {
    if let Some(t) = fixed {
        return t;
    }
    let r = occupation / (occupation + 1.0);
    let levels = if r == 0.0 {
        1
    } else {
        (THERMAL_TAIL.ln() / r.ln()).ceil().max(1.0) as usize
    };
    (levels + 1).max(min)
}

/// Thermal populations `∝ r^n` over `dim` levels, renormalized.
pub fn thermal_populations(occupation: f64, dim: usize) -> Vec<f64> {
    let r = occupation / (occupation + 1.0);
    let mut p: Vec<f64> = (0..dim).map(|n| r.powi(n as i32)).collect();
    if r == 0.0 {
        p.iter_mut().skip(1).for_each(|v| *v = 0.0);
    }
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    p
}

#[derive(Debug, Clone, Copy)]
enum Local {
    SigmaX(usize),
    SigmaZ(usize),
    Lower,
    Raise,
    Number,
    /// `a + a†`
    Quad,
}

fn apply(op: Local, idx: usize, dim: usize, out: &mut Vec<(usize, f64)>) {
    out.clear();
    match op {
        Local::SigmaX(i) => out.push((idx ^ (1 << i), 1.0)),
        Local::SigmaZ(i) => out.push((idx, if (idx >> i) & 1 == 1 { 1.0 } else { -1.0 })),
        Local::Lower => {
            if idx > 0 {
                out.push((idx - 1, (idx as f64).sqrt()));
            }
        }
        Local::Raise => {
            if idx + 1 < dim {
                out.push((idx + 1, ((idx + 1) as f64).sqrt()));
            }
        }
        Local::Number => out.push((idx, idx as f64)),
        Local::Quad => {
            apply(Local::Lower, idx, dim, out);
            if idx + 1 < dim {
                out.push((idx + 1, ((idx + 1) as f64).sqrt()));
            }
        }
    }
}

/// `coeff · ⊗_f op_f`, at most one operator per factor.
struct Term {
    coeff: Complex64,
    ops: Vec<(usize, Local)>,
}

fn term(coeff: impl Into<Complex64>, ops: &[(usize, Local)]) -> Term {
    Term {
        coeff: coeff.into(),
        ops: ops.to_vec(),
    }
}

/// Adds every term to `h` on a mixed-radix space with the given factor
/// dimensions (first factor most significant).
fn accumulate(h: &mut DMatrix<Complex64>, dims: &[usize], terms: &[Term]) {
    let total: usize = dims.iter().product();
    let mut strides = vec![1usize; dims.len()];
    for f in (0..dims.len().saturating_sub(1)).rev() {
        strides[f] = strides[f + 1] * dims[f + 1];
    }
    let mut scratch = Vec::new();
    let mut cur: Vec<(usize, Complex64)> = Vec::new();
    let mut next: Vec<(usize, Complex64)> = Vec::new();
    for t in terms {
        if t.coeff == Complex64::new(0.0, 0.0) {
            continue;
        }
        for col in 0..total {
            cur.clear();
            cur.push((col, t.coeff));
            for &(f, op) in &t.ops {
                next.clear();
                for &(idx, c) in &cur {
                    let local = (idx / strides[f]) % dims[f];
                    apply(op, local, dims[f], &mut scratch);
                    for &(l, v) in &scratch {
                        next.push((idx - local * strides[f] + l * strides[f], c * v));
                    }
                }
                std::mem::swap(&mut cur, &mut next);
            }
            for &(row, c) in &cur {
                h[(row, col)] += c;
            }
        }
    }
}

/// Dense Hamiltonian and initial state of a spec.
pub fn build_small_system(spec: &OracleSpec) -> Result<SmallSystem> {
    spec.validate()?;
    let n = spec.n_qubits;
    let qdim = 1usize << n;
    let (cav_dim, fock) = match &spec.cavity {
        Some(c) => (c.truncation.unwrap_or(c.fock as usize + 3), c.fock as usize),
        None => (1, 0),
    };
    let se_dims: Vec<usize> = spec
        .se_modes
        .iter()
        .map(|m| mode_truncation(m.truncation, m.occupation, 3).min(MAX_SE_TRUNCATION))
        .collect();
    let vib_dims: Vec<usize> = spec
        .vib_modes
        .iter()
        .map(|m| mode_truncation(m.truncation, m.occupation, 3))
        .collect();
    let decay_dims: Vec<usize> = spec
        .decay_modes
        .iter()
        .map(|m| mode_truncation(m.truncation, m.occupation, 3))
        .collect();
    let bath_dims: Vec<usize> = se_dims.iter().chain(&vib_dims).chain(&decay_dims).copied().collect();
    let mut dims = vec![qdim, cav_dim];
    dims.extend(&bath_dims);
    let dim = dims.iter().try_fold(1usize, |a, d| a.checked_mul(*d)).unwrap_or(usize::MAX);
    if dim > MAX_DIMENSION {
        return Err(DecoError::Dimension {
            dim,
            limit: MAX_DIMENSION,
        });
    }

    const Q: usize = 0;
    const C: usize = 1;
    let se_f = |k: usize| 2 + k;
    let vib_f = |k: usize| 2 + se_dims.len() + k;
    let dec_f = |k: usize| 2 + se_dims.len() + vib_dims.len() + k;

    let mut coherent = Vec::new();
    for i in 0..n {
        coherent.push(term(0.5 * spec.omega0, &[(Q, Local::SigmaZ(i))]));
        if let Some(a) = spec.rabi.get(i) {
            coherent.push(term(*a, &[(Q, Local::SigmaX(i))]));
        }
        if let Some(a) = spec.zeeman.get(i) {
            coherent.push(term(*a, &[(Q, Local::SigmaZ(i))]));
        }
    }
    if let Some(c) = &spec.cavity {
        coherent.push(term(c.omega_b, &[(C, Local::Number)]));
    }

    let mut free = Vec::new();
    let mut inter = Vec::new();
    for (k, m) in spec.se_modes.iter().enumerate() {
        free.push(term(m.omega, &[(se_f(k), Local::Number)]));
        for (i, g) in m.g.iter().enumerate() {
            inter.push(term(*g, &[(Q, Local::SigmaX(i)), (se_f(k), Local::Lower)]));
            inter.push(term(g.conj(), &[(Q, Local::SigmaX(i)), (se_f(k), Local::Raise)]));
        }
    }
    for (k, m) in spec.vib_modes.iter().enumerate() {
        let f = vib_f(k);
        free.push(term(m.nu, &[(f, Local::Number)]));
        for (i, p) in m.ld_cavity.iter().enumerate() {
            inter.push(term(*p, &[(Q, Local::SigmaX(i)), (C, Local::Lower), (f, Local::Quad)]));
            inter.push(term(p.conj(), &[(Q, Local::SigmaX(i)), (C, Local::Raise), (f, Local::Quad)]));
        }
        for (i, t) in m.ld_classical.iter().enumerate() {
            inter.push(term(*t, &[(Q, Local::SigmaX(i)), (f, Local::Quad)]));
        }
        for (i, mu) in m.ld_magnetic.iter().enumerate() {
            inter.push(term(*mu, &[(Q, Local::SigmaZ(i)), (f, Local::Quad)]));
        }
    }
    for c in &spec.ld_se {
        let (fa, fv) = (se_f(c.se_mode), vib_f(c.vib_mode));
        let q = (Q, Local::SigmaX(c.qubit));
        inter.push(term(c.n, &[q, (fa, Local::Lower), (fv, Local::Quad)]));
        inter.push(term(c.n.conj(), &[q, (fa, Local::Raise), (fv, Local::Quad)]));
    }
    for (k, d) in spec.decay_modes.iter().enumerate() {
        let f = dec_f(k);
        free.push(term(d.xi, &[(f, Local::Number)]));
        // b†(u c + w c†) + b(u c† + w c)
        inter.push(term(d.u, &[(C, Local::Raise), (f, Local::Lower)]));
        inter.push(term(d.w, &[(C, Local::Raise), (f, Local::Raise)]));
        inter.push(term(d.u, &[(C, Local::Lower), (f, Local::Raise)]));
        inter.push(term(d.w, &[(C, Local::Lower), (f, Local::Lower)]));
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut v = DMatrix::from_element(dim, dim, zero);
    accumulate(&mut v, &dims, &inter);
    let v_norm = (0..dim)
        .map(|r| v.row(r).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut h = v;
    accumulate(&mut h, &dims, &coherent);
    accumulate(&mut h, &dims, &free);

    let h_norm = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let herm = (&h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm > HERMITICITY_TOL * h_norm.max(f64::MIN_POSITIVE) {
        return Err(DecoError::Numeric(format!(
            "assembled Hamiltonian is not Hermitian (residual {herm:e})"
        )));
    }

    let sdim = qdim * cav_dim;
    let mut h_s0 = DMatrix::from_element(sdim, sdim, zero);
    accumulate(&mut h_s0, &[qdim, cav_dim], &coherent);

    let amps = build_state(spec.state.clone(), n)?.dense_amplitudes()?;
    let mut psi_s = DVector::from_element(sdim, zero);
    for (q, a) in amps.iter().enumerate() {
        psi_s[q * cav_dim + fock] = *a;
    }

    let occ: Vec<f64> = spec
        .se_modes
        .iter()
        .map(|m| m.occupation)
        .chain(spec.vib_modes.iter().map(|m| m.occupation))
        .chain(spec.decay_modes.iter().map(|m| m.occupation))
        .collect();
    let pops: Vec<Vec<f64>> = occ.iter().zip(&bath_dims).map(|(o, d)| thermal_populations(*o, *d)).collect();
    let bdim: usize = bath_dims.iter().product();
    let mut bath_weights = Vec::new();
    for b in 0..bdim {
        let mut rem = b;
        let mut w = 1.0;
        for f in (0..bath_dims.len()).rev() {
            w *= pops[f][rem % bath_dims[f]];
            rem /= bath_dims[f];
        }
        if w > 0.0 {
            bath_weights.push((b, w));
        }
    }

    Ok(SmallSystem {
        name: spec.name.clone(),
        n_qubits: n,
        cavity_dim: cav_dim,
        bath_dims,
        h,
        h_s0,
        psi_s,
        bath_weights,
        v_norm,
        hermiticity_residual: herm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::SeMode;
    use crate::states::StateSpec;

    #[test]
    fn one_qubit_one_mode_matrix() {
        let mut s = OracleSpec::new("t", 1, StateSpec::AllZero);
        s.omega0 = 0.0;
        s.se_modes.push(SeMode {
            omega: 0.0,
            g: vec![Complex64::new(0.3, 0.0)],
            occupation: 0.0,
            truncation: Some(2),
        });
        let sys = build_small_system(&s).unwrap();
        assert_eq!(sys.dimension(), 4);
        // index = qubit · 2 + mode level; σ_X(a + a†) couples (q, n) ↔ (1 − q, 1 − n)
        let h = sys.h.map(|z| z.re);
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[0.0, 0.0, 0.0, 0.3, 0.0, 0.0, 0.3, 0.0, 0.0, 0.3, 0.0, 0.0, 0.3, 0.0, 0.0, 0.0],
        );
        assert_eq!(h, expect);
    }

    #[test]
    fn thermal_ratios() {
        let p = thermal_populations(1.0, 4);
        let s = 1.0 + 0.5 + 0.25 + 0.125;
        for (k, v) in p.iter().enumerate() {
            assert!((v - 0.5f64.powi(k as i32) / s).abs() < 1e-15);
        }
        assert_eq!(thermal_populations(0.0, 3), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn truncation_rule() {
        assert_eq!(mode_truncation(None, 0.0, 3), 3);
        // (1/3)^L ≤ 1e-6 first at L = 13
        assert_eq!(mode_truncation(None, 0.5, 3), 14);
        assert_eq!(mode_truncation(Some(5), 0.5, 3), 5);
    }
}
