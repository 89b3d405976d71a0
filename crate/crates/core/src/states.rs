//! Pure qubit-register states and cavity-ancilla states.
//!
//! Basis convention: bit `i` of a basis index is the state of qubit `i`,
//! bit value 1 meaning `|1⟩`. `σ_Z = |1⟩⟨1| − |0⟩⟨0|`, so `σ_Z|1⟩ = +|1⟩`.
//!
//! Structured states (Hadamard, GHZ, all-zero, W, product) keep closed-form
//! expectation rules and never allocate `2^N` amplitudes.

use crate::error::{DecoError, Result};
use crate::scalar::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Tolerance below which a supplied norm is accepted as is.
pub const NORM_EXACT_TOL: f64 = 1e-12;
/// Deviations between the two tolerances are renormalized silently.
pub const NORM_RENORMALIZE_TOL: f64 = 1e-6;

/// Largest register for which exhaustive pair checks are performed.
pub const EXHAUSTIVE_MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Z,
}

/// Named register states with analytic expectation rules.
#[derive(Debug, Clone, PartialEq)]
pub enum Structured<R: Real> {
    /// `⊗_i (|0⟩ + |1⟩)/√2`
    Hadamard,
    /// `(|0…0⟩ + |1…1⟩)/√2`
    Ghz,
    AllZero,
    /// Equal superposition of single excitations.
    W,
    /// Per-site amplitudes `(α_i, β_i)` of `α|0⟩ + β|1⟩`, each normalized.
    Product(Vec<[Complex<R>; 2]>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation<R: Real> {
    Structured(Structured<R>),
    /// Basis index → amplitude; sorted for deterministic summation order.
    Sparse(BTreeMap<u64, Complex<R>>),
}

/// Input descriptor for [`build_state`].
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec<R: Real> {
    Hadamard,
    Ghz,
    AllZero,
    W,
    Product(Vec<[Complex<R>; 2]>),
    Sparse(Vec<(u64, Complex<R>)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegisterState<R: Real> {
    n_qubits: usize,
    repr: Representation<R>,
}

fn renormalize<R: Real>(norm_sq: R, what: &str) -> Result<Option<R>> {
    if norm_sq <= R::zero() || !norm_sq.is_finite() {
        return Err(DecoError::Normalization(format!("{what} has zero norm")));
    }
    let dev = (norm_sq - R::one()).abs();
    if dev.to_f64_lossy() < NORM_EXACT_TOL {
        Ok(None)
    } else if dev.to_f64_lossy() < NORM_RENORMALIZE_TOL {
        Ok(Some(R::one() / norm_sq.sqrt()))
    } else {
        Err(DecoError::Normalization(format!(
            "{what} has squared norm {norm_sq}, deviation above {NORM_RENORMALIZE_TOL}"
        )))
    }
}

/// Builds a normalized register state.
pub fn build_state<R: Real>(spec: StateSpec<R>, n_qubits: usize) -> Result<RegisterState<R>> {
    if n_qubits == 0 {
        return Err(DecoError::Misuse("a register needs at least one qubit".into()));
    }
    let repr = match spec {
        StateSpec::Hadamard => Representation::Structured(Structured::Hadamard),
        StateSpec::Ghz => Representation::Structured(Structured::Ghz),
        StateSpec::AllZero => Representation::Structured(Structured::AllZero),
        StateSpec::W => Representation::Structured(Structured::W),
        StateSpec::Product(sites) => {
            if sites.len() != n_qubits {
                return Err(DecoError::Misuse(format!(
                    "product state has {} sites, register has {n_qubits}",
                    sites.len()
                )));
            }
            let mut out = Vec::with_capacity(sites.len());
            for (i, [a, b]) in sites.into_iter().enumerate() {
                let ns = a.norm_sqr() + b.norm_sqr();
                let scale = renormalize(ns, &format!("site {i} amplitudes"))?;
                match scale {
                    Some(s) => out.push([a * s, b * s]),
                    None => out.push([a, b]),
                }
            }
            Representation::Structured(Structured::Product(out))
        }
        StateSpec::Sparse(entries) => {
            if n_qubits > 64 {
                return Err(DecoError::Misuse(
                    "sparse states support at most 64 qubits".into(),
                ));
            }
            let mut map: BTreeMap<u64, Complex<R>> = BTreeMap::new();
            for (idx, amp) in entries {
                if n_qubits < 64 && idx >> n_qubits != 0 {
                    return Err(DecoError::BasisIndex {
                        index: idx,
                        n_qubits,
                    });
                }
                let e = map.entry(idx).or_insert_with(|| Complex::new(R::zero(), R::zero()));
                *e = *e + amp;
            }
            map.retain(|_, a| a.norm_sqr() > R::zero());
            let ns = map.values().fold(R::zero(), |s, a| s + a.norm_sqr());
            if let Some(s) = renormalize(ns, "sparse amplitude vector")? {
                for a in map.values_mut() {
                    *a = *a * s;
                }
            }
            Representation::Sparse(map)
        }
    };
    Ok(RegisterState { n_qubits, repr })
}

fn bit(b: u64, i: usize) -> bool {
    (b >> i) & 1 == 1
}

fn z_sign<R: Real>(b: u64, i: usize) -> R {
    if bit(b, i) {
        R::one()
    } else {
        -R::one()
    }
}

impl<R: Real> RegisterState<R> {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn representation(&self) -> &Representation<R> {
        &self.repr
    }

    pub fn is_structured(&self) -> bool {
        matches!(self.repr, Representation::Structured(_))
    }

    /// Every site carries the same one-site marginal and every pair the
    /// same two-site correlations.
    pub fn is_site_symmetric(&self) -> bool {
        matches!(
            self.repr,
            Representation::Structured(
                Structured::Hadamard | Structured::Ghz | Structured::AllZero | Structured::W
            )
        )
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_qubits {
            Err(DecoError::SiteOutOfRange {
                site,
                n_sites: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    /// `⟨σ_axis^site⟩`.
    pub fn expect_pauli(&self, site: usize, axis: Axis) -> Result<R> {
        self.check_site(site)?;
        let n = self.n_qubits;
        let one = R::one();
        let v = match &self.repr {
            Representation::Structured(s) => match (s, axis) {
                (Structured::Hadamard, Axis::X) => one,
                (Structured::Hadamard, Axis::Z) => R::zero(),
                (Structured::Ghz, Axis::X) => {
                    if n == 1 {
                        one
                    } else {
                        R::zero()
                    }
                }
                (Structured::Ghz, Axis::Z) => R::zero(),
                (Structured::AllZero, Axis::X) => R::zero(),
                (Structured::AllZero, Axis::Z) => -one,
                (Structured::W, Axis::X) => R::zero(),
                (Structured::W, Axis::Z) => {
                    let nn = R::from_usize_lossy(n);
                    (R::lit(2.0) - nn) / nn
                }
                (Structured::Product(p), Axis::X) => {
                    let [a, b] = p[site];
                    R::lit(2.0) * (a.conj() * b).re
                }
                (Structured::Product(p), Axis::Z) => {
                    let [a, b] = p[site];
                    b.norm_sqr() - a.norm_sqr()
                }
            },
            Representation::Sparse(map) => match axis {
                Axis::Z => map
                    .iter()
                    .fold(R::zero(), |s, (&b, c)| s + c.norm_sqr() * z_sign::<R>(b, site)),
                Axis::X => {
                    let mask = 1u64 << site;
                    map.iter().fold(R::zero(), |s, (&b, c)| match map.get(&(b ^ mask)) {
                        Some(d) => s + (d.conj() * c).re,
                        None => s,
                    })
                }
            },
        };
        Ok(v)
    }

    /// `⟨σ_A^i σ_B^j⟩` for `i ≠ j`.
    ///
    /// Same-site products are rejected: `σ_A^i σ_A^i = 1` and the mixed
    /// same-site product is not an X/Z observable.
    pub fn expect_pauli_pair(&self, i: usize, j: usize, a: Axis, b: Axis) -> Result<R> {
        self.check_site(i)?;
        self.check_site(j)?;
        if i == j {
            return Err(DecoError::Misuse(format!(
                "expect_pauli_pair called with i = j = {i}; use σ² = 1 for same-site terms"
            )));
        }
        let n = self.n_qubits;
        let one = R::one();
        let v = match &self.repr {
            Representation::Structured(s) => match s {
                Structured::Hadamard | Structured::AllZero | Structured::Product(_) => {
                    self.expect_pauli(i, a)? * self.expect_pauli(j, b)?
                }
                Structured::Ghz => match (a, b) {
                    (Axis::Z, Axis::Z) => one,
                    (Axis::X, Axis::X) => {
                        if n == 2 {
                            one
                        } else {
                            R::zero()
                        }
                    }
                    _ => R::zero(),
                },
                Structured::W => {
                    let nn = R::from_usize_lossy(n);
                    match (a, b) {
                        (Axis::X, Axis::X) => R::lit(2.0) / nn,
                        (Axis::Z, Axis::Z) => (nn - R::lit(4.0)) / nn,
                        _ => R::zero(),
                    }
                }
            },
            Representation::Sparse(map) => {
                let mut flip = 0u64;
                if a == Axis::X {
                    flip |= 1 << i;
                }
                if b == Axis::X {
                    flip |= 1 << j;
                }
                map.iter().fold(R::zero(), |s, (&basis, c)| {
                    let mut w = *c;
                    if a == Axis::Z {
                        w = w * z_sign::<R>(basis, i);
                    }
                    if b == Axis::Z {
                        w = w * z_sign::<R>(basis, j);
                    }
                    match map.get(&(basis ^ flip)) {
                        Some(d) => s + (d.conj() * w).re,
                        None => s,
                    }
                })
            }
        };
        Ok(v)
    }

    /// Covariance `⟨σ_A^i σ_B^j⟩ − ⟨σ_A^i⟩⟨σ_B^j⟩` with the same-site
    /// convention used by the variance engine: `σ_A² = 1` on the diagonal and
    /// the symmetrized mixed product `½⟨{σ_X, σ_Z}⟩ = 0`.
    ///
    /// Sparse states evaluate `Re⟨(σ_A^i − ⟨σ_A^i⟩)ψ|(σ_B^j − ⟨σ_B^j⟩)ψ⟩`, so
    /// rounding scales with the covariance rather than with the products.
    pub fn covariance(&self, i: usize, j: usize, a: Axis, b: Axis) -> Result<R> {
        let ea = self.expect_pauli(i, a)?;
        let eb = self.expect_pauli(j, b)?;
        if let Representation::Sparse(map) = &self.repr {
            let zero = Complex::new(R::zero(), R::zero());
            let amp = |basis: u64| map.get(&basis).copied().unwrap_or(zero);
            let centered = |basis: u64, site: usize, axis: Axis, mean: R| match axis {
                Axis::X => amp(basis ^ (1u64 << site)) - amp(basis) * mean,
                Axis::Z => amp(basis) * (z_sign::<R>(basis, site) - mean),
            };
            let term = |basis: u64| (centered(basis, i, a, ea).conj() * centered(basis, j, b, eb)).re;
            let mut sum = map.keys().fold(R::zero(), |s, &basis| s + term(basis));
            if a == Axis::X {
                let mask = 1u64 << i;
                sum = map
                    .keys()
                    .map(|&basis| basis ^ mask)
                    .filter(|f| !map.contains_key(f))
                    .fold(sum, |s, f| s + term(f));
            }
            return Ok(sum);
        }
        let prod = if i == j {
            if a == b {
                R::one()
            } else {
                R::zero()
            }
        } else {
            self.expect_pauli_pair(i, j, a, b)?
        };
        Ok(prod - ea * eb)
    }

    /// True when the `(A, B)` covariance vanishes for every pair `i ≠ j`,
    /// known analytically. Sparse states answer `false`.
    pub fn offdiag_covariance_vanishes(&self, a: Axis, b: Axis) -> bool {
        let n = self.n_qubits;
        match &self.repr {
            Representation::Structured(s) => match s {
                Structured::Hadamard | Structured::AllZero | Structured::Product(_) => true,
                Structured::Ghz => match (a, b) {
                    (Axis::X, Axis::X) => n != 2,
                    (Axis::Z, Axis::Z) => n == 1,
                    _ => true,
                },
                Structured::W => match (a, b) {
                    (Axis::X, Axis::Z) | (Axis::Z, Axis::X) => true,
                    (Axis::X, Axis::X) => n == 1,
                    // ⟨σzσz⟩ − ⟨σz⟩² = (N−4)/N − (N−2)²/N² = −4(N−1)/N²
                    (Axis::Z, Axis::Z) => n == 1,
                },
            },
            Representation::Sparse(_) => n == 1,
        }
    }

    /// Whether `⟨σ_X^i σ_X^j⟩ = ⟨σ_X^i⟩⟨σ_X^j⟩` for all `i ≠ j` within `tol`.
    ///
    /// Structured states answer analytically; sparse states are checked
    /// exhaustively up to [`EXHAUSTIVE_MAX_QUBITS`] qubits.
    pub fn is_uncorrelated(&self, tol: R) -> Result<bool> {
        if tol <= R::zero() {
            return Err(DecoError::Misuse("tolerance must be positive".into()));
        }
        if self.is_structured() {
            return Ok(self.offdiag_covariance_vanishes(Axis::X, Axis::X));
        }
        if self.n_qubits > EXHAUSTIVE_MAX_QUBITS {
            return Err(DecoError::Unsupported(format!(
                "exhaustive correlation check refused for {} qubits (limit {EXHAUSTIVE_MAX_QUBITS}); \
                 sample pairs explicitly",
                self.n_qubits
            )));
        }
        for i in 0..self.n_qubits {
            for j in (i + 1)..self.n_qubits {
                if self.covariance(i, j, Axis::X, Axis::X)?.abs() > tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Expands to the sparse representation (at most 20 qubits).
    pub fn materialize(&self) -> Result<RegisterState<R>> {
        let n = self.n_qubits;
        let map = match &self.repr {
            Representation::Sparse(m) => m.clone(),
            Representation::Structured(s) => {
                if n > EXHAUSTIVE_MAX_QUBITS {
                    return Err(DecoError::Dimension {
                        dim: n,
                        limit: EXHAUSTIVE_MAX_QUBITS,
                    });
                }
                let mut m = BTreeMap::new();
                let c = |v: R| Complex::new(v, R::zero());
                match s {
                    Structured::AllZero => {
                        m.insert(0, c(R::one()));
                    }
                    Structured::Ghz => {
                        let h = c(R::lit(0.5).sqrt());
                        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
                        m.insert(0, h);
                        let e = m.entry(all).or_insert(c(R::zero()));
                        *e = *e + h;
                    }
                    Structured::W => {
                        let a = c(R::one() / R::from_usize_lossy(n).sqrt());
                        for i in 0..n {
                            m.insert(1u64 << i, a);
                        }
                    }
                    Structured::Hadamard => {
                        let a = c(R::lit(0.5).powi(n as i32).sqrt());
                        for b in 0..(1u64 << n) {
                            m.insert(b, a);
                        }
                    }
                    Structured::Product(p) => {
                        for b in 0..(1u64 << n) {
                            let amp = (0..n).fold(c(R::one()), |acc, i| {
                                acc * if bit(b, i) { p[i][1] } else { p[i][0] }
                            });
                            if amp.norm_sqr() > R::zero() {
                                m.insert(b, amp);
                            }
                        }
                    }
                }
                m
            }
        };
        Ok(RegisterState {
            n_qubits: n,
            repr: Representation::Sparse(map),
        })
    }

    /// Dense amplitude vector in the basis-index order (at most 20 qubits).
    pub fn dense_amplitudes(&self) -> Result<Vec<Complex<R>>> {
        let sparse = self.materialize()?;
        let mut v = vec![Complex::new(R::zero(), R::zero()); 1usize << self.n_qubits];
        if let Representation::Sparse(m) = &sparse.repr {
            for (&b, &a) in m {
                v[b as usize] = a;
            }
        }
        Ok(v)
    }

    /// Multiplies every amplitude by a global phase.
    pub fn with_global_phase(&self, phase: R) -> Result<RegisterState<R>> {
        let mut s = self.materialize()?;
        let rot = Complex::new(phase.cos(), phase.sin());
        if let Representation::Sparse(m) = &mut s.repr {
            for a in m.values_mut() {
                *a = *a * rot;
            }
        }
        Ok(s)
    }

    /// Relabels qubits: new qubit `perm[i]` carries old qubit `i`.
    pub fn permuted(&self, perm: &[usize]) -> Result<RegisterState<R>> {
        if perm.len() != self.n_qubits {
            return Err(DecoError::Misuse("permutation length mismatch".into()));
        }
        let s = self.materialize()?;
        let mut out = BTreeMap::new();
        if let Representation::Sparse(m) = &s.repr {
            for (&b, &a) in m {
                let nb = (0..self.n_qubits).fold(0u64, |acc, i| {
                    if bit(b, i) {
                        acc | (1u64 << perm[i])
                    } else {
                        acc
                    }
                });
                out.insert(nb, a);
            }
        }
        Ok(RegisterState {
            n_qubits: self.n_qubits,
            repr: Representation::Sparse(out),
        })
    }
}

/// Parses the two-column sparse text format: `index re,im` per line,
/// `#` comments and blank lines ignored.
pub fn parse_sparse_text(text: &str) -> Result<Vec<(u64, Complex<f64>)>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let (Some(idx), Some(amp), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(DecoError::Parse(format!(
                "line {}: expected `index re,im`",
                ln + 1
            )));
        };
        let index: u64 = idx
            .parse()
            .map_err(|e| DecoError::Parse(format!("line {}: index `{idx}`: {e}", ln + 1)))?;
        let (re, im) = match amp.split_once(',') {
            Some((r, i)) => (r, i),
            None => (amp, "0"),
        };
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|e| DecoError::Parse(format!("line {}: amplitude `{amp}`: {e}", ln + 1)))
        };
        out.push((index, Complex::new(parse(re)?, parse(im)?)));
    }
    Ok(out)
}

pub fn load_sparse_state(path: &Path, n_qubits: usize) -> Result<RegisterState<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| DecoError::io(path.display().to_string(), e))?;
    build_state(StateSpec::Sparse(parse_sparse_text(&text)?), n_qubits)
}

/// Cavity ancilla state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CavityState<R> {
    Vacuum,
    Fock(u32),
    Coherent { re: R, im: R },
}

/// Moments `⟨b⟩, ⟨b†⟩, ⟨b†b⟩, ⟨bb†⟩, ⟨b²⟩, ⟨b†²⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityMoments<R: Real> {
    pub b: Complex<R>,
    pub bdag: Complex<R>,
    pub bdag_b: R,
    pub b_bdag: R,
    pub b2: Complex<R>,
    pub bdag2: Complex<R>,
}

pub fn cavity_moments<R: Real>(cs: CavityState<R>) -> CavityMoments<R> {
    let zero = Complex::new(R::zero(), R::zero());
    match cs {
        CavityState::Vacuum => cavity_moments(CavityState::Fock(0)),
        CavityState::Fock(n) => {
            let n = R::lit(n as f64);
            CavityMoments {
                b: zero,
                bdag: zero,
                bdag_b: n,
                b_bdag: n + R::one(),
                b2: zero,
                bdag2: zero,
            }
        }
        CavityState::Coherent { re, im } => {
            let a = Complex::new(re, im);
            let n = a.norm_sqr();
            CavityMoments {
                b: a,
                bdag: a.conj(),
                bdag_b: n,
                b_bdag: n + R::one(),
                b2: a * a,
                bdag2: (a * a).conj(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn hadamard_is_symbolic_at_large_n() {
        let s = build_state::<f64>(StateSpec::Hadamard, 10_000).unwrap();
        assert!(s.is_structured());
        assert_eq!(s.expect_pauli(9_999, Axis::X).unwrap(), 1.0);
        assert_eq!(s.expect_pauli_pair(3, 7, Axis::X, Axis::X).unwrap(), 1.0);
    }

    #[test]
    fn ghz3_materializes_to_two_amplitudes() {
        let s = build_state::<f64>(StateSpec::Ghz, 3).unwrap().materialize().unwrap();
        let Representation::Sparse(m) = s.representation() else { panic!() };
        assert_eq!(m.len(), 2);
        assert!((m[&0].re - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((m[&7].re - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sparse_stored_as_given() {
        let s = build_state(StateSpec::Sparse(vec![(0, c(0.6)), (3, c(0.8))]), 2).unwrap();
        let Representation::Sparse(m) = s.representation() else { panic!() };
        assert_eq!(m[&0], c(0.6));
        assert_eq!(m[&3], c(0.8));
    }

    #[test]
    fn sparse_errors() {
        assert!(matches!(
            build_state(StateSpec::Sparse(vec![(0, c(0.0))]), 2),
            Err(DecoError::Normalization(_))
        ));
        assert!(matches!(
            build_state(StateSpec::Sparse(vec![(4, c(1.0))]), 2),
            Err(DecoError::BasisIndex { index: 4, .. })
        ));
        assert!(matches!(
            build_state(StateSpec::Sparse(vec![(0, c(1.0)), (1, c(1.0))]), 2),
            Err(DecoError::Normalization(_))
        ));
        // small deviation renormalized silently
        let s = build_state(StateSpec::Sparse(vec![(0, c(1.0 + 1e-8))]), 1).unwrap();
        let Representation::Sparse(m) = s.representation() else { panic!() };
        assert!((m[&0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ghz_expectations() {
        for n in [2usize, 3, 7] {
            let s = build_state::<f64>(StateSpec::Ghz, n).unwrap();
            assert_eq!(s.expect_pauli(1, Axis::X).unwrap(), 0.0);
            assert_eq!(s.expect_pauli(1, Axis::Z).unwrap(), 0.0);
            assert_eq!(s.expect_pauli_pair(0, 1, Axis::Z, Axis::Z).unwrap(), 1.0);
        }
        let g3 = build_state::<f64>(StateSpec::Ghz, 3).unwrap();
        assert_eq!(g3.expect_pauli_pair(0, 1, Axis::X, Axis::X).unwrap(), 0.0);
        let g2 = build_state::<f64>(StateSpec::Ghz, 2).unwrap();
        assert_eq!(g2.expect_pauli_pair(0, 1, Axis::X, Axis::X).unwrap(), 1.0);
    }

    #[test]
    fn brute_force_ghz3_xx_is_zero() {
        // 8-dim inner product ⟨GHZ|σx⊗σx⊗1|GHZ⟩ computed on the dense vector.
        let v = build_state::<f64>(StateSpec::Ghz, 3).unwrap().dense_amplitudes().unwrap();
        let mut acc = 0.0;
        for b in 0..8usize {
            acc += v[b ^ 0b011].re * v[b].re;
        }
        assert_eq!(acc, 0.0);
        let s = build_state::<f64>(StateSpec::Ghz, 3).unwrap().materialize().unwrap();
        assert_eq!(s.expect_pauli_pair(0, 1, Axis::X, Axis::X).unwrap(), 0.0);
    }

    #[test]
    fn same_site_pair_is_misuse() {
        let s = build_state::<f64>(StateSpec::Hadamard, 3).unwrap();
        assert!(matches!(
            s.expect_pauli_pair(1, 1, Axis::X, Axis::X),
            Err(DecoError::Misuse(_))
        ));
        assert!(matches!(
            s.expect_pauli(3, Axis::X),
            Err(DecoError::SiteOutOfRange { .. })
        ));
    }

    #[test]
    fn uncorrelated_classification() {
        let tol = 1e-12;
        let h = build_state::<f64>(StateSpec::Hadamard, 5).unwrap();
        assert!(h.is_uncorrelated(tol).unwrap());
        let z = build_state::<f64>(StateSpec::AllZero, 5).unwrap();
        assert!(z.is_uncorrelated(tol).unwrap());
        let g2 = build_state::<f64>(StateSpec::Ghz, 2).unwrap();
        assert!(!g2.is_uncorrelated(tol).unwrap());
        assert!(!g2.materialize().unwrap().is_uncorrelated(tol).unwrap());
        let big = build_state(StateSpec::Sparse(vec![(0, c(1.0))]), 21).unwrap();
        assert!(matches!(big.is_uncorrelated(tol), Err(DecoError::Unsupported(_))));
    }

    #[test]
    fn cavity_moment_values() {
        let v = cavity_moments::<f64>(CavityState::Vacuum);
        assert_eq!((v.bdag_b, v.b_bdag), (0.0, 1.0));
        assert_eq!(v.b2.norm(), 0.0);
        let f = cavity_moments::<f64>(CavityState::Fock(2));
        assert_eq!((f.bdag_b, f.b_bdag, f.b.norm()), (2.0, 3.0, 0.0));
        let a = Complex::new(0.3f64, -1.2);
        let co = cavity_moments(CavityState::Coherent { re: a.re, im: a.im });
        assert_eq!(co.b, a);
        assert!((co.bdag_b - a.norm_sqr()).abs() < 1e-15);
        assert_eq!(co.b2, a * a);
    }

    #[test]
    fn sparse_text_format() {
        let parsed = parse_sparse_text("# ghz\n0 0.70710678118654752,0\n3 0,0.70710678118654752\n").unwrap();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[1].0, 3);
        assert!((parsed[1].1.im - 0.5f64.sqrt()).abs() < 1e-16);
        assert!(parse_sparse_text("0 1,0 extra").is_err());
    }
}
