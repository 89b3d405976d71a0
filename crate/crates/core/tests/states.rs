use decotime_core::states::{
    build_state, cavity_moments, parse_sparse_text, Axis, CavityState, RegisterState, Representation, StateSpec,
};
use decotime_core::DecoError;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const AXES: [Axis; 2] = [Axis::X, Axis::Z];

#[test]
fn pauli_examples() {
    let h = build_state::<f64>(StateSpec::Hadamard, 5).unwrap();
    let g2 = build_state::<f64>(StateSpec::Ghz, 2).unwrap();
    let g3 = build_state::<f64>(StateSpec::Ghz, 3).unwrap();
    assert_eq!(h.expect_pauli(4, Axis::X).unwrap(), 1.0);
    assert_eq!(h.expect_pauli_pair(0, 4, Axis::X, Axis::X).unwrap(), 1.0);
    for i in 0..3 {
        assert_eq!(g3.expect_pauli(i, Axis::X).unwrap(), 0.0);
        assert_eq!(g3.expect_pauli(i, Axis::Z).unwrap(), 0.0);
    }
    assert_eq!(g3.expect_pauli_pair(0, 1, Axis::X, Axis::X).unwrap(), 0.0);
    assert_eq!(g2.expect_pauli_pair(0, 1, Axis::X, Axis::X).unwrap(), 1.0);
    assert_eq!(g3.expect_pauli_pair(0, 2, Axis::Z, Axis::Z).unwrap(), 1.0);
}

#[test]
fn pauli_errors() {
    let h = build_state::<f64>(StateSpec::Hadamard, 3).unwrap();
    assert!(matches!(h.expect_pauli(3, Axis::X), Err(DecoError::SiteOutOfRange { .. })));
    assert!(matches!(h.expect_pauli_pair(1, 1, Axis::X, Axis::X), Err(DecoError::Misuse(_))));
    let err = build_state(StateSpec::Sparse(vec![(4, c(1.0, 0.0))]), 2).unwrap_err();
    assert!(matches!(err, DecoError::BasisIndex { index: 4, n_qubits: 2 }));
    assert!(matches!(
        build_state(StateSpec::Sparse(vec![(0, c(0.5, 0.0))]), 1),
        Err(DecoError::Normalization(_))
    ));
}

#[test]
fn uncorrelated_examples() {
    let tol = 1e-12;
    assert!(build_state::<f64>(StateSpec::Hadamard, 8).unwrap().is_uncorrelated(tol).unwrap());
    assert!(build_state::<f64>(StateSpec::AllZero, 8).unwrap().is_uncorrelated(tol).unwrap());
    assert!(!build_state::<f64>(StateSpec::Ghz, 2).unwrap().is_uncorrelated(tol).unwrap());
    let big = build_state(StateSpec::Sparse(vec![(0, c(1.0, 0.0))]), 21).unwrap();
    assert!(matches!(big.is_uncorrelated(tol), Err(DecoError::Unsupported(_))));
}

#[test]
fn cavity_moment_examples() {
    let v = cavity_moments(CavityState::<f64>::Vacuum);
    assert_eq!((v.b, v.bdag_b, v.b_bdag, v.b2), (c(0.0, 0.0), 0.0, 1.0, c(0.0, 0.0)));
    let a = c(0.3, -0.4);
    let m = cavity_moments(CavityState::Coherent { re: a.re, im: a.im });
    assert_eq!(m.b, a);
    assert!((m.bdag_b - a.norm_sqr()).abs() < 1e-15);
    assert_eq!(m.b2, a * a);
    let f = cavity_moments(CavityState::<f64>::Fock(2));
    assert_eq!((f.b, f.bdag_b, f.b_bdag), (c(0.0, 0.0), 2.0, 3.0));
}

#[test]
fn sparse_file_format() {
    let entries = parse_sparse_text("# amplitudes\n0 0.6\n3 0.0,0.8  # trailing\n").unwrap();
    assert_eq!(entries, vec![(0, c(0.6, 0.0)), (3, c(0.0, 0.8))]);
    assert!(parse_sparse_text("0 zero\n").is_err());
    assert!(parse_sparse_text("0 0.6 0\n").is_err());
}

#[test]
fn generic_over_f32() {
    let s = build_state::<f32>(StateSpec::W, 4).unwrap();
    let m = s.materialize().unwrap();
    let x = m.expect_pauli_pair(0, 1, Axis::X, Axis::X).unwrap();
    assert!((x - 0.5).abs() < 1e-6);
}

fn product_strategy(n: usize) -> impl Strategy<Value = Vec<[Complex64; 2]>> {
    prop::collection::vec((0.0f64..std::f64::consts::PI, 0.0f64..std::f64::consts::TAU), n).prop_map(|v| {
        v.into_iter()
            .map(|(th, ph)| [c((th / 2.0).cos(), 0.0), Complex64::from_polar((th / 2.0).sin(), ph)])
            .collect()
    })
}

fn sparse_strategy(max_n: usize) -> impl Strategy<Value = (usize, Vec<(u64, Complex64)>)> {
    (1..=max_n).prop_flat_map(|n| {
        let dim = 1u64 << n;
        (
            Just(n),
            prop::collection::vec((0..dim, -1.0f64..1.0, -1.0f64..1.0), 1..12).prop_map(|v| {
                let norm: f64 = v.iter().map(|(_, a, b)| a * a + b * b).sum::<f64>();
                let s = if norm > 0.0 { 1.0 / norm.sqrt() } else { 0.0 };
                v.into_iter().map(|(i, a, b)| (i, c(a * s, b * s))).collect()
            }),
        )
    })
}

/// `⟨σ⟩` by explicit dense action.
fn brute_pauli(amps: &[Complex64], ops: &[(usize, Axis)]) -> f64 {
    let mut out = Complex64::new(0.0, 0.0);
    for (b, a) in amps.iter().enumerate() {
        let mut idx = b;
        let mut sign = 1.0;
        for &(site, axis) in ops.iter().rev() {
            match axis {
                Axis::X => idx ^= 1 << site,
                Axis::Z => sign *= if (idx >> site) & 1 == 1 { 1.0 } else { -1.0 },
            }
        }
        out += amps[idx].conj() * a * sign;
    }
    out.re
}

fn x_covariance(s: &RegisterState<f64>) -> DMatrix<f64> {
    let n = s.n_qubits();
    DMatrix::from_fn(n, n, |i, j| s.covariance(i, j, Axis::X, Axis::X).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sparse_expectations_match_dense((n, entries) in sparse_strategy(6)) {
        let Ok(s) = build_state(StateSpec::Sparse(entries), n) else { return Ok(()) };
        let amps = s.dense_amplitudes().unwrap();
        for i in 0..n {
            for a in AXES {
                let e = s.expect_pauli(i, a).unwrap();
                prop_assert!(e.abs() <= 1.0 + 1e-12);
                prop_assert!((e - brute_pauli(&amps, &[(i, a)])).abs() < 1e-12);
                for j in (0..n).filter(|j| *j != i) {
                    for b in AXES {
                        let p = s.expect_pauli_pair(i, j, a, b).unwrap();
                        prop_assert!(p.abs() <= 1.0 + 1e-12);
                        prop_assert!((p - brute_pauli(&amps, &[(i, a), (j, b)])).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn structured_matches_materialized(n in 1usize..=12, which in 0usize..4, sites in product_strategy(12)) {
        let spec = match which {
            0 => StateSpec::Hadamard,
            1 => StateSpec::Ghz,
            2 => StateSpec::W,
            _ => StateSpec::Product(sites[..n].to_vec()),
        };
        let s = build_state(spec, n).unwrap();
        let m = s.materialize().unwrap();
        prop_assert!(matches!(m.representation(), Representation::Sparse(_)));
        for i in 0..n {
            for a in AXES {
                prop_assert!((s.expect_pauli(i, a).unwrap() - m.expect_pauli(i, a).unwrap()).abs() < 1e-12);
                for j in (0..n).filter(|j| *j != i).take(3) {
                    for b in AXES {
                        let d = s.expect_pauli_pair(i, j, a, b).unwrap() - m.expect_pauli_pair(i, j, a, b).unwrap();
                        prop_assert!(d.abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn x_covariance_is_psd((n, entries) in sparse_strategy(6)) {
        let Ok(s) = build_state(StateSpec::Sparse(entries), n) else { return Ok(()) };
        let m = x_covariance(&s);
        let min = m.symmetric_eigenvalues().min();
        prop_assert!(min > -1e-12, "smallest eigenvalue {min}");
    }

    #[test]
    fn product_states_are_uncorrelated(sites in product_strategy(5)) {
        let s = build_state(StateSpec::Product(sites), 5).unwrap();
        prop_assert!(s.is_uncorrelated(1e-12).unwrap());
        prop_assert!(s.materialize().unwrap().is_uncorrelated(1e-10).unwrap());
    }
}
