mod common;

use common::{bench, closed_form_gap, random_product, random_setup, random_sparse, rel, setup};
use decotime_core::modesums::{extract_f, se_cross_sum_sites, se_diagonal_closed_form, se_diagonal_sum};
use decotime_core::oracle::{run_suite, Suite};
use decotime_core::states::{build_state, CavityState, StateSpec};
use decotime_core::tau2::{scaling_sweep, tau2_closed_form, tau2_general, StateClass, SweepOptions};
use decotime_core::vibrations::{build_coupling_matrix, chain_band, solve_normal_modes, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn hadamard_timescale() -> Outcome {
    let s = setup(bench());
    let n = 10_000;
    let h = build_state(StateSpec::Hadamard, n).map_err(|e| e.to_string())?;
    let r = tau2_closed_form(StateClass::Hadamard, &h, &s.model, Some(&s.modes), 0.0).map_err(|e| e.to_string())?;
    let want = 1.0 / (1e6 * (2.0 * n as f64).sqrt());
    ensure(
        rel(r.tau2, want) < 1e-9 && r.tau2 > 1e-9 && r.tau2 < 1e-7,
        format!("tau2 = {:.6e} s, expected {want:.6e} s", r.tau2),
    )
}

fn ghz_timescale() -> Outcome {
    let s = setup(bench());
    let g = build_state(StateSpec::Ghz, 10_000).map_err(|e| e.to_string())?;
    let r = tau2_closed_form(StateClass::Ghz, &g, &s.model, Some(&s.modes), 0.0).map_err(|e| e.to_string())?;
    ensure(r.tau2 >= 1e-18 && r.tau2 <= 1e-16, format!("tau2 = {:.3e} s", r.tau2))
}

fn scaling_exponent() -> Outcome {
    let n_list: Vec<usize> = (2..=8).map(|e| 10usize.pow(e)).collect();
    let mut out = Vec::new();
    let mut ok = true;
    for spec in [StateSpec::Hadamard, StateSpec::Ghz] {
        let t = scaling_sweep(&bench(), &spec, &n_list, SweepOptions::default()).map_err(|e| e.to_string())?;
        ok &= (t.slope + 0.5).abs() < 1e-3;
        out.push(format!("{} slope {:.6}", t.state, t.slope));
    }
    ensure(ok, out.join(", "))
}

fn mode_sum_closed_form() -> Outcome {
    let m = bench();
    let q = se_diagonal_sum(&m, 0.0).map_err(|e| e.to_string())?.value;
    let c = se_diagonal_closed_form(&m, 0.0).value;
    let order = 1e31;
    ensure(
        rel(q, c) < 1e-8 && q > order / 10.0 && q < order * 10.0,
        format!("quadrature {q:.6e}, closed form {c:.6e}, relative gap {:.1e}", rel(q, c)),
    )
}

fn f_asymptotic() -> Outcome {
    let f = |x: f64| extract_f(x, 0.0).map_err(|e| e.to_string());
    let mut worst: f64 = 0.0;
    for k in 0..=20 {
        let x = 10f64.powf(2.0 + 0.1 * k as f64);
        let slope = (f(1.01 * x)? / f(x / 1.01)?).ln() / (1.01f64 * 1.01).ln();
        worst = worst.max((slope + 4.0).abs());
    }
    let f3 = f(1e3)?.abs();
    let f0 = extract_f(0.0, 0.0).map_err(|e| e.to_string())?;
    ensure(
        worst < 0.1 && f3 > 1e-13 && f3 < 1e-11 && (f0 - 1.0).abs() < 1e-6,
        format!("max |slope + 4| = {worst:.3}, |F(1e3)| = {f3:.3e}, F(0) = {f0:.9}"),
    )
}

fn independent_decoherence() -> Outcome {
    let s = setup(bench());
    let g = build_state(StateSpec::Ghz, 10_000).map_err(|e| e.to_string())?;
    let r = tau2_general(&g, CavityState::Vacuum, &s.terms, 0.0).map_err(|e| e.to_string())?;
    let frac = r.label_cross_fraction("SE-dipole").abs();
    // the bath correlation between neighbours, independent of the state
    let m = s.model.model();
    let pair = se_cross_sum_sites(m, 0, 1, 0.0).map_err(|e| e.to_string())?.value;
    let diag = se_diagonal_sum(m, 0.0).map_err(|e| e.to_string())?.value;
    let ratio = (pair / diag).abs();
    ensure(
        frac < 1e-6 && ratio < 1e-6,
        format!("SE cross-site fraction {frac:.3e}, neighbour/diagonal mode sum {ratio:.3e} at d = 1e-6 m"),
    )
}

fn hadamard_se_immunity() -> Outcome {
    let s = setup(bench());
    let h = build_state(StateSpec::Hadamard, 10_000).map_err(|e| e.to_string())?;
    let r = tau2_general(&h, CavityState::Vacuum, &s.terms, 0.0).map_err(|e| e.to_string())?;
    let se = r.entry("SE-dipole");
    ensure(se == 0.0, format!("SE-dipole entry {se:e}"))
}

fn oracle_regression() -> Outcome {
    let results = run_suite(Suite::Full);
    let mut failed = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, r) in &results {
        match r {
            Ok(c) if c.passed => worst = worst.max(c.deviation),
            Ok(c) => failed.push(format!("{name} (deviation {:.2e})", c.deviation)),
            Err(e) => failed.push(format!("{name} ({e})")),
        }
    }
    ensure(
        results.len() >= 10 && failed.is_empty(),
        format!("{} specs, max deviation {worst:.2e}, failed: [{}]", results.len(), failed.join(", ")),
    )
}

fn engine_formula_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let classes = [
        StateClass::SeStationary,
        StateClass::CorrelatedVacuum,
        StateClass::UncorrelatedVacuum,
        StateClass::Hadamard,
        StateClass::Ghz,
        StateClass::NoSe,
    ];
    for class in classes {
        for _ in 0..100 {
            let n_min = if class == StateClass::Ghz { 3 } else { 1 };
            let n = rng.gen_range(n_min..=10);
            let (s, t) = random_setup(n, &mut rng);
            let state = match class {
                StateClass::UncorrelatedVacuum => random_product(n, &mut rng),
                StateClass::Hadamard => build_state(StateSpec::Hadamard, n).map_err(|e| e.to_string())?,
                StateClass::Ghz => build_state(StateSpec::Ghz, n).map_err(|e| e.to_string())?,
                _ => random_sparse(n, 16, &mut rng),
            };
            worst = worst.max(closed_form_gap(class, &s, &state, t)?);
        }
    }
    ensure(worst < 1e-10, format!("600 trials, max relative gap {worst:.2e}"))
}

fn normal_modes() -> Outcome {
    const HBAR: f64 = 1.054571817e-34;
    const MASS: f64 = 6.6421562664e-26;
    const V0: f64 = 2.6e-12;
    let solve = |n: usize, t: Topology| {
        let cm = build_coupling_matrix(n, MASS, &t).map_err(|e| e.to_string())?;
        solve_normal_modes(&cm, HBAR).map_err(|e| e.to_string())
    };
    let nu = (V0 / MASS).sqrt();
    let ind = solve(8, Topology::Independent { v0: V0 })?;
    let exact = ind.frequencies.iter().all(|f| rel(*f, nu) < 1e-15);
    let mut band_gap: f64 = 0.0;
    let mut resid = ind.orthogonality_residual();
    for n in 1..=64 {
        for ratio in [-0.3, 0.1, 0.45] {
            let c = ratio * V0;
            let nm = solve(n, Topology::Chain1d { v0: V0, c_nn: c })?;
            resid = resid.max(nm.orthogonality_residual());
            let mut axial = nm.frequencies.clone();
            for _ in 0..2 * n {
                let pos = axial
                    .iter()
                    .position(|f| rel(*f, nu) < 1e-12)
                    .ok_or(format!("N = {n}: transverse modes missing"))?;
                axial.remove(pos);
            }
            for (a, b) in axial.iter().zip(chain_band(n, V0, c, MASS)) {
                band_gap = band_gap.max(rel(*a, b));
            }
        }
    }
    ensure(
        exact && band_gap < 1e-9 && resid <= 1e-10,
        format!("independent exact: {exact}, band gap {band_gap:.1e}, orthogonality residual {resid:.1e}"),
    )
}

fn main() -> std::process::ExitCode {
    let criteria: [Criterion; 10] = [
        ("Hadamard timescale without SE", Duration::from_secs(1), hadamard_timescale),
        ("GHZ timescale order", Duration::from_secs(5), ghz_timescale),
        ("inverse square root scaling", Duration::from_secs(5), scaling_exponent),
        ("SE mode-sum closed form", Duration::from_secs(2), mode_sum_closed_form),
        ("F asymptotics", Duration::from_secs(10), f_asymptotic),
        ("independent decoherence", Duration::from_secs(5), independent_decoherence),
        ("Hadamard SE immunity", Duration::from_secs(1), hadamard_se_immunity),
        ("oracle regression", Duration::from_secs(600), oracle_regression),
        ("engine and closed-form equivalence", Duration::from_secs(60), engine_formula_equivalence),
        ("normal modes", Duration::from_secs(5), normal_modes),
    ];
    let mut failures = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
            Err(d) => (false, d),
        };
        failures += usize::from(!ok);
        println!(
            "{} {:>2} {name}: {detail} [{:.3} s]",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            took.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        std::process::ExitCode::SUCCESS
    } else {
        std::process::ExitCode::FAILURE
    }
}
