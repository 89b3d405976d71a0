//! `decotime`: short-time decoherence timescales from a model config.

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use decotime_core::model::{
    build_modes, load_model_file, model_json, resolve_config_path, validate_model, Model, CONFIG_ENV,
};
use decotime_core::modesums::{extract_f, f_closed_form, se_cross_sum, se_diagonal_closed_form, se_diagonal_sum};
use decotime_core::oracle::{compare, corrupted, run_suite, Comparison, Suite};
use decotime_core::states::{build_state, load_sparse_state, RegisterState, StateSpec};
use decotime_core::tau2::{
    assemble_interaction_terms, scaling_sweep, tau2_closed_form, tau2_general, DecoherenceReport, StateClass,
    SweepOptions,
};
use decotime_core::{vec3, DecoError};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const EXIT_REGRESSION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "decotime", version, about = "Short-time decoherence timescales of qubit register models")]
struct Cli {
    /// Model configuration (TOML).
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// More diagnostics on standard error; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decoherence time of one register state.
    Tau2(Tau2Args),
    /// Decoherence time against register size, with the log-log slope.
    Sweep(SweepArgs),
    /// Engine against exact small-system evolution.
    Validate(ValidateArgs),
    /// Spontaneous-emission mode sums.
    Modesum(ModesumArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StateArg {
    Hadamard,
    Ghz,
    Allzero,
    W,
    File,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CaseArg {
    /// Every interaction term through the variance engine.
    General,
    /// Spontaneous emission only.
    Se,
    /// Closed form for the state with the cavity in the vacuum.
    Vacuum,
    /// Closed form without spontaneous emission.
    NoSe,
}

#[derive(Args)]
struct Tau2Args {
    #[arg(long, value_enum, default_value = "hadamard")]
    state: StateArg,
    /// Sparse amplitude file for `--state file`.
    #[arg(long)]
    state_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "general")]
    case: CaseArg,
    /// Bath temperature in K; defaults to the configured one.
    #[arg(long)]
    temp: Option<f64>,
    /// Register size; defaults to the configured one.
    #[arg(long)]
    n: Option<usize>,
    /// Rescale a per-site-uniform result to this register size.
    #[arg(long)]
    extrapolate_n: Option<f64>,
    /// Report JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "hadamard")]
    state: StateArg,
    /// Comma-separated register sizes, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<String>,
    #[arg(long)]
    temp: Option<f64>,
    /// Couplings scaled as `N^p`.
    #[arg(long, default_value_t = 0.0)]
    coupling_exponent: f64,
    /// CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Quick,
    Full,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "quick")]
    suite: SuiteArg,
    /// Flip one coupling sign on the oracle side; every spec should fail.
    #[arg(long)]
    negative_control: bool,
    /// Comparison report JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    Diagonal,
    Cross,
    #[value(name = "F")]
    F,
}

#[derive(Args)]
struct ModesumArgs {
    #[arg(long, value_enum)]
    which: WhichArg,
    /// Separations in m, comma-separated.
    #[arg(long, value_delimiter = ',')]
    dij: Vec<f64>,
    #[arg(long)]
    temp: Option<f64>,
}

/// Provenance record written next to every output file.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    config_path: Option<String>,
    parameter_hash: String,
    outputs: Vec<String>,
    wall_time_s: f64,
    version: String,
}

enum Failure {
    Usage(anyhow::Error),
    Numeric(anyhow::Error),
    Regression(String),
}

impl From<DecoError> for Failure {
    fn from(e: DecoError) -> Self {
        match e {
            DecoError::Numeric(_) | DecoError::Spectral(_) | DecoError::FitWindow(_) | DecoError::Dimension { .. } => {
                Failure::Numeric(anyhow::anyhow!(e.to_string()))
            }
            _ => Failure::Usage(anyhow::anyhow!(e.to_string())),
        }
    }
}

type Outcome = std::result::Result<Vec<PathBuf>, Failure>;

struct RunContext {
    config: Option<PathBuf>,
    args: Vec<String>,
    hash: Sha256,
}

impl RunContext {
    fn model(&mut self) -> std::result::Result<Model, Failure> {
        let path = resolve_config_path(self.config.as_deref())?;
        let model = load_model_file(&path)?;
        self.hash.update(model_json(&model).to_string().as_bytes());
        self.config = Some(path);
        Ok(model)
    }
}

fn write_file(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))
            .map_err(Failure::Usage)?;
    }
    std::fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Usage)
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn state_for(which: StateArg, file: Option<&Path>, n: usize) -> std::result::Result<RegisterState<f64>, Failure> {
    let spec = match which {
        StateArg::Hadamard => StateSpec::Hadamard,
        StateArg::Ghz => StateSpec::Ghz,
        StateArg::Allzero => StateSpec::AllZero,
        StateArg::W => StateSpec::W,
        StateArg::File => {
            let path = file.ok_or_else(|| Failure::Usage(anyhow::anyhow!("--state file needs --state-file")))?;
            return Ok(load_sparse_state(path, n)?);
        }
    };
    Ok(build_state(spec, n)?)
}

fn vacuum_class(state: StateArg) -> StateClass {
    match state {
        StateArg::Hadamard => StateClass::Hadamard,
        StateArg::Ghz => StateClass::Ghz,
        StateArg::Allzero => StateClass::UncorrelatedVacuum,
        StateArg::W | StateArg::File => StateClass::CorrelatedVacuum,
    }
}

fn cmd_tau2(ctx: &mut RunContext, a: &Tau2Args) -> Outcome {
    let mut model = ctx.model()?;
    if let Some(n) = a.n {
        model = model.with_count(n);
    }
    let model = validate_model(model)?;
    let n = model.n_qubits();
    let temperature = a.temp.unwrap_or(model.temperature());
    let modes = build_modes(&model)?;
    let state = state_for(a.state, a.state_file.as_deref(), n)?;
    let mut report: DecoherenceReport = match a.case {
        CaseArg::General => {
            let terms = assemble_interaction_terms(&model, Some(&modes))?;
            tau2_general(&state, model.cavity.state, &terms, temperature)?
        }
        CaseArg::Se => tau2_closed_form(StateClass::SeStationary, &state, &model, Some(&modes), temperature)?,
        CaseArg::Vacuum => tau2_closed_form(vacuum_class(a.state), &state, &model, Some(&modes), temperature)?,
        CaseArg::NoSe => tau2_closed_form(StateClass::NoSe, &state, &model, Some(&modes), temperature)?,
    };
    if let Some(big) = a.extrapolate_n {
        report = report.extrapolated(big)?;
    }
    println!("tau2 = {:.6e} s", report.tau2);
    if let Some(t) = report.approximate_tau2() {
        println!("approximation tau2 = {t:.6e} s");
    }
    for (k, v) in &report.breakdown {
        if *v != 0.0 {
            println!("  {k}: {v:.6e} s^-2");
        }
    }
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Numeric(e.into()))?;
        write_file(out, &format!("{json}\n"))?;
        outputs.push(out.clone());
    }
    Ok(outputs)
}

fn cmd_sweep(ctx: &mut RunContext, a: &SweepArgs) -> Outcome {
    let n_list = a
        .n_list
        .iter()
        .map(|s| {
            let v: f64 = s.trim().parse().map_err(|_| anyhow::anyhow!("bad register size `{s}`"))?;
            if v < 1.0 || v.fract() != 0.0 || v > usize::MAX as f64 {
                anyhow::bail!("register size `{s}` is not a positive integer");
            }
            Ok(v as usize)
        })
        .collect::<anyhow::Result<Vec<usize>>>()
        .map_err(Failure::Usage)?;
    let model = ctx.model()?;
    let spec = match a.state {
        StateArg::Hadamard => StateSpec::Hadamard,
        StateArg::Ghz => StateSpec::Ghz,
        StateArg::Allzero => StateSpec::AllZero,
        StateArg::W => StateSpec::W,
        StateArg::File => return Err(Failure::Usage(anyhow::anyhow!("sweeps need a named state"))),
    };
    let opts = SweepOptions {
        temperature: a.temp.unwrap_or(model.temperature()),
        coupling_exponent: a.coupling_exponent,
    };
    let table = scaling_sweep(&model, &spec, &n_list, opts)?;
    let csv = table.to_csv();
    let mut outputs = Vec::new();
    match &a.out {
        Some(out) => {
            write_file(out, &csv)?;
            outputs.push(out.clone());
        }
        None => print!("{csv}"),
    }
    println!("slope = {:.6}", table.slope);
    Ok(outputs)
}

fn status(c: &Comparison) -> &'static str {
    if c.passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_validate(a: &ValidateArgs) -> Outcome {
    let suite = match a.suite {
        SuiteArg::Quick => Suite::Quick,
        SuiteArg::Full => Suite::Full,
    };
    let results: Vec<(String, decotime_core::Result<Comparison>)> = if a.negative_control {
        let specs = suite.specs();
        std::thread::scope(|sc| {
            let handles: Vec<_> = specs
                .iter()
                .map(|s| sc.spawn(move || (s.name.clone(), compare(s, &corrupted(s)))))
                .collect();
            handles.into_iter().map(|h| h.join().expect("validation worker")).collect()
        })
    } else {
        run_suite(suite)
    };
    let mut failed = 0;
    let mut report = Vec::new();
    for (name, r) in &results {
        match r {
            Ok(c) => {
                println!(
                    "{} {name}: tau2 engine {:.6e}, oracle {:.6e}, deviation {:.2e}, converged {}, dim {}",
                    status(c),
                    c.tau2_engine,
                    c.tau2_oracle,
                    c.deviation,
                    c.truncation_converged,
                    c.dimension
                );
                if !c.passed {
                    failed += 1;
                }
                report.push(serde_json::to_value(c).map_err(|e| Failure::Numeric(e.into()))?);
            }
            Err(e) => {
                println!("FAIL {name}: {e}");
                failed += 1;
                report.push(serde_json::json!({ "name": name, "error": e.to_string() }));
            }
        }
    }
    println!("{} of {} specs passed", results.len() - failed, results.len());
    let mut outputs = Vec::new();
    if let Some(out) = &a.out {
        let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Numeric(e.into()))?;
        write_file(out, &format!("{json}\n"))?;
        outputs.push(out.clone());
    }
    if failed > 0 {
        return Err(Failure::Regression(format!("{failed} of {} specs failed", results.len())));
    }
    Ok(outputs)
}

fn cmd_modesum(ctx: &mut RunContext, a: &ModesumArgs) -> Outcome {
    let model = ctx.model()?;
    let temperature = a.temp.unwrap_or(model.temperature());
    let dir = if model.n_qubits() >= 2 {
        vec3::unit(model.separation(1, 0)).unwrap_or([1.0, 0.0, 0.0])
    } else {
        [1.0, 0.0, 0.0]
    };
    match a.which {
        WhichArg::Diagonal => {
            let q = se_diagonal_sum(&model, temperature)?;
            let cf = se_diagonal_closed_form(&model, temperature);
            println!("value = {:.12e} s^-2", q.value);
            println!("method = {:?}", q.method);
            println!("error estimate = {:.3e} s^-2", q.est_abs_error);
            println!("closed form = {:.12e} s^-2", cf.value);
            println!("sqrt(value) = {:.6e} s^-1", q.value.sqrt());
        }
        WhichArg::Cross => {
            if a.dij.is_empty() {
                return Err(Failure::Usage(anyhow::anyhow!("--which cross needs --dij")));
            }
            let diag = se_diagonal_sum(&model, temperature)?.value;
            for d in &a.dij {
                let r = se_cross_sum(&model, vec3::scale(dir, *d), temperature)?;
                println!(
                    "dij = {d:.6e} m: value = {:.12e} s^-2, method = {:?}, error estimate = {:.3e}, ratio to diagonal = {:.6e}, amplitude ratio = {:.6e}",
                    r.value,
                    r.method,
                    r.est_abs_error,
                    r.value / diag,
                    (r.value / diag).abs().sqrt()
                );
            }
        }
        WhichArg::F => {
            if a.dij.is_empty() {
                return Err(Failure::Usage(anyhow::anyhow!("--which F needs --dij")));
            }
            let c2 = vec3::dot(model.dipole_unit(), dir).powi(2);
            let omega_c = model.se_bath.cutoff_omega_c;
            let mut prev: Option<(f64, f64)> = None;
            for d in &a.dij {
                let x = omega_c * d / model.constants.c;
                let f = extract_f(x, c2)?;
                println!("dij = {d:.6e} m: x = {x:.6e}, F = {f:.12e}, closed form = {:.12e}", f_closed_form(x, c2));
                if let Some((px, pf)) = prev {
                    println!("  local slope = {:.6}", (f.abs() / pf.abs()).ln() / (x / px).ln());
                }
                prev = Some((x, f));
            }
        }
    }
    Ok(Vec::new())
}

/// Flags after the subcommand name, minus output paths and verbosity.
fn computation_flags<'a>(args: &'a [String], name: &str) -> Vec<&'a str> {
    let mut out = Vec::new();
    let mut rest = args.iter().skip_while(|s| s.as_str() != name).skip(1);
    while let Some(f) = rest.next() {
        match f.as_str() {
            "--out" => {
                rest.next();
            }
            s if s.starts_with("--out=") => {}
            s if s == "--verbose" || (s.starts_with("-v") && s[1..].chars().all(|c| c == 'v')) => {}
            s => out.push(s),
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();

    let args: Vec<String> = std::env::args().collect();
    let mut ctx = RunContext {
        config: cli.config.clone(),
        args,
        hash: Sha256::new(),
    };
    let start = Instant::now();
    let name = match &cli.command {
        Command::Tau2(_) => "tau2",
        Command::Sweep(_) => "sweep",
        Command::Validate(_) => "validate",
        Command::Modesum(_) => "modesum",
    };
    let outcome = match &cli.command {
        Command::Tau2(a) => cmd_tau2(&mut ctx, a),
        Command::Sweep(a) => cmd_sweep(&mut ctx, a),
        Command::Validate(a) => cmd_validate(a),
        Command::Modesum(a) => cmd_modesum(&mut ctx, a),
    };
    let config_used = ctx.config.is_some() && name != "validate";
    match outcome {
        Ok(outputs) => {
            if outputs.is_empty() {
                return ExitCode::SUCCESS;
            }
            for f in computation_flags(&ctx.args, name) {
                ctx.hash.update(b"\0");
                ctx.hash.update(f.as_bytes());
            }
            let hash: String = ctx.hash.finalize().iter().map(|b| format!("{b:02x}")).collect();
            let manifest = RunManifest {
                command: ctx.args.join(" "),
                config_path: config_used.then(|| ctx.config.as_ref().unwrap().display().to_string()),
                parameter_hash: hash,
                outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
                wall_time_s: start.elapsed().as_secs_f64(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            };
            let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
            for out in &outputs {
                if let Err(e) = std::fs::write(manifest_path(out), format!("{text}\n")) {
                    eprintln!("error: writing manifest for {}: {e}", out.display());
                    return ExitCode::from(EXIT_USAGE);
                }
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("numeric failure: {e:#}");
            ExitCode::from(EXIT_NUMERIC)
        }
        Err(Failure::Regression(msg)) => {
            eprintln!("regression: {msg}");
            ExitCode::from(EXIT_REGRESSION)
        }
    }
}
