use super::engine::tau2_general;
use super::terms::assemble_interaction_terms;
use super::{tau2_from_rate, DecoherenceReport};
use crate::error::{DecoError, Result};
use crate::io::{csv_line, fmt_f64};
use crate::model::{build_modes, validate_model, Model};
use crate::numerics::log_log_slope;
use crate::states::{build_state, StateSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub temperature: f64,
    /// Couplings scaled as `N^p`; the variance then carries `N^{2p}`.
    pub coupling_exponent: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            temperature: 0.0,
            coupling_exponent: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub report: DecoherenceReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub state: String,
    pub rows: Vec<SweepRow>,
    /// Slope of `ln τ₂` against `ln N`.
    pub slope: f64,
    pub fit_rms: f64,
}

impl DecoherenceReport {
    /// Same report with every contribution multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> DecoherenceReport {
        let mut r = self.clone();
        for v in r.breakdown.values_mut().chain(r.cross_by_label.values_mut()) {
            *v *= factor;
        }
        r.inv_half_tau2_sq *= factor;
        r.tau2 = tau2_from_rate(r.inv_half_tau2_sq);
        r.approximation = r.approximation.map(|a| a * factor);
        r
    }

    /// Rescales a per-site-uniform report to `n` qubits, keeping the
    /// register-independent cavity-decay part. Valid for sizes beyond any
    /// integer register, such as `10²²`.
    pub fn extrapolated(&self, n: f64) -> Result<DecoherenceReport> {
        if !self.uniform_per_site {
            return Err(DecoError::Misuse(
                "only per-site-uniform reports can be extrapolated in N".into(),
            ));
        }
        if !(n > 0.0) {
            return Err(DecoError::Misuse(format!("register size must be positive, got {n}")));
        }
        let f = n / self.n_qubits;
        let mut r = self.clone();
        let mut total = 0.0;
        for (k, v) in r.breakdown.iter_mut() {
            if !k.starts_with("cavity-decay") {
                *v *= f;
            }
            total += *v;
        }
        for v in r.cross_by_label.values_mut() {
            *v *= f;
        }
        r.inv_half_tau2_sq = total;
        r.tau2 = tau2_from_rate(total);
        r.approximation = r.approximation.map(|a| a * f);
        r.n_qubits = n;
        Ok(r)
    }
}

/// Full-term `τ₂` for each register size, and the log-log slope.
pub fn scaling_sweep(
    template: &Model,
    state: &StateSpec<f64>,
    n_list: &[usize],
    opts: SweepOptions,
) -> Result<SweepTable> {
    if n_list.len() < 3 {
        return Err(DecoError::Misuse(format!(
            "a sweep needs at least 3 register sizes, got {}",
            n_list.len()
        )));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DecoError::Misuse("register sizes must be strictly increasing".into()));
    }
    if matches!(state, StateSpec::Product(_) | StateSpec::Sparse(_)) {
        return Err(DecoError::Misuse("sweeps need a size-independent state".into()));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let model = validate_model(template.with_count(n))?;
        let modes = build_modes(&model)?;
        let terms = assemble_interaction_terms(&model, Some(&modes))?;
        let st = build_state(state.clone(), n)?;
        let mut report = tau2_general(&st, model.cavity.state, &terms, opts.temperature)?;
        if opts.coupling_exponent != 0.0 {
            report = report.scaled((n as f64).powf(2.0 * opts.coupling_exponent));
        }
        rows.push(SweepRow { n, report });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.report.tau2).collect();
    if y.iter().any(|t| !t.is_finite()) {
        return Err(DecoError::Numeric("τ₂ is infinite at some sweep point".into()));
    }
    let fit = log_log_slope(&x, &y)?;
    Ok(SweepTable {
        state: rows[0].report.state_class.clone(),
        rows,
        slope: fit.slope,
        fit_rms: fit.rms_residual,
    })
}

impl SweepTable {
    /// Header `N,tau2_s,inv_half_tau2_sq,<breakdown keys>`; one row per size.
    pub fn to_csv(&self) -> String {
        let keys: Vec<String> = self
            .rows
            .first()
            .map(|r| r.report.breakdown.keys().cloned().collect())
            .unwrap_or_default();
        let mut out = csv_line(
            ["N", "tau2_s", "inv_half_tau2_sq"]
                .into_iter()
                .map(String::from)
                .chain(keys.iter().cloned()),
        );
        for row in &self.rows {
            let r = &row.report;
            out.push_str(&csv_line(
                [row.n.to_string(), fmt_f64(r.tau2), fmt_f64(r.inv_half_tau2_sq)]
                    .into_iter()
                    .chain(keys.iter().map(|k| fmt_f64(r.entry(k)))),
            ));
        }
        out
    }
}
