//! Configuration documents.
//!
//! The format is TOML: dotted section names, `key = value` pairs and
//! bracketed arrays. Section and key names mirror the fields of
//! [`Model`]; see `configs/benchmark.toml` for a complete example.

use super::{validate_model, Model};
use crate::constants::PhysicalConstants;
use crate::error::{DecoError, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "DECOTIME_CONFIG";

fn section_at(text: &str, offset: usize) -> Option<String> {
    let line_start = text[..offset.min(text.len())].rfind('\n').map_or(0, |p| p + 1);
    let line = text[line_start..].lines().next()?.trim();
    let name = line.strip_prefix('[')?.split(']').next()?.trim();
    Some(name.to_string())
}

fn map_toml_error(text: &str, err: toml::de::Error) -> DecoError {
    let msg = err.message().to_string();
    if let Some(rest) = msg.strip_prefix("missing field `") {
        let field = rest.split('`').next().unwrap_or(rest);
        let section = err.span().and_then(|s| section_at(text, s.start));
        return DecoError::MissingKey(match section {
            Some(s) => format!("{s}.{field}"),
            None => field.to_string(),
        });
    }
    let line = err
        .span()
        .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    let section = err.span().and_then(|s| {
        let before = &text[..s.start.min(text.len())];
        before
            .lines()
            .rev()
            .find_map(|l| l.trim().strip_prefix('[').map(|r| r.trim_end_matches(']').to_string()))
    });
    DecoError::Parse(match (line, section) {
        (Some(l), Some(s)) => format!("line {l} (section [{s}]): {msg}"),
        (Some(l), None) => format!("line {l}: {msg}"),
        _ => msg,
    })
}

/// Parses and validates a configuration document.
pub fn load_model(text: &str) -> Result<Model> {
    let mut model: Model = toml::from_str(text).map_err(|e| map_toml_error(text, e))?;
    model.constants = PhysicalConstants::default();
    let validated = validate_model(model)?;
    for w in validated.warnings() {
        log::warn!("{w}");
    }
    Ok(validated.into_inner())
}

pub fn load_model_file(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DecoError::io(path.display().to_string(), e))?;
    load_model(&text)
}

/// Explicit path if given, else the path named by [`CONFIG_ENV`].
pub fn resolve_config_path(explicit: Option<&Path>) -> Result<PathBuf> {
    if let Some(p) = explicit {
        return Ok(p.to_path_buf());
    }
    match std::env::var_os(CONFIG_ENV) {
        Some(p) if !p.is_empty() => Ok(PathBuf::from(p)),
        _ => Err(DecoError::MissingKey(format!(
            "config path (pass --config or set {CONFIG_ENV})"
        ))),
    }
}

/// Renders a model back to the configuration format.
pub fn serialize_model(model: &Model) -> Result<String> {
    toml::to_string(model).map_err(|e| DecoError::Parse(format!("serialize: {e}")))
}

#[derive(Serialize)]
struct WithConstants<'a> {
    constants: &'a PhysicalConstants,
    #[serde(flatten)]
    model: &'a Model,
}

/// JSON rendering including the physical constants, for run provenance.
pub fn model_json(model: &Model) -> serde_json::Value {
    serde_json::to_value(WithConstants {
        constants: &model.constants,
        model,
    })
    .expect("model is serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"
[qubits]
count = 1
omega0 = 1.0e15
dipole_d10 = [1.0e-29, 0.0, 0.0]
mass = 1.0e-25

[geometry]
layout = "line"
spacing = 1.0e-6

[cavity]
omega_b = 1.0e15
mode_volume = 1.0e-15
wavevector = [0.0, 0.0, 3.0e6]
polarization = [1.0, 0.0, 0.0]

[se_bath]
cutoff_omega_c = 1.0e17

[vibrations]
topology = { kind = "independent", v0 = 1.0e-12 }
"#;

    #[test]
    fn minimal_defaults() {
        let m = load_model(MINIMAL).unwrap();
        assert!(m.gating.is_off());
        assert_eq!(m.se_bath.temperature, 0.0);
        assert!(m.cavity_decay.w.is_zero());
    }

    #[test]
    fn negative_temperature_named() {
        let text = MINIMAL.replace("cutoff_omega_c = 1.0e17", "cutoff_omega_c = 1.0e17\ntemperature = -1.0");
        let err = load_model(&text).unwrap_err();
        assert!(matches!(err, DecoError::Validation(_)));
        assert!(err.to_string().contains("temperature"), "{err}");
    }

    #[test]
    fn missing_key_is_named() {
        let text = MINIMAL.replace("omega0 = 1.0e15\n", "");
        match load_model(&text).unwrap_err() {
            DecoError::MissingKey(k) => assert_eq!(k, "qubits.omega0"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn parse_error_has_line() {
        let text = MINIMAL.replace("count = 1", "count = = 1");
        let err = load_model(&text).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn round_trip_identity() {
        let m = load_model(MINIMAL).unwrap();
        let again = load_model(&serialize_model(&m).unwrap()).unwrap();
        assert_eq!(m, again);
        assert!(model_json(&m)["constants"]["hbar"].as_f64().unwrap() > 0.0);
    }
}
