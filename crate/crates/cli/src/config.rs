//! Experiment configuration: one strict JSON document per run.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use wanalytic::scf::{ScfConfig, SystemSpec};
use wanalytic::verify::SuiteConfig;
use wanalytic::verify::{EnvelopeParams, HpParams};
use wanalytic::weights::QuadratureOptions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// required by `solve`, `envelope` and `all`
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub scf: ScfConfig,
    #[serde(default)]
    pub seminorms: SeminormConfig,
    #[serde(default)]
    pub envelope: EnvelopeConfig,
    #[serde(default)]
    pub verify: SuiteConfig,
    #[serde(default)]
    pub hp: HpConfig,
    /// output directory; `--out` takes precedence
    pub out: Option<PathBuf>,
}

/// Weighted seminorms m_k of each orbital on a ball around the nucleus,
/// computed from the origin series of the orbital.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeminormConfig {
    pub p: f64,
    pub gamma: f64,
    /// must lie inside the convergence radius of the origin series
    pub radius: f64,
    pub max_order: u32,
    pub quadrature: QuadratureOptions,
}

impl Default for SeminormConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            gamma: 2.4,
            radius: 0.5,
            max_order: 8,
            quadrature: QuadratureOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvelopeConfig {
    pub study: EnvelopeParams,
    /// highest derivative order sampled when certifying the potential
    pub certificate_order: u32,
    /// blend length of the weight function
    pub blend: f64,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        Self {
            study: EnvelopeParams::default(),
            certificate_order: 10,
            blend: 1.0,
        }
    }
}

/// Profile approximated by the hp demo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HpTarget {
    /// r^power e^{-decay r}
    Model { power: f64, decay: f64 },
    /// origin series of a computed orbital on [0, hp.params.radius]
    Orbital { index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HpConfig {
    pub target: HpTarget,
    pub params: HpParams,
}

impl Default for HpConfig {
    fn default() -> Self {
        Self {
            target: HpTarget::Model {
                power: 0.5,
                decay: 1.0,
            },
            params: HpParams::default(),
        }
    }
}

/// Parses a config; errors name the offending key path.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner().to_string();
        // "missing field `kind`" names the key below the path
        let missing = inner
            .strip_prefix("missing field `")
            .and_then(|rest| rest.split('`').next());
        match (path.as_str(), missing) {
            (".", Some(key)) => format!("missing key {key}"),
            (_, Some(key)) => format!("missing key {path}.{key}"),
            (".", None) => inner,
            _ => format!("{path}: {inner}"),
        }
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_takes_defaults() {
        let c = parse_config("{}").unwrap();
        assert!(c.system.is_none());
        assert_eq!(c.scf, ScfConfig::default());
        assert_eq!(c.hp, HpConfig::default());
    }

    #[test]
    fn unknown_nested_key_is_named() {
        let e = parse_config(r#"{"scf": {"grid": {"cels": 4}}}"#).unwrap_err();
        assert!(e.contains("scf.grid") && e.contains("cels"), "{e}");
    }

    #[test]
    fn missing_tag_is_named_with_its_full_path() {
        let e = parse_config(
            r#"{"system": {"orbitals": 1, "potential": {"charges": [1.0], "centers": [[0, 0, 0]]}, "kinetic": 0.5, "dim": 3}}"#,
        )
        .unwrap_err();
        assert!(e.starts_with("missing key system.potential.kind"), "{e}");
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let c = parse_config(r#"{"envelope": {"study": {"eta": 0.5}}}"#).unwrap();
        assert_eq!(c.envelope.study.eta, 0.5);
        assert_eq!(
            c.envelope.study.alpha_max,
            EnvelopeParams::default().alpha_max
        );
    }

    #[test]
    fn round_trip() {
        let c = parse_config("{}").unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(parse_config(&text).unwrap(), c);
    }
}
