//! Experiment configuration: one strict JSON document per run.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use shadowdrift::analysis::DegeneracyTolerances;
use shadowdrift::classical::ClassicalState;
use shadowdrift::models::{GaussianPacket, GridModel, ToyModel};
use shadowdrift::SchemeSpec;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Drift,
    Order,
    Shadow,
    Commutant,
    Classical,
    BchCheck,
    Bound,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Drift => "drift",
            ExperimentKind::Order => "order",
            ExperimentKind::Shadow => "shadow",
            ExperimentKind::Commutant => "commutant",
            ExperimentKind::Classical => "classical",
            ExperimentKind::BchCheck => "bch-check",
            ExperimentKind::Bound => "bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Grid(GridModel),
    Toy(ToyModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Gaussian(GaussianPacket),
    Basis { index: usize },
    /// Drawn from the run seed.
    Random,
}

/// The operator tested against `H` in a commutant experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    /// `H^exponent`.
    Power { exponent: u32 },
    /// One part of the split.
    Part { index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BchSpec {
    #[serde(default = "default_bch_dim")]
    pub dim: usize,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "default_instances")]
    pub instances: usize,
}

fn default_bch_dim() -> usize {
    4
}

fn default_eps() -> Vec<f64> {
    vec![0.2, 0.1, 0.05, 0.025]
}

fn default_instances() -> usize {
    1
}

impl Default for BchSpec {
    fn default() -> Self {
        Self {
            dim: default_bch_dim(),
            eps: default_eps(),
            instances: default_instances(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance of the commutant test.
    #[serde(default = "default_commutant_tol")]
    pub commutant: f64,
    #[serde(default)]
    pub degeneracy: DegeneracyTolerances,
}

fn default_commutant_tol() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            commutant: default_commutant_tol(),
            degeneracy: DegeneracyTolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Directory for the artifacts; the working directory when absent.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// File stem; the experiment name when absent.
    #[serde(default)]
    pub stem: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Strictly decreasing ladder for `order`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default = "one")]
    pub sample_every: usize,
    /// Final time for `order`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// BCH order for `shadow` (corrections up to `truncation - 1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical_ic: Option<ClassicalState>,
    /// `|H_s|` for `bound`; taken from the shadow Hamiltonian of `model` and `scheme` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hs_norm: Option<f64>,
    /// Order `s` for `bound`; the scheme's nominal order when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bch: Option<BchSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

fn one() -> usize {
    1
}

fn config_err(field: &str, msg: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        message: msg.into(),
    }
}

fn positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(field, format!("must be positive and finite, got {v}")))
    }
}

fn require<'a, T>(field: &str, v: &'a Option<T>, exp: ExperimentKind) -> Result<&'a T, CliError> {
    v.as_ref()
        .ok_or_else(|| config_err(field, format!("required by the {} experiment", exp.as_str())))
}

impl ExperimentConfig {
    /// Parses a config document. A sidecar written by a previous run is also
    /// accepted: its `config` member is used.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| config_err("<document>", e.to_string()))?;
        let value = match value {
            serde_json::Value::Object(mut map) if map.get("config").is_some_and(serde_json::Value::is_object) => {
                map.remove("config").unwrap_or_default()
            }
            v => v,
        };
        let cfg: ExperimentConfig = serde_json::from_value(value).map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.contains("field"))
                .unwrap_or("<document>")
                .to_string();
            CliError::Config { field, message: msg }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn model(&self) -> Result<&ModelSpec, CliError> {
        require("model", &self.model, self.experiment)
    }

    pub fn scheme(&self) -> Result<&SchemeSpec, CliError> {
        require("scheme", &self.scheme, self.experiment)
    }

    pub fn dt(&self) -> Result<f64, CliError> {
        require("dt", &self.dt, self.experiment).copied()
    }

    pub fn steps(&self) -> Result<usize, CliError> {
        require("steps", &self.steps, self.experiment).copied()
    }

    pub fn initial_state(&self) -> Result<&InitialState, CliError> {
        require("initial_state", &self.initial_state, self.experiment)
    }

    /// Field-level checks, independent of the experiment.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(dt) = self.dt {
            positive("dt", dt)?;
        }
        if let Some(dts) = &self.dts {
            for &d in dts {
                positive("dts", d)?;
            }
            if dts.windows(2).any(|w| !(w[1] < w[0])) {
                return Err(config_err("dts", "must be strictly decreasing"));
            }
        }
        if self.steps == Some(0) {
            return Err(config_err("steps", "must be at least 1"));
        }
        if self.sample_every == 0 {
            return Err(config_err("sample_every", "must be at least 1"));
        }
        if let Some(h) = self.horizon {
            positive("horizon", h)?;
        }
        if let Some(t) = self.truncation {
            if !(1..=4).contains(&t) {
                return Err(config_err("truncation", format!("must be in 1..=4, got {t}")));
            }
        }
        if let Some(h) = self.hs_norm {
            positive("hs_norm", h)?;
        }
        if self.order == Some(0) {
            return Err(config_err("order", "must be at least 1"));
        }
        if let Some(b) = &self.bch {
            if b.dim == 0 {
                return Err(config_err("bch.dim", "must be at least 1"));
            }
            if b.instances == 0 {
                return Err(config_err("bch.instances", "must be at least 1"));
            }
            for &e in &b.eps {
                positive("bch.eps", e)?;
            }
        }
        positive("tolerances.commutant", self.tolerances.commutant)?;
        positive("tolerances.degeneracy.degeneracy_rel", self.tolerances.degeneracy.degeneracy_rel)?;
        positive("tolerances.degeneracy.ambiguity_rel", self.tolerances.degeneracy.ambiguity_rel)?;
        if let Some(InitialState::Gaussian(g)) = &self.initial_state {
            positive("initial_state.width", g.width)?;
        }
        if let Some(ModelSpec::Grid(g)) = &self.model {
            positive("model.grid.half_width", g.half_width)?;
        }
        if let Some(SchemeSpec::EulerPathIntegral { substeps: 0 }) = self.scheme {
            return Err(config_err("scheme.substeps", "must be at least 1"));
        }
        if let Some(ic) = &self.classical_ic {
            if !ic.is_finite() {
                return Err(config_err("classical_ic", "components must be finite"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(text: &str) -> String {
        match ExperimentConfig::from_json(text).unwrap_err() {
            CliError::Config { field, .. } => field,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn minimal_drift_config() {
        let cfg = ExperimentConfig::from_json(
            r#"{"experiment":"drift","model":{"toy":{"name":"pauli_xz"}},"scheme":{"name":"strang"},
                "dt":0.1,"steps":10,"initial_state":{"kind":"basis","index":0}}"#,
        )
        .unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::Drift);
        assert_eq!(cfg.sample_every, 1);
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn negative_dt_names_field() {
        assert_eq!(field_of(r#"{"experiment":"drift","dt":-0.1}"#), "dt");
        assert_eq!(field_of(r#"{"experiment":"order","dts":[0.1,0.2]}"#), "dts");
    }

    #[test]
    fn unknown_key_rejected() {
        assert_eq!(field_of(r#"{"experiment":"drift","dtt":0.1}"#), "dtt");
        let nested = r#"{"experiment":"drift","model":{"grid":{"dimension":2,"points":8,"half_width":3,
            "potential":{"name":"quartic"},"typo":1}}}"#;
        assert_eq!(field_of(nested), "typo");
    }

    #[test]
    fn sidecar_is_accepted() {
        let cfg = ExperimentConfig::from_json(r#"{"config":{"experiment":"bound","hs_norm":16,"order":3},"summary":{}}"#)
            .unwrap();
        assert_eq!(cfg.hs_norm, Some(16.0));
    }

    #[test]
    fn round_trip() {
        let text = r#"{"experiment":"classical","classical_ic":{"q":[1,1],"p":[0,0]},"dt":0.001,"steps":5,"seed":3}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let again = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }
}
