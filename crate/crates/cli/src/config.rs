use serde::{Deserialize, Serialize};

use segal_core::{FrequencySpec, PhaseSpacePoint, WeightFunction};

use crate::CliError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spec: FrequencySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Replaces the constructed metric in `verify`; used to show that the
    /// axioms fail for any other choice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric_override: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<TimeGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<PhaseSpacePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock: Option<FockBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_check: Option<DomainBlock>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum TimeGrid {
    Explicit(Vec<f64>),
    Linspace(Linspace),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let v = match self {
            TimeGrid::Explicit(v) => v.clone(),
            TimeGrid::Linspace(l) => match l.points {
                0 => Vec::new(),
                1 => vec![l.start],
                n => (0..n)
                    .map(|i| l.start + (l.stop - l.start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        };
        if v.is_empty() {
            return Err(CliError::Input("t_grid is empty".into()));
        }
        if v.iter().any(|t| !t.is_finite()) {
            return Err(CliError::Input("t_grid contains a non-finite time".into()));
        }
        Ok(v)
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid::Linspace(Linspace {
            start: 0.0,
            stop: 10.0,
            points: 100,
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_radius: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FockBlock {
    pub n_max: usize,
    /// Time at which the lifted evolution is compared with the one-particle flow.
    #[serde(default = "default_fock_time")]
    pub t: f64,
}

fn default_fock_time() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DomainBlock {
    pub rho: WeightDoc,
    pub sigma: WeightDoc,
    /// Both sups must stay at or below this bound.
    #[serde(default = "default_bound")]
    pub bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<TimeGrid>,
}

fn default_bound() -> f64 {
    1.0
}

/// Sampled weights, or `"omega_pow:<exponent>"`.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum WeightDoc {
    Samples(Vec<f64>),
    Symbolic(String),
}

impl WeightDoc {
    pub fn to_weight(&self) -> Result<WeightFunction, CliError> {
        match self {
            WeightDoc::Samples(v) => Ok(WeightFunction::Samples(v.clone())),
            WeightDoc::Symbolic(s) => {
                let exp = s
                    .strip_prefix("omega_pow:")
                    .and_then(|e| e.trim().parse::<f64>().ok())
                    .filter(|e| e.is_finite())
                    .ok_or_else(|| {
                        CliError::Input(format!(
                            "weight {s:?} is neither a sample list nor \"omega_pow:<exponent>\""
                        ))
                    })?;
                Ok(WeightFunction::OmegaPower(exp))
            }
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("config: {e}")))
}
