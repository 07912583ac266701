use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Sense;

/// Ratio of improvement over Shor, in percent: `(shor - sublevel) / (shor - solution)`.
pub fn ri(shor: f64, sublevel: f64, solution: f64) -> Result<f64> {
    if shor == solution {
        return Err(Error::UndefinedMetric("RI with shor == solution".into()));
    }
    Ok((shor - sublevel) / (shor - solution) * 100.0)
}

/// Relative gap to the solution, in percent: `(sublevel - solution) / |solution|`.
pub fn rg(sublevel: f64, solution: f64) -> Result<f64> {
    if solution == 0.0 {
        return Err(Error::UndefinedMetric("RG with solution == 0".into()));
    }
    Ok((sublevel - solution) / solution.abs() * 100.0)
}

/// [`rg`] oriented so that a valid bound gives a non-negative gap for either sense.
pub fn rg_sense(sense: Sense, sublevel: f64, solution: f64) -> Result<f64> {
    Ok(-sense.sign() * rg(sublevel, solution)?)
}

/// What the reference value of an instance is.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefKind {
    /// Proven optimum.
    #[default]
    Optimal,
    /// Best known feasible value.
    Best,
    /// Sampled estimate.
    Estimate,
}

/// Sidecar JSON with the reference value of one instance, e.g.
/// `{"value": 536, "kind": "optimal", "shor": 550.1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub value: f64,
    #[serde(default)]
    pub kind: RefKind,
    /// Known Shor bound; when absent the harness computes it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shor: Option<f64>,
}

impl Reference {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let r: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if !r.value.is_finite() {
            return Err(Error::Invalid("reference value must be finite".into()));
        }
        Ok(r)
    }
}
