//! JSON run configuration. Unknown keys are rejected; command-line flags
//! override file values.

use mobqc::graph::ResourceKind;
use mobqc::noise::NoiseConfig;
use mobqc::protocol::SessionMix;
use mobqc::sim::{StateVector, C64};
use mobqc::verify::AdversaryParams;
use serde::{Deserialize, Serialize};

use crate::AppError;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub resource: Option<ResourceKind>,
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub out: Option<String>,
    /// Inline noise strengths.
    pub noise: Option<NoiseConfig>,
    /// Path to a noise JSON file (exclusive with `noise`).
    pub noise_path: Option<String>,
    /// Calibrate uniform depolarizing noise to this resource fidelity.
    pub calibrate_target: Option<f64>,
    pub adversary: Option<AdversaryConfig>,
    /// Which trap tests to run: "a", "b" or "both".
    pub test: Option<String>,
    /// Client program for `session`.
    pub program: Option<String>,
    /// Gate name for computation programs and the `gates` command.
    pub gate: Option<String>,
    pub mix: Option<SessionMix>,
    pub sessions: Option<u64>,
    /// Read tomography counts from this CSV instead of simulating.
    pub counts_in: Option<String>,
    /// Use exact outcome distributions instead of sampled counts.
    pub exact: Option<bool>,
}

impl RunConfig {
    pub fn load(path: &str) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::config(format!("cannot read config {path}: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| AppError::config(format!("bad config {path}: {e}")))
    }
}

/// Adversary specification: three phases plus optional ancilla amplitude
/// lists (one per branch, `[re, im]` pairs, all the same power-of-two
/// length).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversaryConfig {
    pub thetas: [f64; 3],
    #[serde(default)]
    pub ancillas: Option<[Vec<[f64; 2]>; 4]>,
}

impl AdversaryConfig {
    pub fn to_params(&self) -> Result<AdversaryParams, AppError> {
        let ancillas: [StateVector; 4] = match &self.ancillas {
            None => std::array::from_fn(|_| StateVector::zero(0)),
            Some(lists) => {
                let mut out: Vec<StateVector> = Vec::with_capacity(4);
                for list in lists {
                    let amps: Vec<C64> =
                        list.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                    out.push(StateVector::from_amplitudes(amps).map_err(|e| {
                        AppError::config(format!("bad ancilla state: {e}"))
                    })?);
                }
                out.try_into().expect("four ancillas")
            }
        };
        let params = AdversaryParams {
            thetas: self.thetas,
            ancillas,
        };
        params
            .validate()
            .map_err(|e| AppError::config(format!("bad adversary: {e}")))?;
        Ok(params)
    }

    pub fn parse(text: &str) -> Result<Self, AppError> {
        serde_json::from_str(text)
            .map_err(|e| AppError::config(format!("bad adversary JSON: {e}")))
    }
}
