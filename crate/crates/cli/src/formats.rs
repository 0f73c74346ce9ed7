//! JSON file formats for states, joint states, and Bell scenarios.
//!
//! A single-system state file carries either the epistemic weight vector
//! `P` (row-major over ontic states, index x_a * p + x_b) or the fiducial
//! table `Q` (p + 1 rows of p outcome probabilities), never both:
//!
//! ```json
//! {"p": 2, "mode": "standard", "P": [0.0, 0.1, 0.1, 0.8]}
//! {"p": 2, "Q": [[0.1, 0.9], [0.1, 0.9], [0.8, 0.2]]}
//! ```
//!
//! A joint file holds `n` systems over the same prime with a flat weight
//! vector (system 0 most significant). A scenario file names the two
//! side-2 fiducial states of a Bell run.

use epitoy_core::{EpistemicDist, FiducialSet, JointDist, Mode, Prime};
use serde::{Deserialize, Serialize};

use crate::error::{domain_err, CliError};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub p: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub fiducial: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointFile {
    pub p: u32,
    pub n: usize,
    #[serde(rename = "P")]
    pub weights: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(rename = "S")]
    pub s: StateFile,
    #[serde(rename = "Sprime")]
    pub s_prime: StateFile,
}

/// A loaded single-system state in whichever form the file used.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Weights(EpistemicDist),
    Fiducial(FiducialSet),
}

impl LoadedState {
    pub fn prime(&self) -> Prime {
        match self {
            LoadedState::Weights(d) => d.prime(),
            LoadedState::Fiducial(q) => q.prime(),
        }
    }

    /// The epistemic form, converting if the file was fiducial.
    pub fn to_dist(&self) -> EpistemicDist {
        match self {
            LoadedState::Weights(d) => d.clone(),
            LoadedState::Fiducial(q) => q.to_epistemic(),
        }
    }

    /// The fiducial form, converting if the file was epistemic.
    pub fn to_fiducial(&self) -> FiducialSet {
        match self {
            LoadedState::Weights(d) => d.to_fiducial(),
            LoadedState::Fiducial(q) => q.clone(),
        }
    }
}

fn parse_mode(tag: Option<&str>) -> Result<Mode, CliError> {
    match tag {
        None | Some("standard") => Ok(Mode::Standard),
        Some("extended") => Ok(Mode::Extended),
        Some(other) => Err(CliError::input(format!(
            "unknown mode {other:?}; expected \"standard\" or \"extended\""
        ))),
    }
}

impl StateFile {
    pub fn into_state(self) -> Result<LoadedState, CliError> {
        let prime = Prime::new(self.p).map_err(domain_err)?;
        match (self.weights, self.fiducial) {
            (Some(_), Some(_)) => Err(CliError::input(
                "state file must contain exactly one of \"P\" and \"Q\", found both",
            )),
            (None, None) => Err(CliError::input(
                "state file must contain one of \"P\" (weights) or \"Q\" (fiducial rows)",
            )),
            (Some(w), None) => {
                let mode = parse_mode(self.mode.as_deref())?;
                let d = EpistemicDist::new(prime, mode, w).map_err(domain_err)?;
                Ok(LoadedState::Weights(d))
            }
            (None, Some(rows)) => {
                if self.mode.is_some() {
                    return Err(CliError::input(
                        "\"mode\" applies to weight files only; fiducial rows have no mode",
                    ));
                }
                let q = FiducialSet::new(prime, rows).map_err(domain_err)?;
                Ok(LoadedState::Fiducial(q))
            }
        }
    }

    pub fn from_dist(d: &EpistemicDist) -> StateFile {
        StateFile {
            p: d.prime().get(),
            mode: Some(d.mode().to_string()),
            weights: Some(d.weights().to_vec()),
            fiducial: None,
        }
    }

    pub fn from_fiducial(q: &FiducialSet) -> StateFile {
        StateFile {
            p: q.prime().get(),
            mode: None,
            weights: None,
            fiducial: Some(q.rows().to_vec()),
        }
    }
}

impl JointFile {
    pub fn into_joint(self, max_systems: Option<usize>) -> Result<JointDist, CliError> {
        let prime = Prime::new(self.p).map_err(domain_err)?;
        match max_systems {
            Some(cap) => {
                JointDist::new_with_limit(prime, self.n, self.weights, cap).map_err(domain_err)
            }
            None => JointDist::new(prime, self.n, self.weights).map_err(domain_err),
        }
    }
}

impl ScenarioFile {
    pub fn into_states(self) -> Result<(FiducialSet, FiducialSet), CliError> {
        let s = self.s.into_state()?;
        let sp = self.s_prime.into_state()?;
        Ok((s.to_fiducial(), sp.to_fiducial()))
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
