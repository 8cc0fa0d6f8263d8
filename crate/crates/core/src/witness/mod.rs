//! Detection criteria and their verdicts.
//!
//! Every criterion reduces a state to a scalar compared against a threshold.
//! A verdict only fires when the scalar clears the threshold by
//! [`POLICY.detection_margin`](crate::policy::NumericPolicy::detection_margin).

mod concurrence;
mod entropy;
mod q;

pub use concurrence::{gme_concurrence_pure, GmeConcurrenceReport};
pub use entropy::{
    entropy_threshold_ksep, entropy_threshold_ksep_with, entropy_witness, ground_relative_entropy,
    relative_entropy, EntropySearch, EntropyThreshold,
};
pub use q::{q0, q_criteria, qm, QOptions, QReport};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::policy::POLICY;
use crate::separability::KsepResult;
use crate::tensor::{DensityState, Operator};
use crate::thermal::energy_expectation;

/// Which side of the threshold counts as a detection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Below,
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectionVerdict {
    pub criterion: String,
    pub value: f64,
    pub threshold: f64,
    pub direction: Direction,
    pub detected: bool,
    /// The separability level the verdict refutes; 2 means GME.
    pub k: usize,
    pub caveat: Option<String>,
}

impl DetectionVerdict {
    pub fn new(
        criterion: impl Into<String>,
        value: f64,
        threshold: f64,
        direction: Direction,
        k: usize,
        caveat: Option<String>,
    ) -> Self {
        let mut v = Self {
            criterion: criterion.into(),
            value,
            threshold,
            direction,
            detected: false,
            k,
            caveat,
        };
        v.detected = v.margin() > POLICY.detection_margin;
        v
    }

    /// How far the value lies beyond the threshold; positive in the
    /// detecting direction.
    pub fn margin(&self) -> f64 {
        match self.direction {
            Direction::Below => self.threshold - self.value,
            Direction::Above => self.value - self.threshold,
        }
    }
}

pub(crate) const HEURISTIC_THRESHOLD: &str =
    "threshold from heuristic minimization without restart consensus";

/// Energy criterion: Tr(ρH) < E_{k-sep} certifies k-inseparability.
pub fn gap_witness(
    rho: &DensityState,
    h: &Operator,
    ksep: &KsepResult,
) -> Result<DetectionVerdict> {
    if rho.shape() != h.shape() || ksep.argmin.shape() != h.shape() {
        return invalid("state, Hamiltonian and k-separable optimum must share a shape");
    }
    let value = energy_expectation(rho, h)?;
    let caveat = (!ksep.corroborated()).then(|| HEURISTIC_THRESHOLD.to_string());
    Ok(DetectionVerdict::new(
        format!("gap-k{}", ksep.k),
        value,
        ksep.energy,
        Direction::Below,
        ksep.k,
        caveat,
    ))
}
