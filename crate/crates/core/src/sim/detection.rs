use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionOutcome {
    TruePositive,
    FalseNegative,
    TrueNegative,
    FalsePositive,
}

impl DetectionOutcome {
    pub fn is_correct(self) -> bool {
        matches!(self, Self::TruePositive | Self::TrueNegative)
    }
}

/// Classifies one flow: correct with probability `impl_accuracy`, using one
/// draw from the flow's own stream.
pub fn sample_detection<R: Rng + ?Sized>(
    flow_is_malicious: bool,
    impl_accuracy: f64,
    rng: &mut R,
) -> DetectionOutcome {
    let correct = rng.gen::<f64>() < impl_accuracy;
    match (flow_is_malicious, correct) {
        (true, true) => DetectionOutcome::TruePositive,
        (true, false) => DetectionOutcome::FalseNegative,
        (false, true) => DetectionOutcome::TrueNegative,
        (false, false) => DetectionOutcome::FalsePositive,
    }
}
