//! Online selection: keep the shortlist entries that satisfy the live mission
//! constraints, then pick the best trade-off with a min-max normalized
//! weighted sum.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::ImplementationProfile;
use crate::pareto::ObjectiveVector;

/// Security level required in a mission zone. Ordered `Low < Medium < High`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecurityLevel {
    Low,
    Medium,
    High,
}

impl SecurityLevel {
    pub const ALL: [SecurityLevel; 3] = [Self::Low, Self::Medium, Self::High];

    pub fn label(self) -> &'static str {
        match self {
            Self::Low => "low",
            Self::Medium => "medium",
            Self::High => "high",
        }
    }
}

/// Live mission constraints plus the scalarization weights.
///
/// `None` bounds are unbounded. Weights follow [`ObjectiveVector`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionConstraints {
    #[serde(default)]
    pub max_latency_ms: Option<f64>,
    #[serde(default)]
    pub min_accuracy: f64,
    #[serde(default)]
    pub max_energy_mj_per_flow: Option<f64>,
    #[serde(default)]
    pub max_memory_mb: Option<f64>,
    pub weights: [f64; ObjectiveVector::LEN],
    /// Added to the score of every entry other than the current one. Zero
    /// disables hysteresis.
    #[serde(default)]
    pub switching_penalty: f64,
}

pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

impl MissionConstraints {
    pub fn unbounded(weights: [f64; ObjectiveVector::LEN]) -> Self {
        Self {
            max_latency_ms: None,
            min_accuracy: 0.0,
            max_energy_mj_per_flow: None,
            max_memory_mb: None,
            weights,
            switching_penalty: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), SelectError> {
        let invalid = |msg: String| Err(SelectError::InvalidConstraints(msg));
        if !(0.0..=1.0).contains(&self.min_accuracy) {
            return invalid(format!("min_accuracy {} is outside [0, 1]", self.min_accuracy));
        }
        for (name, bound) in [
            ("max_latency_ms", self.max_latency_ms),
            ("max_energy_mj_per_flow", self.max_energy_mj_per_flow),
            ("max_memory_mb", self.max_memory_mb),
        ] {
            if let Some(v) = bound {
                if !(v > 0.0) {
                    return invalid(format!("{name} must be positive, got {v}"));
                }
            }
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return invalid(format!("weights must be non-negative, got {:?}", self.weights));
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return invalid(format!("weights must sum to 1, got {sum}"));
        }
        if !(self.switching_penalty.is_finite() && self.switching_penalty >= 0.0) {
            return invalid("switching_penalty must be non-negative".into());
        }
        Ok(())
    }

    fn violations(&self, p: &ImplementationProfile) -> usize {
        let exceeds = |value: f64, bound: Option<f64>| bound.is_some_and(|b| value > b);
        [
            p.accuracy < self.min_accuracy,
            exceeds(p.latency_ms, self.max_latency_ms),
            exceeds(p.energy_mj, self.max_energy_mj_per_flow),
            exceeds(p.memory_mb, self.max_memory_mb),
        ]
        .into_iter()
        .filter(|&v| v)
        .count()
    }

    pub fn admits(&self, p: &ImplementationProfile) -> bool {
        self.violations(p) == 0
    }
}

/// Constraint profile per security level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SecurityProfiles(pub BTreeMap<SecurityLevel, MissionConstraints>);

impl Default for SecurityProfiles {
    fn default() -> Self {
        let level = |min_accuracy, weights| MissionConstraints {
            min_accuracy,
            ..MissionConstraints::unbounded(weights)
        };
        let mut map = BTreeMap::new();
        map.insert(SecurityLevel::High, level(0.95, [0.6, 0.2, 0.1, 0.1]));
        map.insert(SecurityLevel::Medium, level(0.85, [0.4, 0.3, 0.2, 0.1]));
        map.insert(SecurityLevel::Low, level(0.70, [0.2, 0.3, 0.4, 0.1]));
        Self(map)
    }
}

impl SecurityProfiles {
    pub fn get(&self, level: SecurityLevel) -> Option<&MissionConstraints> {
        self.0.get(&level)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rationale {
    Scalarized,
    SingleFeasible,
    FallbackInfeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionDecision {
    pub chosen: String,
    pub feasible_count: usize,
    /// Scores of the scored set: the feasible entries, or the whole
    /// shortlist on fallback.
    pub scores: BTreeMap<String, f64>,
    pub rationale: Rationale,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SelectError {
    #[error("no implementation is available for this drone")]
    EmptyShortlist,
    #[error("cannot normalize an empty feasible set")]
    EmptyFeasibleSet,
    #[error("invalid mission constraints: {0}")]
    InvalidConstraints(String),
}

/// Entries satisfying every bounded constraint, in input order.
pub fn feasible_set(
    shortlist: &[ImplementationProfile],
    c: &MissionConstraints,
) -> Vec<ImplementationProfile> {
    shortlist.iter().filter(|p| c.admits(p)).cloned().collect()
}

/// Per-objective min-max scaling; constant objectives map to 0.
fn normalized<'a, I>(profiles: I) -> Vec<[f64; ObjectiveVector::LEN]>
where
    I: IntoIterator<Item = &'a ImplementationProfile>,
{
    let raw: Vec<ObjectiveVector> = profiles.into_iter().map(|p| p.objectives()).collect();
    let mut lo = [f64::INFINITY; ObjectiveVector::LEN];
    let mut hi = [f64::NEG_INFINITY; ObjectiveVector::LEN];
    for v in &raw {
        for k in 0..ObjectiveVector::LEN {
            lo[k] = lo[k].min(v.0[k]);
            hi[k] = hi[k].max(v.0[k]);
        }
    }
    raw.iter()
        .map(|v| {
            core::array::from_fn(|k| {
                let range = hi[k] - lo[k];
                if range > 0.0 {
                    (v.0[k] - lo[k]) / range
                } else {
                    0.0
                }
            })
        })
        .collect()
}

/// Min-max normalized objective vectors keyed by implementation id.
pub fn normalize(
    feasible: &[ImplementationProfile],
) -> Result<BTreeMap<String, ObjectiveVector>, SelectError> {
    if feasible.is_empty() {
        return Err(SelectError::EmptyFeasibleSet);
    }
    Ok(feasible
        .iter()
        .zip(normalized(feasible))
        .map(|(p, v)| (p.id.clone(), ObjectiveVector(v)))
        .collect())
}

fn weighted(weights: &[f64; ObjectiveVector::LEN], v: &[f64; ObjectiveVector::LEN]) -> f64 {
    weights.iter().zip(v).map(|(w, x)| w * x).sum()
}

/// Tie-break after equal scores: higher accuracy, lower energy, then id.
fn tie_break(a: &ImplementationProfile, b: &ImplementationProfile) -> Ordering {
    b.accuracy
        .total_cmp(&a.accuracy)
        .then(a.energy_mj.total_cmp(&b.energy_mj))
        .then_with(|| a.id.cmp(&b.id))
}

fn scores_for(
    entries: &[&ImplementationProfile],
    c: &MissionConstraints,
    current: Option<&str>,
) -> Vec<f64> {
    normalized(entries.iter().copied())
        .iter()
        .zip(entries)
        .map(|(v, p)| {
            let penalty = match current {
                Some(id) if id != p.id => c.switching_penalty,
                _ => 0.0,
            };
            weighted(&c.weights, v) + penalty
        })
        .collect()
}

/// Chooses the implementation a drone should run under `c`.
///
/// With a non-empty feasible set the chosen entry minimizes the weighted sum
/// of its normalized objectives over that set. With an empty feasible set the
/// least-violating shortlist entry is kept running, scored over the whole
/// shortlist. `current` only matters when `c.switching_penalty > 0`.
pub fn select_online(
    shortlist: &[ImplementationProfile],
    c: &MissionConstraints,
    current: Option<&str>,
) -> Result<SelectionDecision, SelectError> {
    if shortlist.is_empty() {
        return Err(SelectError::EmptyShortlist);
    }
    let feasible: Vec<&ImplementationProfile> = shortlist.iter().filter(|p| c.admits(p)).collect();

    let (pool, rationale, violations): (Vec<&ImplementationProfile>, Rationale, Vec<usize>) =
        match feasible.len() {
            0 => {
                let pool: Vec<_> = shortlist.iter().collect();
                let violations = pool.iter().map(|p| c.violations(p)).collect();
                (pool, Rationale::FallbackInfeasible, violations)
            }
            1 => (feasible, Rationale::SingleFeasible, vec_zero(1)),
            n => (feasible, Rationale::Scalarized, vec_zero(n)),
        };
    let scores = scores_for(&pool, c, current);

    let best = (0..pool.len())
        .min_by(|&i, &j| {
            violations[i]
                .cmp(&violations[j])
                .then(scores[i].total_cmp(&scores[j]))
                .then_with(|| tie_break(pool[i], pool[j]))
        })
        .expect("pool is non-empty");

    Ok(SelectionDecision {
        chosen: pool[best].id.clone(),
        feasible_count: if rationale == Rationale::FallbackInfeasible { 0 } else { pool.len() },
        scores: pool.iter().map(|p| p.id.clone()).zip(scores).collect(),
        rationale,
    })
}

fn vec_zero(n: usize) -> Vec<usize> {
    alloc::vec![0; n]
}
