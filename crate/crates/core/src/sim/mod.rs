//! Deterministic discrete-event simulation of a swarm mission.
//!
//! Drones fly through the zones of a [`Scenario`], receive traffic, pick
//! implementations, broadcast capacity reports, share traffic according to
//! the current plan, drain their batteries and sample detections. Events are
//! processed in `(time_s, seq)` order. All recurring events are scheduled up
//! front in the per-instant order
//! `ZoneTransition, SelectionEpoch, ReportEpoch, RedistributionEpoch,
//! TrafficArrival`, with `End` last; flow completions are scheduled as
//! service starts.

mod detection;
mod energy;
mod engine;
mod queue;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributor::{AssignmentPlan, CapacityReport};
use crate::scenario::ConfigError;
use crate::selector::{Rationale, SecurityLevel};

pub use detection::{sample_detection, DetectionOutcome};
pub use energy::{account_energy, energy_demand_j};
pub use engine::run;
pub use queue::EventQueue;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    ZoneTransition { zone: usize },
    TrafficArrival { drone: usize, tick: u64 },
    SelectionEpoch,
    ReportEpoch { epoch: u64 },
    RedistributionEpoch,
    FlowCompleted { drone: usize },
    End,
}

impl EventKind {
    pub fn tag(&self) -> EventTag {
        match self {
            Self::ZoneTransition { .. } => EventTag::ZoneTransition,
            Self::TrafficArrival { .. } => EventTag::TrafficArrival,
            Self::SelectionEpoch => EventTag::SelectionEpoch,
            Self::ReportEpoch { .. } => EventTag::ReportEpoch,
            Self::RedistributionEpoch => EventTag::RedistributionEpoch,
            Self::FlowCompleted { .. } => EventTag::FlowCompleted,
            Self::End => EventTag::End,
        }
    }
}

/// Event kind without its data, as written to the event log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventTag {
    ZoneTransition,
    TrafficArrival,
    SelectionEpoch,
    ReportEpoch,
    RedistributionEpoch,
    FlowCompleted,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time_s: f64,
    pub seq: u64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub drone_id: String,
    pub chosen: String,
    pub previous: Option<String>,
    pub rationale: Rationale,
    pub feasible_count: usize,
    pub switched: bool,
}

/// What an event did, beyond its energy charges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "detail", rename_all = "snake_case")]
pub enum Detail {
    Zone {
        zone_id: String,
        security: SecurityLevel,
        selections: Vec<SelectionRecord>,
    },
    Selection {
        selections: Vec<SelectionRecord>,
    },
    Reports {
        reports: Vec<CapacityReport>,
    },
    Plan {
        plan: Option<AssignmentPlan>,
        /// Per origin drone, the targets its arrivals rotate through.
        routes: BTreeMap<String, Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    Arrival {
        flow_id: Option<String>,
        flow_count: u64,
        size_bytes: u64,
        target: Option<String>,
    },
    Completion {
        flow_id: String,
        flow_count: u64,
        malicious: u64,
        detected: u64,
        missed: u64,
    },
    End {
        dropped: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Payload {
    /// Joules drained from each drone while handling the event.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub energy_j: BTreeMap<String, f64>,
    #[serde(flatten)]
    pub detail: Detail,
}

/// One line of the event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub time_s: f64,
    pub seq: u64,
    pub kind: EventTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drone_id: Option<String>,
    pub payload: Payload,
}

/// Counters for one drone, or for the whole swarm.
///
/// `flows_generated` counts flows arriving at a drone as their origin; the
/// other flow counters count flows held by the drone (analyzed, or still
/// queued at mission end). `malicious_total` covers analyzed and dropped
/// flows, `detected + missed` only analyzed ones.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DroneMetrics {
    pub drone_id: String,
    pub flows_generated: u64,
    pub flows_analyzed: u64,
    pub malicious_total: u64,
    pub detected: u64,
    pub missed: u64,
    pub dropped: u64,
    pub mean_latency_ms: f64,
    pub energy_j: f64,
    pub comm_bytes: u64,
    pub impl_switches: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMetrics {
    pub seed: u64,
    pub duration_s: f64,
    pub drones: Vec<DroneMetrics>,
    pub swarm: DroneMetrics,
}

impl SimMetrics {
    pub fn detection_rate(&self) -> Option<f64> {
        let analyzed = self.swarm.detected + self.swarm.missed;
        (analyzed > 0).then(|| self.swarm.detected as f64 / analyzed as f64)
    }
}

/// Per-drone state sampled at every report epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSample {
    pub time_s: f64,
    pub drone_id: String,
    pub battery_j: f64,
    pub queue_flows: u64,
    pub cumulative_detected: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub metrics: SimMetrics,
    pub events: Vec<EventRecord>,
    pub series: Vec<SeriesSample>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("drone `{drone_id}` has no implementation that fits its platform and storage")]
    NoImplementationForDrone { drone_id: String },
}
