use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;

use crate::catalog::{ImplementationProfile, PlatformKind};
use crate::distributor::FlowBatch;

/// Mutable per-drone state carried through a mission.
#[derive(Debug, Clone, PartialEq)]
pub struct DroneState {
    pub drone_id: String,
    pub platform: PlatformKind,
    pub storage_budget_mb: f64,
    /// Current charge, never above `battery_capacity_j` and never negative.
    pub battery_j: f64,
    pub battery_capacity_j: f64,
    /// Share of compute held back for the drone's own mission workload.
    pub cpu_reserved_frac: f64,
    /// Always an id from `shortlist` when set.
    pub active_impl: Option<String>,
    pub shortlist: Vec<ImplementationProfile>,
    pub backlog: VecDeque<FlowBatch>,
}

impl DroneState {
    pub fn battery_frac(&self) -> f64 {
        if self.battery_capacity_j > 0.0 {
            (self.battery_j / self.battery_capacity_j).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    pub fn active_profile(&self) -> Option<&ImplementationProfile> {
        let id = self.active_impl.as_deref()?;
        self.shortlist.iter().find(|p| p.id == id)
    }

    pub fn backlog_flows(&self) -> u64 {
        self.backlog.iter().map(|b| b.flow_count).sum()
    }

    pub fn is_depleted(&self) -> bool {
        self.battery_j <= 0.0
    }
}
