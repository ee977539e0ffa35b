//! Swarm-level traffic distribution.
//!
//! Every drone estimates what it can sustain ([`self_assess`]) and broadcasts
//! the resulting [`CapacityReport`]. Any drone holding the same reports can
//! merge them ([`merge_reports`]) and compute the same [`AssignmentPlan`]
//! ([`distribute_flows`]), so the plan needs no coordinator.
//!
//! The cost of a plan blends three terms, each in a fixed unit before
//! weighting: makespan in seconds, energy in joules and radio traffic in
//! megabytes.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drone::DroneState;

/// Below this battery fraction capacity is derated linearly to zero.
pub const BATTERY_DERATING_KNEE: f64 = 0.2;

/// Upper bound on `drones^flows` for [`brute_force_distribute`].
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub drone_id: String,
    pub epoch: u64,
    /// Sustainable analysis throughput in flows per second.
    pub capacity_fps: f64,
    pub backlog_flows: u64,
    pub battery_frac: f64,
    pub active_impl: String,
    /// Per-flow energy of `active_impl`, carried so that planners need no
    /// catalog lookup.
    pub energy_mj_per_flow: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowBatch {
    pub flow_id: String,
    pub origin_drone: String,
    pub size_bytes: u64,
    pub flow_count: u64,
}

/// Weights on the makespan, energy and communication terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 0.5, gamma: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub makespan_s: f64,
    pub energy_mj: f64,
    pub comm_bytes: u64,
    /// `alpha * makespan_s + beta * energy_j + gamma * comm_mb`.
    pub scalar: f64,
}

impl CostBreakdown {
    pub fn new(makespan_s: f64, energy_mj: f64, comm_bytes: u64, w: &CostWeights) -> Self {
        Self {
            makespan_s,
            energy_mj,
            comm_bytes,
            scalar: scalar_cost(makespan_s, energy_mj, comm_bytes, w),
        }
    }

    pub fn zero() -> Self {
        Self { makespan_s: 0.0, energy_mj: 0.0, comm_bytes: 0, scalar: 0.0 }
    }
}

fn scalar_cost(makespan_s: f64, energy_mj: f64, comm_bytes: u64, w: &CostWeights) -> f64 {
    w.alpha * makespan_s + w.beta * (energy_mj / 1e3) + w.gamma * (comm_bytes as f64 / 1e6)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentPlan {
    /// flow_id to drone_id.
    pub assignments: BTreeMap<String, String>,
    pub epoch: u64,
    pub predicted_cost: CostBreakdown,
}

/// Freshest usable report per drone, keyed (and so ordered) by drone id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MergedView {
    pub epoch: u64,
    pub reports: BTreeMap<String, CapacityReport>,
}

impl MergedView {
    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistributeError {
    #[error("drone `{0}` has no active implementation")]
    NoActiveImplementation(String),
    #[error("no drone in the view has spare capacity for {flows} flow batches")]
    NoCapacity { flows: usize },
    #[error("instance too large for exhaustive search ({drones}^{flows} > {BRUTE_FORCE_LIMIT})")]
    InstanceTooLarge { drones: usize, flows: usize },
}

pub fn battery_derating(battery_frac: f64) -> f64 {
    if battery_frac >= BATTERY_DERATING_KNEE {
        1.0
    } else {
        battery_frac.max(0.0) / BATTERY_DERATING_KNEE
    }
}

/// Throughput a drone can sustain given its active implementation, reserved
/// compute and battery.
pub fn self_assess(drone: &DroneState, epoch: u64) -> Result<CapacityReport, DistributeError> {
    let active = drone
        .active_profile()
        .ok_or_else(|| DistributeError::NoActiveImplementation(drone.drone_id.clone()))?;
    let battery_frac = drone.battery_frac();
    let duty = (1.0 - drone.cpu_reserved_frac) * battery_derating(battery_frac);
    Ok(CapacityReport {
        drone_id: drone.drone_id.clone(),
        epoch,
        capacity_fps: (1000.0 / active.latency_ms) * duty,
        backlog_flows: drone.backlog_flows(),
        battery_frac,
        active_impl: active.id.clone(),
        energy_mj_per_flow: active.energy_mj,
    })
}

/// Keeps, per drone, the newest report not later than `epoch`. Drones whose
/// newest such report is older than `staleness_epochs` are dropped.
pub fn merge_reports(reports: &[CapacityReport], epoch: u64, staleness_epochs: u64) -> MergedView {
    let mut latest: BTreeMap<String, CapacityReport> = BTreeMap::new();
    for r in reports.iter().filter(|r| r.epoch <= epoch) {
        match latest.get(&r.drone_id) {
            Some(kept) if kept.epoch >= r.epoch => {}
            _ => {
                latest.insert(r.drone_id.clone(), r.clone());
            }
        }
    }
    latest.retain(|_, r| epoch - r.epoch <= staleness_epochs);
    MergedView { epoch, reports: latest }
}

/// Drones with positive capacity, in id order.
fn candidates(view: &MergedView) -> Vec<&CapacityReport> {
    view.reports.values().filter(|r| r.capacity_fps > 0.0).collect()
}

/// Running totals of a (partial) assignment over the candidate drones.
struct LoadState<'a> {
    drones: &'a [&'a CapacityReport],
    load: Vec<f64>,
    makespan_s: f64,
    energy_mj: f64,
    comm_bytes: u64,
}

impl<'a> LoadState<'a> {
    fn new(drones: &'a [&'a CapacityReport]) -> Self {
        let load: Vec<f64> = drones.iter().map(|d| d.backlog_flows as f64).collect();
        let makespan_s = drones
            .iter()
            .zip(&load)
            .map(|(d, l)| l / d.capacity_fps)
            .fold(0.0, f64::max);
        Self { drones, load, makespan_s, energy_mj: 0.0, comm_bytes: 0 }
    }

    fn with(&self, flow: &FlowBatch, d: usize) -> (f64, f64, u64) {
        let target = self.drones[d];
        let finish = (self.load[d] + flow.flow_count as f64) / target.capacity_fps;
        let comm = if target.drone_id == flow.origin_drone { 0 } else { flow.size_bytes };
        (
            self.makespan_s.max(finish),
            self.energy_mj + flow.flow_count as f64 * target.energy_mj_per_flow,
            self.comm_bytes + comm,
        )
    }

    fn assign(&mut self, flow: &FlowBatch, d: usize) {
        let (makespan_s, energy_mj, comm_bytes) = self.with(flow, d);
        self.load[d] += flow.flow_count as f64;
        self.makespan_s = makespan_s;
        self.energy_mj = energy_mj;
        self.comm_bytes = comm_bytes;
    }

    fn cost(&self, w: &CostWeights) -> CostBreakdown {
        CostBreakdown::new(self.makespan_s, self.energy_mj, self.comm_bytes, w)
    }
}

/// Greedy list scheduling: largest batches first, each placed on the drone
/// with the lowest resulting scalar cost (ties go to the smaller drone id).
pub fn distribute_flows(
    view: &MergedView,
    flows: &[FlowBatch],
    weights: &CostWeights,
) -> Result<AssignmentPlan, DistributeError> {
    if flows.is_empty() {
        return Ok(AssignmentPlan {
            assignments: BTreeMap::new(),
            epoch: view.epoch,
            predicted_cost: CostBreakdown::zero(),
        });
    }
    let drones = candidates(view);
    if drones.is_empty() {
        return Err(DistributeError::NoCapacity { flows: flows.len() });
    }

    let mut order: Vec<&FlowBatch> = flows.iter().collect();
    order.sort_by(|a, b| b.flow_count.cmp(&a.flow_count).then_with(|| a.flow_id.cmp(&b.flow_id)));

    let mut state = LoadState::new(&drones);
    let mut assignments = BTreeMap::new();
    for flow in order {
        let mut best: Option<(usize, f64)> = None;
        for d in 0..drones.len() {
            let (m, e, c) = state.with(flow, d);
            let cost = scalar_cost(m, e, c, weights);
            if best.is_none_or(|(_, b)| cost < b) {
                best = Some((d, cost));
            }
        }
        let (d, _) = best.expect("at least one candidate");
        state.assign(flow, d);
        assignments.insert(flow.flow_id.clone(), drones[d].drone_id.clone());
    }
    Ok(AssignmentPlan { assignments, epoch: view.epoch, predicted_cost: state.cost(weights) })
}

/// Exhaustive reference solver over every assignment of `flows` to the
/// drones with positive capacity. Among equal-cost optima the
/// lexicographically smallest assignment vector (flows in input order,
/// drones in id order) wins.
pub fn brute_force_distribute(
    view: &MergedView,
    flows: &[FlowBatch],
    weights: &CostWeights,
) -> Result<AssignmentPlan, DistributeError> {
    let drones = candidates(view);
    if flows.is_empty() {
        return Ok(AssignmentPlan {
            assignments: BTreeMap::new(),
            epoch: view.epoch,
            predicted_cost: CostBreakdown::zero(),
        });
    }
    if drones.is_empty() {
        return Err(DistributeError::NoCapacity { flows: flows.len() });
    }
    let too_large = DistributeError::InstanceTooLarge { drones: drones.len(), flows: flows.len() };
    let space = u32::try_from(flows.len())
        .ok()
        .and_then(|n| (drones.len() as u64).checked_pow(n))
        .ok_or(too_large.clone())?;
    if space > BRUTE_FORCE_LIMIT {
        return Err(too_large);
    }

    let m = drones.len();
    let mut choice = alloc::vec![0usize; flows.len()];
    let mut best: Option<(Vec<usize>, CostBreakdown)> = None;
    loop {
        let mut state = LoadState::new(&drones);
        for (flow, &d) in flows.iter().zip(&choice) {
            state.assign(flow, d);
        }
        let cost = state.cost(weights);
        if best.as_ref().is_none_or(|(_, b)| cost.scalar < b.scalar) {
            best = Some((choice.clone(), cost));
        }

        // odometer, first flow most significant
        let mut pos = flows.len();
        loop {
            if pos == 0 {
                let (choice, cost) = best.expect("at least one assignment enumerated");
                let assignments = flows
                    .iter()
                    .zip(choice)
                    .map(|(f, d)| (f.flow_id.clone(), drones[d].drone_id.clone()))
                    .collect();
                return Ok(AssignmentPlan { assignments, epoch: view.epoch, predicted_cost: cost });
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < m {
                break;
            }
            choice[pos] = 0;
        }
    }
}
