use crate::distributor::FlowBatch;
use crate::drone::DroneState;
use crate::scenario::EnergyParams;

/// Joules needed for `dt_s` of idling, `flow_energy_mj` of analysis and
/// `bytes` of radio traffic.
pub fn energy_demand_j(params: &EnergyParams, dt_s: f64, flow_energy_mj: f64, bytes: u64) -> f64 {
    params.idle_w * dt_s + flow_energy_mj / 1e3 + params.comm_j_per_mb * bytes as f64 / 1e6
}

/// Drains the battery for an interval and returns the joules actually taken.
///
/// The battery is floored at zero, so a nearly empty drone is charged only
/// what it has left.
pub fn account_energy(
    drone: &mut DroneState,
    params: &EnergyParams,
    dt_s: f64,
    flows_processed: &[FlowBatch],
    energy_mj_per_flow: f64,
    bytes_tx_rx: u64,
) -> f64 {
    debug_assert!(dt_s >= 0.0);
    let flows: u64 = flows_processed.iter().map(|b| b.flow_count).sum();
    let demand = energy_demand_j(params, dt_s, flows as f64 * energy_mj_per_flow, bytes_tx_rx);
    let drained = demand.min(drone.battery_j).max(0.0);
    drone.battery_j = (drone.battery_j - drained).max(0.0);
    drained
}
