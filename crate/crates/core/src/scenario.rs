//! Mission description consumed by the simulator.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, PlatformKind};
use crate::distributor::CostWeights;
use crate::selector::{SecurityLevel, SecurityProfiles};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroneSpec {
    pub drone_id: String,
    pub platform: PlatformKind,
    pub storage_budget_mb: f64,
    pub battery_capacity_j: f64,
    pub cpu_reserved_frac: f64,
    /// Starting charge as a fraction of capacity.
    #[serde(default = "full")]
    pub initial_battery_frac: f64,
}

fn full() -> f64 {
    1.0
}

/// A stretch of the mission with its own threat and traffic profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub zone_id: String,
    pub enter_time_s: f64,
    pub security: SecurityLevel,
    /// Probability that a flow is malicious.
    pub attack_prob: f64,
    /// Flows per second arriving at each drone.
    pub flow_rate_fps: f64,
    pub mean_flow_bytes: u64,
}

/// Periods, in simulated seconds, of the recurring events.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpochParams {
    pub selection_s: f64,
    pub report_s: f64,
    pub redistribution_s: f64,
    /// Spacing of traffic arrivals at each drone.
    pub arrival_s: f64,
}

impl Default for EpochParams {
    fn default() -> Self {
        Self { selection_s: 5.0, report_s: 5.0, redistribution_s: 5.0, arrival_s: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistributionParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub epochs: EpochParams,
    /// Reports older than this many report epochs are ignored.
    pub staleness_epochs: u64,
    /// Each drone's forecast traffic for the next period is split into this
    /// many equal batches before planning.
    pub forecast_chunks: u32,
}

impl Default for DistributionParams {
    fn default() -> Self {
        let w = CostWeights::default();
        Self {
            alpha: w.alpha,
            beta: w.beta,
            gamma: w.gamma,
            epochs: EpochParams::default(),
            staleness_epochs: 2,
            forecast_chunks: 4,
        }
    }
}

impl DistributionParams {
    pub fn weights(&self) -> CostWeights {
        CostWeights { alpha: self.alpha, beta: self.beta, gamma: self.gamma }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnergyParams {
    pub idle_w: f64,
    pub comm_j_per_mb: f64,
    pub report_bytes: u64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self { idle_w: 2.0, comm_j_per_mb: 0.5, report_bytes: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid scenario: {0}")]
pub struct ConfigError(pub String);

/// A fully resolved mission: catalog, swarm, timeline and parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub catalog: Catalog,
    pub drones: Vec<DroneSpec>,
    pub zones: Vec<Zone>,
    pub security_profiles: SecurityProfiles,
    pub distribution: DistributionParams,
    pub energy: EnergyParams,
    pub duration_s: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError(msg));

        if !(self.duration_s.is_finite() && self.duration_s >= 0.0) {
            return fail(format!("duration_s must be finite and non-negative, got {}", self.duration_s));
        }
        if self.drones.is_empty() {
            return fail("at least one drone is required".into());
        }
        for (i, d) in self.drones.iter().enumerate() {
            if d.drone_id.is_empty() {
                return fail(format!("drone {i} has an empty id"));
            }
            if self.drones[..i].iter().any(|o| o.drone_id == d.drone_id) {
                return fail(format!("duplicate drone id `{}`", d.drone_id));
            }
            if self.catalog.for_platform(d.platform).next().is_none() {
                return fail(format!("drone `{}`: platform {} has no catalog entry", d.drone_id, d.platform));
            }
            if !(d.storage_budget_mb > 0.0) {
                return fail(format!("drone `{}`: storage_budget_mb must be positive", d.drone_id));
            }
            if !(d.battery_capacity_j > 0.0 && d.battery_capacity_j.is_finite()) {
                return fail(format!("drone `{}`: battery_capacity_j must be positive", d.drone_id));
            }
            if !(0.0..=1.0).contains(&d.cpu_reserved_frac) {
                return fail(format!("drone `{}`: cpu_reserved_frac must lie in [0, 1]", d.drone_id));
            }
            if !(0.0..=1.0).contains(&d.initial_battery_frac) {
                return fail(format!("drone `{}`: initial_battery_frac must lie in [0, 1]", d.drone_id));
            }
        }

        let Some(first) = self.zones.first() else {
            return fail("at least one zone is required".into());
        };
        if first.enter_time_s != 0.0 {
            return fail(format!("first zone `{}` must start at 0", first.zone_id));
        }
        for (i, z) in self.zones.iter().enumerate() {
            if i > 0 {
                if !(z.enter_time_s > self.zones[i - 1].enter_time_s) {
                    return fail(format!("zone `{}` does not start after its predecessor", z.zone_id));
                }
                if !(z.enter_time_s < self.duration_s) {
                    return fail(format!("zone `{}` starts at or after the mission end", z.zone_id));
                }
            }
            if !(0.0..=1.0).contains(&z.attack_prob) {
                return fail(format!("zone `{}`: attack_prob must lie in [0, 1]", z.zone_id));
            }
            if !(z.flow_rate_fps.is_finite() && z.flow_rate_fps >= 0.0) {
                return fail(format!("zone `{}`: flow_rate_fps must be non-negative", z.zone_id));
            }
            if z.mean_flow_bytes == 0 {
                return fail(format!("zone `{}`: mean_flow_bytes must be positive", z.zone_id));
            }
            match self.security_profiles.get(z.security) {
                None => return fail(format!("zone `{}`: no profile for level {}", z.zone_id, z.security.label())),
                Some(c) => {
                    if let Err(e) = c.validate() {
                        return fail(format!("profile {}: {e}", z.security.label()));
                    }
                }
            }
        }

        let d = &self.distribution;
        for (name, w) in [("alpha", d.alpha), ("beta", d.beta), ("gamma", d.gamma)] {
            if !(w.is_finite() && w >= 0.0) {
                return fail(format!("{name} must be non-negative"));
            }
        }
        let e = d.epochs;
        for (name, period) in [
            ("selection_s", e.selection_s),
            ("report_s", e.report_s),
            ("redistribution_s", e.redistribution_s),
            ("arrival_s", e.arrival_s),
        ] {
            if !(period.is_finite() && period > 0.0) {
                return fail(format!("epoch period {name} must be positive"));
            }
        }
        if d.forecast_chunks == 0 {
            return fail("forecast_chunks must be at least 1".into());
        }
        let en = &self.energy;
        if !(en.idle_w >= 0.0 && en.comm_j_per_mb >= 0.0) {
            return fail("energy parameters must be non-negative".into());
        }
        Ok(())
    }
}
