//! Planning core for running intrusion detection across a heterogeneous
//! drone swarm.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It covers:
//!
//! * [`catalog`]: characterization records for IDS implementations and a
//!   seeded synthetic generator.
//! * [`pareto`]: the offline phase, storage filtering followed by Pareto
//!   front extraction per platform.
//! * [`selector`]: the online phase, mission-constraint filtering and a
//!   min-max normalized weighted-sum choice.
//! * [`distributor`]: capacity self-assessment, report merging and greedy
//!   flow-to-drone assignment with an exhaustive reference solver.
//! * [`sim`]: a deterministic discrete-event simulator wiring all of the
//!   above together over a mission timeline.
//!
//! File formats, scenario loading and the command-line frontend live in the
//! `swarmids` companion crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod catalog;
pub mod distributor;
pub mod drone;
pub mod pareto;
pub mod rng;
pub mod scenario;
pub mod selector;
pub mod sim;

pub use catalog::{
    synth_catalog, Band, Catalog, CatalogError, GenerationError, ImplementationProfile,
    ModelFamily, PlatformBands, PlatformKind, SynthParams,
};
pub use distributor::{
    brute_force_distribute, distribute_flows, merge_reports, self_assess, AssignmentPlan,
    CapacityReport, CostBreakdown, CostWeights, DistributeError, FlowBatch, MergedView,
};
pub use drone::DroneState;
pub use pareto::{dominates, filter_storage, offline_select, pareto_front, ObjectiveVector};
pub use scenario::{
    ConfigError, DistributionParams, DroneSpec, EnergyParams, EpochParams, Scenario, Zone,
};
pub use selector::{
    feasible_set, normalize, select_online, MissionConstraints, Rationale, SecurityLevel,
    SecurityProfiles, SelectError, SelectionDecision,
};
pub use sim::{run, SimError, SimMetrics, SimOutput};
