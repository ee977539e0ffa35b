//! JSON scenario documents (`schema_version: 1`).
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "catalog": { "synth": { "seed": 7, "n_per_platform": 12 } },
//!   "drones": [ { "drone_id": "d1", "platform": "rpi4b", "storage_budget_mb": 200,
//!                 "battery_capacity_j": 20000, "cpu_reserved_frac": 0.2 } ],
//!   "zones": [ { "zone_id": "coast", "enter_time_s": 0, "security": "low",
//!                "attack_prob": 0.05, "flow_rate_fps": 20, "mean_flow_bytes": 1500 } ],
//!   "duration_s": 300
//! }
//! ```
//!
//! `catalog` may instead be `{ "path": "catalog.csv" }`, resolved against the
//! scenario file's directory. `security_profiles`, `distribution` and `energy`
//! are optional; profiles given for a level replace that level's default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use swarmids_core::{
    synth_catalog, Catalog, DistributionParams, DroneSpec, EnergyParams, MissionConstraints,
    Scenario, SecurityLevel, SecurityProfiles, SynthParams, Zone,
};
use thiserror::Error;

use crate::catalog_io::{load_catalog, CatalogIoError};

pub const SCHEMA_VERSION: u32 = 1;

/// The scenario shipped with the binary: 5 drones, 3 zones, 300 s.
pub const BUNDLED_SCENARIO: &str = include_str!("../scenarios/default.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogSource {
    Path(PathBuf),
    Synth {
        seed: u64,
        n_per_platform: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        params: Option<Box<SynthParams>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub catalog: CatalogSource,
    pub drones: Vec<DroneSpec>,
    pub zones: Vec<Zone>,
    #[serde(default)]
    pub security_profiles: BTreeMap<SecurityLevel, MissionConstraints>,
    #[serde(default)]
    pub distribution: DistributionParams,
    #[serde(default)]
    pub energy: EnergyParams,
    pub duration_s: f64,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scenario: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),
    #[error("scenario catalog: {0}")]
    Catalog(#[from] CatalogIoError),
    #[error("scenario catalog synthesis: {0}")]
    Generation(#[from] swarmids_core::GenerationError),
    #[error(transparent)]
    Invalid(#[from] swarmids_core::ConfigError),
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::Version(file.schema_version));
        }
        Ok(file)
    }

    /// Builds the catalog and returns a validated scenario.
    pub fn resolve(self, base_dir: &Path) -> Result<Scenario, ScenarioError> {
        let catalog: Catalog = match &self.catalog {
            CatalogSource::Path(p) => load_catalog(&base_dir.join(p))?,
            CatalogSource::Synth { seed, n_per_platform, params } => {
                synth_catalog(*seed, *n_per_platform, &params.clone().unwrap_or_default())?
            }
        };
        let mut profiles = SecurityProfiles::default();
        profiles.0.extend(self.security_profiles);
        let scenario = Scenario {
            catalog,
            drones: self.drones,
            zones: self.zones,
            security_profiles: profiles,
            distribution: self.distribution,
            energy: self.energy,
            duration_s: self.duration_s,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    ScenarioFile::parse(&text)?.resolve(base)
}

pub fn bundled_scenario() -> Scenario {
    ScenarioFile::parse(BUNDLED_SCENARIO)
        .and_then(|f| f.resolve(Path::new(".")))
        .expect("bundled scenario is valid")
}
