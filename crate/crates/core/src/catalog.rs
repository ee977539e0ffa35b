//! Characterization records for IDS implementations.
//!
//! An [`ImplementationProfile`] is one (model family, platform) pairing with
//! its measured QoS and resource metrics. A [`Catalog`] is an ordered,
//! validated collection of profiles. Catalogs are either loaded from files by
//! the IO crate or synthesized here with [`synth_catalog`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::pareto::{front_indices, ObjectiveVector};

/// Embedded execution platform class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PlatformKind {
    /// CPU single-board computer (Raspberry Pi 4B).
    #[serde(rename = "rpi4b")]
    CpuSbc,
    /// GPU system-on-chip (Jetson Xavier).
    #[serde(rename = "jetson-xavier")]
    GpuSoc,
    /// FPGA system-on-chip (Pynq-Z2).
    #[serde(rename = "pynq-z2")]
    FpgaSoc,
}

impl PlatformKind {
    /// The three canonical platforms, in catalog order.
    pub const ALL: [PlatformKind; 3] = [Self::CpuSbc, Self::GpuSoc, Self::FpgaSoc];

    pub fn label(self) -> &'static str {
        match self {
            Self::CpuSbc => "rpi4b",
            Self::GpuSoc => "jetson-xavier",
            Self::FpgaSoc => "pynq-z2",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.label() == label)
    }

    fn index(self) -> usize {
        match self {
            Self::CpuSbc => 0,
            Self::GpuSoc => 1,
            Self::FpgaSoc => 2,
        }
    }
}

impl fmt::Display for PlatformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PlatformKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_label(s).ok_or_else(|| format!("unknown platform `{s}`"))
    }
}

/// Machine-learning model family behind an implementation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelFamily {
    RandomForest,
    Dnn,
    Other(String),
}

impl ModelFamily {
    /// Label used in catalog files: `random_forest`, `dnn` or `other:<name>`.
    pub fn label(&self) -> String {
        match self {
            Self::RandomForest => "random_forest".to_string(),
            Self::Dnn => "dnn".to_string(),
            Self::Other(name) => format!("other:{name}"),
        }
    }

    fn short(&self) -> &str {
        match self {
            Self::RandomForest => "rf",
            Self::Dnn => "dnn",
            Self::Other(name) => name,
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for ModelFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random_forest" => Ok(Self::RandomForest),
            "dnn" => Ok(Self::Dnn),
            _ => match s.strip_prefix("other:") {
                Some(name) if !name.is_empty() => Ok(Self::Other(name.to_string())),
                _ => Err(format!("unknown model family `{s}`")),
            },
        }
    }
}

impl Serialize for ModelFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for ModelFamily {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// One characterized IDS implementation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplementationProfile {
    pub id: String,
    pub model_family: ModelFamily,
    pub platform: PlatformKind,
    /// Detection accuracy in `[0, 1]`.
    pub accuracy: f64,
    /// Mean per-flow analysis latency.
    pub latency_ms: f64,
    /// Mean per-flow energy.
    pub energy_mj: f64,
    /// Runtime main-memory footprint in MiB.
    pub memory_mb: f64,
    /// On-disk footprint in MiB.
    pub storage_mb: f64,
}

impl ImplementationProfile {
    /// Objective vector in canonical minimization form.
    pub fn objectives(&self) -> ObjectiveVector {
        ObjectiveVector::from_profile(self)
    }

    /// Checks the per-field ranges; returns the offending field name.
    pub fn check(&self) -> Result<(), (&'static str, String)> {
        if self.id.is_empty() {
            return Err(("id", "must not be empty".into()));
        }
        if !(0.0..=1.0).contains(&self.accuracy) {
            return Err(("accuracy", format!("{} is outside [0, 1]", self.accuracy)));
        }
        for (field, value) in [
            ("latency_ms", self.latency_ms),
            ("energy_mj", self.energy_mj),
            ("memory_mb", self.memory_mb),
            ("storage_mb", self.storage_mb),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err((field, format!("{value} must be a positive finite number")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("entry {index}: field `{field}`: {message}")]
    Validation {
        /// Zero-based position of the entry.
        index: usize,
        field: &'static str,
        message: String,
    },
}

/// Ordered, validated collection of implementation profiles.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Catalog {
    entries: Vec<ImplementationProfile>,
}

impl Catalog {
    /// Validates every entry and the uniqueness of ids, keeping input order.
    pub fn new(entries: Vec<ImplementationProfile>) -> Result<Self, CatalogError> {
        for (index, entry) in entries.iter().enumerate() {
            if let Err((field, message)) = entry.check() {
                return Err(CatalogError::Validation { index, field, message });
            }
            if entries[..index].iter().any(|e| e.id == entry.id) {
                return Err(CatalogError::Validation {
                    index,
                    field: "id",
                    message: format!("duplicate id `{}`", entry.id),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[ImplementationProfile] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, ImplementationProfile> {
        self.entries.iter()
    }

    pub fn get(&self, id: &str) -> Option<&ImplementationProfile> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn for_platform(&self, platform: PlatformKind) -> impl Iterator<Item = &ImplementationProfile> {
        self.entries.iter().filter(move |e| e.platform == platform)
    }

    pub fn into_entries(self) -> Vec<ImplementationProfile> {
        self.entries
    }
}

impl<'de> Deserialize<'de> for Catalog {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<ImplementationProfile>::deserialize(deserializer)?;
        Catalog::new(entries).map_err(serde::de::Error::custom)
    }
}

impl<'a> IntoIterator for &'a Catalog {
    type Item = &'a ImplementationProfile;
    type IntoIter = core::slice::Iter<'a, ImplementationProfile>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// Closed interval sampled log-uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn sample_log(&self, rng: &mut ChaCha8Rng) -> f64 {
        let u: f64 = rng.gen();
        let (ln_lo, ln_hi) = (libm::log(self.lo), libm::log(self.hi));
        libm::exp(ln_lo + u * (ln_hi - ln_lo)).clamp(self.lo, self.hi)
    }
}

/// Metric bands for one platform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlatformBands {
    pub latency_ms: Band,
    pub energy_mj: Band,
    pub memory_mb: Band,
    pub storage_mb: Band,
}

/// Knobs for [`synth_catalog`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    /// Bands indexed in [`PlatformKind::ALL`] order.
    pub bands: [PlatformBands; 3],
    /// Accuracy span mapped onto the latency ranking.
    pub accuracy_lo: f64,
    pub accuracy_hi: f64,
    /// Uniform jitter added to accuracy, in absolute units.
    pub accuracy_noise: f64,
    /// In `[-1, 1]`. `1` makes the slowest implementation the most accurate,
    /// `-1` the fastest, `0` decouples accuracy from latency.
    pub accuracy_latency_coupling: f64,
    /// Draws per platform before giving up on the front-size condition.
    pub max_attempts: u32,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            bands: [
                PlatformBands {
                    latency_ms: Band::new(2.0, 40.0),
                    energy_mj: Band::new(5.0, 120.0),
                    memory_mb: Band::new(50.0, 600.0),
                    storage_mb: Band::new(5.0, 400.0),
                },
                PlatformBands {
                    latency_ms: Band::new(0.5, 15.0),
                    energy_mj: Band::new(8.0, 200.0),
                    memory_mb: Band::new(200.0, 2000.0),
                    storage_mb: Band::new(10.0, 800.0),
                },
                PlatformBands {
                    latency_ms: Band::new(0.1, 5.0),
                    energy_mj: Band::new(1.0, 30.0),
                    memory_mb: Band::new(20.0, 400.0),
                    storage_mb: Band::new(2.0, 100.0),
                },
            ],
            accuracy_lo: 0.80,
            accuracy_hi: 0.995,
            accuracy_noise: 0.01,
            accuracy_latency_coupling: 1.0,
            max_attempts: 64,
        }
    }
}

impl SynthParams {
    pub fn bands_for(&self, platform: PlatformKind) -> &PlatformBands {
        &self.bands[platform.index()]
    }

    fn check(&self) -> Result<(), String> {
        for bands in &self.bands {
            for (name, band) in [
                ("latency_ms", bands.latency_ms),
                ("energy_mj", bands.energy_mj),
                ("memory_mb", bands.memory_mb),
                ("storage_mb", bands.storage_mb),
            ] {
                // values are rounded to 1e-3, so the floor keeps them positive
                if !(band.lo >= 1e-3 && band.lo <= band.hi && band.hi.is_finite()) {
                    return Err(format!("{name} band [{}, {}] is invalid", band.lo, band.hi));
                }
            }
        }
        let acc_ok = (0.0..=1.0).contains(&self.accuracy_lo)
            && (0.0..=1.0).contains(&self.accuracy_hi)
            && self.accuracy_lo <= self.accuracy_hi;
        if !acc_ok {
            return Err("accuracy span must satisfy 0 <= lo <= hi <= 1".into());
        }
        if !(self.accuracy_noise >= 0.0) {
            return Err("accuracy_noise must be non-negative".into());
        }
        if !(-1.0..=1.0).contains(&self.accuracy_latency_coupling) {
            return Err("accuracy_latency_coupling must lie in [-1, 1]".into());
        }
        if self.max_attempts == 0 {
            return Err("max_attempts must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerationError {
    #[error("invalid synthesis parameters: {0}")]
    InvalidParams(String),
    #[error("no draw with a Pareto front of at least 2 members for {platform} after {attempts} attempts")]
    FrontTooSmall { platform: PlatformKind, attempts: u32 },
}

/// Platforms with at least this many entries must yield a front of two or more.
pub const MIN_SIZE_FOR_FRONT_CHECK: usize = 4;

const FAMILY_CYCLE: usize = 3;

fn family_for(i: usize) -> ModelFamily {
    match i % FAMILY_CYCLE {
        0 => ModelFamily::RandomForest,
        1 => ModelFamily::Dnn,
        _ => ModelFamily::Other("knn".to_string()),
    }
}

fn round_to(value: f64, scale: f64) -> f64 {
    libm::round(value * scale) / scale
}

fn draw_platform(
    rng: &mut ChaCha8Rng,
    platform: PlatformKind,
    n: usize,
    params: &SynthParams,
) -> Vec<ImplementationProfile> {
    let bands = params.bands_for(platform);
    let mut drafts: Vec<ImplementationProfile> = (0..n)
        .map(|i| {
            let family = family_for(i);
            ImplementationProfile {
                id: format!("{}-{}-{:02}", platform.label(), family.short(), i),
                model_family: family,
                platform,
                accuracy: 0.0,
                latency_ms: round_to(bands.latency_ms.sample_log(rng), 1e3).max(1e-3),
                energy_mj: round_to(bands.energy_mj.sample_log(rng), 1e3).max(1e-3),
                memory_mb: round_to(bands.memory_mb.sample_log(rng), 1e3).max(1e-3),
                storage_mb: round_to(bands.storage_mb.sample_log(rng), 1e3).max(1e-3),
            }
        })
        .collect();

    // rank 0 = fastest
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        drafts[a]
            .latency_ms
            .total_cmp(&drafts[b].latency_ms)
            .then(a.cmp(&b))
    });
    let span = params.accuracy_hi - params.accuracy_lo;
    for (rank, &idx) in order.iter().enumerate() {
        let t = if n > 1 { rank as f64 / (n - 1) as f64 } else { 0.5 };
        let frac = 0.5 + params.accuracy_latency_coupling * (t - 0.5);
        let jitter = params.accuracy_noise * (2.0 * rng.gen::<f64>() - 1.0);
        let acc = (params.accuracy_lo + span * frac + jitter).clamp(0.0, 1.0);
        drafts[idx].accuracy = round_to(acc, 1e4).clamp(0.0, 1.0);
    }
    drafts
}

/// Generates a reproducible catalog with `n_per_platform` entries on each of
/// the three canonical platforms.
///
/// Latency, energy, memory and storage are log-uniform within the platform
/// bands; accuracy follows the latency ranking plus jitter. When a platform has
/// at least [`MIN_SIZE_FOR_FRONT_CHECK`] entries the draw is repeated until its
/// Pareto front holds two or more members.
pub fn synth_catalog(
    seed: u64,
    n_per_platform: usize,
    params: &SynthParams,
) -> Result<Catalog, GenerationError> {
    if n_per_platform == 0 {
        return Err(GenerationError::InvalidParams("n_per_platform must be at least 1".into()));
    }
    params.check().map_err(GenerationError::InvalidParams)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(3 * n_per_platform);
    for platform in PlatformKind::ALL {
        let mut accepted = None;
        for _ in 0..params.max_attempts {
            let draft = draw_platform(&mut rng, platform, n_per_platform, params);
            if n_per_platform < MIN_SIZE_FOR_FRONT_CHECK {
                accepted = Some(draft);
                break;
            }
            let vectors: Vec<ObjectiveVector> = draft.iter().map(|p| p.objectives()).collect();
            if front_indices(&vectors).len() >= 2 {
                accepted = Some(draft);
                break;
            }
        }
        match accepted {
            Some(draft) => entries.extend(draft),
            None => {
                return Err(GenerationError::FrontTooSmall {
                    platform,
                    attempts: params.max_attempts,
                })
            }
        }
    }
    Catalog::new(entries).map_err(|e| GenerationError::InvalidParams(e.to_string()))
}
