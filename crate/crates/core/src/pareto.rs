//! Offline selection: storage feasibility and Pareto-front extraction.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, ImplementationProfile, PlatformKind};

/// Objectives in canonical minimization form:
/// `(-accuracy, latency_ms, energy_mj, memory_mb)`.
///
/// Storage is deliberately absent; it is a hard constraint handled by
/// [`filter_storage`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(pub [f64; ObjectiveVector::LEN]);

impl ObjectiveVector {
    pub const LEN: usize = 4;

    pub fn from_profile(p: &ImplementationProfile) -> Self {
        Self([-p.accuracy, p.latency_ms, p.energy_mj, p.memory_mb])
    }

    pub fn values(&self) -> &[f64; Self::LEN] {
        &self.0
    }
}

/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    let mut strictly_better = false;
    for (x, y) in a.0.iter().zip(b.0.iter()) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

/// Indices of non-dominated vectors, ascending.
pub(crate) fn front_indices(vectors: &[ObjectiveVector]) -> Vec<usize> {
    (0..vectors.len())
        .filter(|&i| !vectors.iter().any(|other| dominates(other, &vectors[i])))
        .collect()
}

/// Entries not dominated by any other entry, in input order. Entries with
/// identical objective vectors are all kept.
pub fn pareto_front(profiles: &[ImplementationProfile]) -> Vec<ImplementationProfile> {
    let vectors: Vec<ObjectiveVector> = profiles.iter().map(ObjectiveVector::from_profile).collect();
    front_indices(&vectors)
        .into_iter()
        .map(|i| profiles[i].clone())
        .collect()
}

/// Entries whose on-disk footprint fits `storage_budget_mb`, in input order.
pub fn filter_storage(
    profiles: &[ImplementationProfile],
    storage_budget_mb: f64,
) -> Vec<ImplementationProfile> {
    profiles
        .iter()
        .filter(|p| p.storage_mb <= storage_budget_mb)
        .cloned()
        .collect()
}

/// Shortlist for a drone: platform match, then storage filter, then front.
///
/// Filtering first means a feasible entry shadowed only by entries that do
/// not fit on the drone stays selectable.
pub fn offline_select(
    catalog: &Catalog,
    drone_platform: PlatformKind,
    storage_budget_mb: f64,
) -> Vec<ImplementationProfile> {
    let on_platform: Vec<ImplementationProfile> =
        catalog.for_platform(drone_platform).cloned().collect();
    pareto_front(&filter_storage(&on_platform, storage_budget_mb))
}
