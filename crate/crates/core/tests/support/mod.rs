//! Independent reference implementations and random instance generators.
//!
//! Nothing here calls into the code paths it is used to check: dominance,
//! feasibility, normalization, scoring and plan costs are recomputed from the
//! raw profile and report fields.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use swarmids_core::{
    CapacityReport, CostWeights, FlowBatch, ImplementationProfile, MergedView, MissionConstraints,
    ModelFamily, PlatformKind,
};

/// All-pairs dominance on raw fields: accuracy up, latency/energy/memory down.
pub fn raw_dominates(a: &ImplementationProfile, b: &ImplementationProfile) -> bool {
    let no_worse = a.accuracy >= b.accuracy
        && a.latency_ms <= b.latency_ms
        && a.energy_mj <= b.energy_mj
        && a.memory_mb <= b.memory_mb;
    let better = a.accuracy > b.accuracy
        || a.latency_ms < b.latency_ms
        || a.energy_mj < b.energy_mj
        || a.memory_mb < b.memory_mb;
    no_worse && better
}

pub fn front_oracle(profiles: &[ImplementationProfile]) -> Vec<String> {
    let mut out = Vec::new();
    for (i, p) in profiles.iter().enumerate() {
        let dominated = profiles
            .iter()
            .enumerate()
            .any(|(j, q)| i != j && raw_dominates(q, p));
        if !dominated {
            out.push(p.id.clone());
        }
    }
    out
}

pub fn storage_oracle(profiles: &[ImplementationProfile], budget: f64) -> Vec<String> {
    let mut out = Vec::new();
    for p in profiles {
        if p.storage_mb <= budget {
            out.push(p.id.clone());
        }
    }
    out
}

pub fn violation_count(p: &ImplementationProfile, c: &MissionConstraints) -> usize {
    let mut v = 0;
    if p.accuracy < c.min_accuracy {
        v += 1;
    }
    if let Some(b) = c.max_latency_ms {
        if p.latency_ms > b {
            v += 1;
        }
    }
    if let Some(b) = c.max_energy_mj_per_flow {
        if p.energy_mj > b {
            v += 1;
        }
    }
    if let Some(b) = c.max_memory_mb {
        if p.memory_mb > b {
            v += 1;
        }
    }
    v
}

pub fn feasible_oracle(shortlist: &[ImplementationProfile], c: &MissionConstraints) -> Vec<String> {
    shortlist
        .iter()
        .filter(|p| violation_count(p, c) == 0)
        .map(|p| p.id.clone())
        .collect()
}

fn raw_objectives(p: &ImplementationProfile) -> [f64; 4] {
    [-p.accuracy, p.latency_ms, p.energy_mj, p.memory_mb]
}

/// Weighted sum of min-max normalized objectives for each pool member.
pub fn score_oracle(pool: &[&ImplementationProfile], weights: &[f64; 4]) -> Vec<f64> {
    let mut scores = vec![0.0; pool.len()];
    for (k, weight) in weights.iter().enumerate() {
        let column: Vec<f64> = pool.iter().map(|p| raw_objectives(p)[k]).collect();
        let lo = column.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = column.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (i, x) in column.iter().enumerate() {
            let norm = if hi > lo { (x - lo) / (hi - lo) } else { 0.0 };
            scores[i] += weight * norm;
        }
    }
    scores
}

/// Exhaustive choice: rank every candidate by (violations, score, -accuracy,
/// energy, id) and take the first.
pub fn select_oracle(shortlist: &[ImplementationProfile], c: &MissionConstraints) -> String {
    let feasible: Vec<&ImplementationProfile> =
        shortlist.iter().filter(|p| violation_count(p, c) == 0).collect();
    let pool: Vec<&ImplementationProfile> =
        if feasible.is_empty() { shortlist.iter().collect() } else { feasible };
    let scores = score_oracle(&pool, &c.weights);
    let mut ranked: Vec<(usize, f64, &ImplementationProfile)> = pool
        .iter()
        .zip(scores)
        .map(|(p, s)| (violation_count(p, c), s, *p))
        .collect();
    ranked.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.partial_cmp(&b.1).unwrap())
            .then(b.2.accuracy.partial_cmp(&a.2.accuracy).unwrap())
            .then(a.2.energy_mj.partial_cmp(&b.2.energy_mj).unwrap())
            .then(a.2.id.cmp(&b.2.id))
    });
    ranked[0].2.id.clone()
}

/// Scalar cost of an explicit assignment (flow index -> drone id),
/// recomputed from the raw report fields.
pub fn plan_cost_oracle(
    view: &MergedView,
    flows: &[FlowBatch],
    assignment: &BTreeMap<String, String>,
    w: &CostWeights,
) -> (f64, f64, u64, f64) {
    let mut load: BTreeMap<&str, f64> = BTreeMap::new();
    for r in view.reports.values().filter(|r| r.capacity_fps > 0.0) {
        load.insert(&r.drone_id, r.backlog_flows as f64);
    }
    let mut energy_mj = 0.0;
    let mut comm = 0u64;
    for f in flows {
        let target = &assignment[&f.flow_id];
        let r = &view.reports[target];
        *load.get_mut(target.as_str()).expect("assigned to a live drone") += f.flow_count as f64;
        energy_mj += f.flow_count as f64 * r.energy_mj_per_flow;
        if *target != f.origin_drone {
            comm += f.size_bytes;
        }
    }
    let makespan = load
        .iter()
        .map(|(id, l)| l / view.reports[*id].capacity_fps)
        .fold(0.0, f64::max);
    let scalar = w.alpha * makespan + w.beta * energy_mj / 1000.0 + w.gamma * comm as f64 / 1e6;
    (makespan, energy_mj, comm, scalar)
}

pub fn random_profiles(rng: &mut ChaCha8Rng, n: usize, platform: PlatformKind) -> Vec<ImplementationProfile> {
    (0..n)
        .map(|i| ImplementationProfile {
            id: format!("p{i:03}"),
            model_family: if i % 2 == 0 { ModelFamily::Dnn } else { ModelFamily::RandomForest },
            platform,
            accuracy: rng.gen_range(0.5..1.0),
            latency_ms: rng.gen_range(0.1..50.0),
            energy_mj: rng.gen_range(1.0..200.0),
            memory_mb: rng.gen_range(10.0..2000.0),
            storage_mb: rng.gen_range(1.0..800.0),
        })
        .collect()
}

/// Profiles on a coarse grid so that exact ties and duplicates occur.
pub fn gridded_profiles(rng: &mut ChaCha8Rng, n: usize) -> Vec<ImplementationProfile> {
    (0..n)
        .map(|i| ImplementationProfile {
            id: format!("g{i:03}"),
            model_family: ModelFamily::Dnn,
            platform: PlatformKind::CpuSbc,
            accuracy: rng.gen_range(5..=10) as f64 / 10.0,
            latency_ms: rng.gen_range(1..=5) as f64,
            energy_mj: rng.gen_range(1..=5) as f64,
            memory_mb: rng.gen_range(1..=5) as f64 * 100.0,
            storage_mb: rng.gen_range(1..=5) as f64 * 10.0,
        })
        .collect()
}

pub fn random_weights(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let raw: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.0..1.0));
    let sum: f64 = raw.iter().sum();
    let mut w = raw.map(|x| x / sum);
    // pin the sum to exactly 1 within rounding
    w[3] = 1.0 - w[0] - w[1] - w[2];
    if w[3] < 0.0 {
        w[3] = 0.0;
    }
    w
}

pub fn random_constraints(rng: &mut ChaCha8Rng) -> MissionConstraints {
    let maybe = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| rng.gen_bool(0.6).then(|| rng.gen_range(lo..hi));
    MissionConstraints {
        max_latency_ms: maybe(rng, 1.0, 50.0),
        min_accuracy: if rng.gen_bool(0.7) { rng.gen_range(0.5..1.0) } else { 0.0 },
        max_energy_mj_per_flow: maybe(rng, 10.0, 200.0),
        max_memory_mb: maybe(rng, 100.0, 2000.0),
        weights: random_weights(rng),
        switching_penalty: 0.0,
    }
}

pub fn report(id: &str, capacity_fps: f64, backlog: u64, energy_mj: f64) -> CapacityReport {
    CapacityReport {
        drone_id: id.into(),
        epoch: 0,
        capacity_fps,
        backlog_flows: backlog,
        battery_frac: 1.0,
        active_impl: format!("{id}-impl"),
        energy_mj_per_flow: energy_mj,
    }
}

pub fn view_of(reports: Vec<CapacityReport>) -> MergedView {
    MergedView { epoch: 0, reports: reports.into_iter().map(|r| (r.drone_id.clone(), r)).collect() }
}

/// Random distribution instance with `drones` drones and `flows` batches.
pub fn random_instance(rng: &mut ChaCha8Rng, drones: usize, flows: usize) -> (MergedView, Vec<FlowBatch>) {
    let reports: Vec<CapacityReport> = (0..drones)
        .map(|d| {
            report(
                &format!("d{d}"),
                rng.gen_range(5.0..100.0),
                rng.gen_range(0..50),
                rng.gen_range(1.0..100.0),
            )
        })
        .collect();
    let batches = (0..flows)
        .map(|i| {
            let count = rng.gen_range(1..=50u64);
            FlowBatch {
                flow_id: format!("f{i}"),
                origin_drone: format!("d{}", rng.gen_range(0..drones)),
                size_bytes: count * rng.gen_range(500..=1500u64),
                flow_count: count,
            }
        })
        .collect();
    (view_of(reports), batches)
}

/// Every assignment of `n` flows to `m` drones, as index vectors.
pub fn all_assignments(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..m).map(move |d| {
                    let mut v = prefix.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    out
}
