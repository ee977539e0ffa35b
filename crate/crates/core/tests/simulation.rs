use std::collections::BTreeMap;

use swarmids_core::sim::{Detail, EventTag};
use swarmids_core::{
    run, Catalog, DistributionParams, DroneSpec, EnergyParams, ImplementationProfile, ModelFamily,
    PlatformKind, Scenario, SecurityLevel, SecurityProfiles, Zone,
};

fn profile(id: &str, accuracy: f64, latency_ms: f64) -> ImplementationProfile {
    ImplementationProfile {
        id: id.into(),
        model_family: ModelFamily::RandomForest,
        platform: PlatformKind::CpuSbc,
        accuracy,
        latency_ms,
        energy_mj: 5.0,
        memory_mb: 100.0,
        storage_mb: 10.0,
    }
}

fn drone(id: &str, battery_j: f64) -> DroneSpec {
    DroneSpec {
        drone_id: id.into(),
        platform: PlatformKind::CpuSbc,
        storage_budget_mb: 100.0,
        battery_capacity_j: battery_j,
        cpu_reserved_frac: 0.2,
        initial_battery_frac: 1.0,
    }
}

fn scenario(rate_fps: f64, attack_prob: f64, accuracy: f64, duration_s: f64) -> Scenario {
    Scenario {
        catalog: Catalog::new(vec![profile("only", accuracy, 2.0)]).unwrap(),
        drones: vec![drone("a", 10_000.0), drone("b", 10_000.0), drone("c", 10_000.0)],
        zones: vec![Zone {
            zone_id: "z".into(),
            enter_time_s: 0.0,
            security: SecurityLevel::Low,
            attack_prob,
            flow_rate_fps: rate_fps,
            mean_flow_bytes: 1000,
        }],
        security_profiles: SecurityProfiles::default(),
        distribution: DistributionParams::default(),
        energy: EnergyParams::default(),
        duration_s,
    }
}

#[test]
fn without_traffic_only_idle_and_report_energy_is_spent() {
    let sc = scenario(0.0, 0.2, 0.9, 60.0);
    let out = run(&sc, 1).unwrap();
    let reports = out.events.iter().filter(|e| e.kind == EventTag::ReportEpoch).count() as f64;
    let report_j = reports * sc.energy.comm_j_per_mb * (sc.energy.report_bytes * 2) as f64 / 1e6;
    let expected = sc.energy.idle_w * sc.duration_s + report_j;
    for m in &out.metrics.drones {
        assert_eq!(m.flows_generated, 0);
        assert!((m.energy_j - expected).abs() <= 1e-9 * expected, "{} vs {expected}", m.energy_j);
    }
}

#[test]
fn benign_traffic_yields_no_detections() {
    let out = run(&scenario(20.0, 0.0, 0.9, 60.0), 3).unwrap();
    let s = &out.metrics.swarm;
    assert!(s.flows_analyzed > 0);
    assert_eq!((s.malicious_total, s.detected, s.missed), (0, 0, 0));
}

#[test]
fn flows_are_conserved() {
    for seed in 0..5 {
        let out = run(&scenario(50.0, 0.3, 0.8, 120.0), seed).unwrap();
        let s = &out.metrics.swarm;
        assert_eq!(s.flows_generated, s.flows_analyzed + s.dropped);
        assert!(s.detected + s.missed <= s.malicious_total);
        let per_drone: u64 = out.metrics.drones.iter().map(|m| m.flows_generated).sum();
        assert_eq!(per_drone, s.flows_generated);
        assert_eq!(out.metrics.detection_rate().is_some(), s.detected + s.missed > 0);
    }
}

#[test]
fn same_seed_same_output() {
    let sc = scenario(30.0, 0.2, 0.85, 90.0);
    assert_eq!(run(&sc, 9).unwrap(), run(&sc, 9).unwrap());
    assert_ne!(run(&sc, 9).unwrap().metrics, run(&sc, 10).unwrap().metrics);
}

#[test]
fn events_are_time_ordered_and_end_last() {
    let out = run(&scenario(30.0, 0.2, 0.85, 90.0), 2).unwrap();
    for pair in out.events.windows(2) {
        assert!(pair[0].time_s <= pair[1].time_s);
    }
    let last = out.events.last().unwrap();
    assert_eq!(last.kind, EventTag::End);
    assert_eq!(last.time_s, 90.0);
}

#[test]
fn per_event_energy_adds_up_to_drone_totals() {
    let out = run(&scenario(40.0, 0.2, 0.9, 120.0), 4).unwrap();
    let mut ledger: BTreeMap<&str, f64> = BTreeMap::new();
    for e in &out.events {
        for (id, j) in &e.payload.energy_j {
            *ledger.entry(id).or_default() += j;
        }
    }
    for m in &out.metrics.drones {
        let sum = ledger[m.drone_id.as_str()];
        assert!((sum - m.energy_j).abs() <= 1e-9 * m.energy_j, "{}: {sum} vs {}", m.drone_id, m.energy_j);
    }
}

#[test]
fn depleted_drone_stops_but_battery_never_goes_negative() {
    let mut sc = scenario(40.0, 0.2, 0.9, 120.0);
    sc.drones[0].battery_capacity_j = 50.0;
    let out = run(&sc, 5).unwrap();
    assert!(out.series.iter().all(|s| s.battery_j >= 0.0));
    let a = &out.metrics.drones[0];
    assert!(a.energy_j <= 50.0 + 1e-9);
    let flat = out.series.iter().rfind(|s| s.drone_id == "a").unwrap();
    assert_eq!(flat.battery_j, 0.0);
    // once empty the drone reports no capacity
    for e in &out.events {
        if let Detail::Reports { reports } = &e.payload.detail {
            if e.time_s > 60.0 {
                let r = reports.iter().find(|r| r.drone_id == "a").unwrap();
                assert_eq!(r.capacity_fps, 0.0);
            }
        }
    }
}

#[test]
fn detection_rate_tracks_accuracy() {
    let out = run(&scenario(100.0, 0.5, 0.9, 100.0), 11).unwrap();
    let s = &out.metrics.swarm;
    assert!(s.malicious_total >= 10_000, "{}", s.malicious_total);
    let rate = out.metrics.detection_rate().unwrap();
    assert!((0.88..=0.92).contains(&rate), "{rate}");
}

#[test]
fn zero_duration_mission_does_nothing() {
    let out = run(&scenario(40.0, 0.2, 0.9, 0.0), 1).unwrap();
    assert_eq!(out.metrics.swarm.flows_generated, 0);
    assert_eq!(out.metrics.swarm.energy_j, 0.0);
}
