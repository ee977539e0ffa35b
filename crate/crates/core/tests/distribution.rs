mod support;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;
use swarmids_core::{
    brute_force_distribute, distribute_flows, merge_reports, CostWeights, DistributeError, FlowBatch,
};

fn flow(id: &str, origin: &str, count: u64) -> FlowBatch {
    FlowBatch { flow_id: id.into(), origin_drone: origin.into(), size_bytes: count * 1000, flow_count: count }
}

#[test]
fn brute_force_is_no_worse_than_any_enumerated_assignment() {
    let w = CostWeights::default();
    for seed in 0..40u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=5);
        let (view, flows) = random_instance(&mut rng, m, n);
        let best = brute_force_distribute(&view, &flows, &w).unwrap();
        let drone_ids: Vec<String> = view.reports.keys().cloned().collect();
        for choice in all_assignments(m, n) {
            let assignment: BTreeMap<String, String> = flows
                .iter()
                .zip(&choice)
                .map(|(f, &d)| (f.flow_id.clone(), drone_ids[d].clone()))
                .collect();
            let (.., scalar) = plan_cost_oracle(&view, &flows, &assignment, &w);
            assert!(best.predicted_cost.scalar <= scalar + 1e-12, "seed {seed}");
        }
    }
}

#[test]
fn predicted_cost_matches_recomputation() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=8);
        let (view, flows) = random_instance(&mut rng, m, n);
        let w = CostWeights { alpha: rng.gen_range(0.0..2.0), beta: rng.gen_range(0.0..2.0), gamma: rng.gen_range(0.0..2.0) };
        for plan in [distribute_flows(&view, &flows, &w).unwrap(), brute_force_distribute(&view, &flows, &w).unwrap()] {
            let (makespan, energy, comm, scalar) = plan_cost_oracle(&view, &flows, &plan.assignments, &w);
            let c = &plan.predicted_cost;
            assert!((c.makespan_s - makespan).abs() <= 1e-9 * makespan.max(1.0));
            assert!((c.energy_mj - energy).abs() <= 1e-9 * energy.max(1.0));
            assert_eq!(c.comm_bytes, comm);
            assert!((c.scalar - scalar).abs() <= 1e-9 * scalar.max(1.0), "seed {seed}");
        }
    }
}

#[test]
fn greedy_within_twice_the_optimum() {
    let w = CostWeights::default();
    let mut ratios = Vec::new();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=4);
        let n = rng.gen_range(1..=8);
        let (view, flows) = random_instance(&mut rng, m, n);
        let greedy = distribute_flows(&view, &flows, &w).unwrap().predicted_cost.scalar;
        let opt = brute_force_distribute(&view, &flows, &w).unwrap().predicted_cost.scalar;
        assert!(greedy + 1e-12 >= opt);
        let ratio = greedy / opt;
        assert!(ratio <= 2.0, "seed {seed}: {ratio}");
        ratios.push(ratio);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!(mean <= 1.2, "mean ratio {mean}");
}

#[test]
fn every_flow_assigned_exactly_once_to_a_live_drone() {
    let w = CostWeights::default();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..=6);
        let n = rng.gen_range(0..=30);
        let (mut view, flows) = random_instance(&mut rng, m, n);
        // knock one drone out
        if m > 1 {
            view.reports.get_mut("d0").unwrap().capacity_fps = 0.0;
        }
        let plan = distribute_flows(&view, &flows, &w).unwrap();
        assert_eq!(plan.assignments.len(), flows.len());
        for f in &flows {
            let target = &plan.assignments[&f.flow_id];
            assert!(view.reports[target].capacity_fps > 0.0);
        }
    }
}

#[test]
fn spare_local_capacity_keeps_flows_local() {
    let w = CostWeights::default();
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(2..=4);
        // identical drones, empty queues; each drone offers only its own traffic
        let reports = (0..m).map(|d| report(&format!("d{d}"), 50.0, 0, 10.0)).collect();
        let view = view_of(reports);
        let count = rng.gen_range(1..=20);
        let flows: Vec<FlowBatch> = (0..m).map(|d| flow(&format!("f{d}"), &format!("d{d}"), count)).collect();
        let plan = distribute_flows(&view, &flows, &w).unwrap();
        assert_eq!(plan.predicted_cost.comm_bytes, 0, "seed {seed}");
        for f in &flows {
            assert_eq!(plan.assignments[&f.flow_id], f.origin_drone);
        }
    }
}

#[test]
fn overloaded_origin_sheds_to_idle_peer() {
    let view = view_of(vec![report("a", 10.0, 100, 10.0), report("b", 100.0, 0, 10.0)]);
    let flows = vec![flow("x", "a", 50)];
    let plan = distribute_flows(&view, &flows, &CostWeights::default()).unwrap();
    assert_eq!(plan.assignments["x"], "b");
}

#[test]
fn distribution_is_deterministic_and_order_insensitive() {
    let w = CostWeights::default();
    for seed in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (view, flows) = random_instance(&mut rng, 4, 12);
        let a = distribute_flows(&view, &flows, &w).unwrap();
        let mut shuffled = flows.clone();
        shuffled.reverse();
        let b = distribute_flows(&view, &shuffled, &w).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn no_live_drone_is_an_error() {
    let view = view_of(vec![report("a", 0.0, 0, 1.0)]);
    let err = distribute_flows(&view, &[flow("x", "a", 1)], &CostWeights::default()).unwrap_err();
    assert_eq!(err, DistributeError::NoCapacity { flows: 1 });
}

#[test]
fn exhaustive_search_refuses_huge_instances() {
    let view = view_of((0..10).map(|d| report(&format!("d{d}"), 10.0, 0, 1.0)).collect());
    let flows: Vec<FlowBatch> = (0..7).map(|i| flow(&format!("f{i}"), "d0", 1)).collect();
    assert!(matches!(
        brute_force_distribute(&view, &flows, &CostWeights::default()),
        Err(DistributeError::InstanceTooLarge { drones: 10, flows: 7 })
    ));
}

#[test]
fn stale_reports_leave_the_view() {
    let mut old = report("a", 10.0, 0, 1.0);
    old.epoch = 1;
    let mut fresh = report("b", 10.0, 0, 1.0);
    fresh.epoch = 4;
    let mut future = report("c", 10.0, 0, 1.0);
    future.epoch = 9;
    let view = merge_reports(&[old, fresh, future], 4, 2);
    assert_eq!(view.reports.keys().collect::<Vec<_>>(), vec!["b"]);
}
