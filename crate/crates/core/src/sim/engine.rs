use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use super::{
    account_energy, sample_detection, Detail, DetectionOutcome, DroneMetrics, EventKind,
    EventQueue, EventRecord, Payload, SelectionRecord, SeriesSample, SimError, SimMetrics,
    SimOutput,
};
use crate::distributor::{distribute_flows, merge_reports, self_assess, CapacityReport, FlowBatch};
use crate::drone::DroneState;
use crate::pareto::offline_select;
use crate::rng::flow_stream;
use crate::scenario::{Scenario, Zone};
use crate::selector::select_online;

#[derive(Debug, Clone, Copy)]
struct Service {
    start_s: f64,
    capacity_fps: f64,
    accuracy: f64,
    energy_mj: f64,
}

/// Bookkeeping that travels with a queued batch, in lockstep with
/// `DroneState::backlog`.
#[derive(Debug, Clone, Copy)]
struct BatchMeta {
    arrival_s: f64,
    attack_prob: f64,
    origin: usize,
    tick: u64,
    service: Option<Service>,
}

struct DroneRun {
    state: DroneState,
    meta: VecDeque<BatchMeta>,
    busy: bool,
    last_charge_s: f64,
    latency_sum_ms: f64,
    metrics: DroneMetrics,
}

struct Sim<'a> {
    sc: &'a Scenario,
    seed: u64,
    queue: EventQueue,
    drones: Vec<DroneRun>,
    zone: usize,
    reports: Vec<CapacityReport>,
    report_epoch: Option<u64>,
    routes: Vec<Vec<usize>>,
    route_cursor: Vec<usize>,
    arrival_carry: Vec<f64>,
    energy_this_event: BTreeMap<String, f64>,
    events: Vec<EventRecord>,
    series: Vec<SeriesSample>,
}

/// Runs a scenario to completion.
///
/// The same `(scenario, seed)` always yields the same metrics, event log and
/// series, bit for bit.
pub fn run(scenario: &Scenario, seed: u64) -> Result<SimOutput, SimError> {
    scenario.validate()?;
    let mut sim = Sim::new(scenario, seed)?;
    sim.schedule_recurring();
    while let Some(event) = sim.queue.pop() {
        let done = event.kind == EventKind::End;
        sim.dispatch(event.time_s, event.seq, event.kind);
        if done {
            break;
        }
    }
    Ok(sim.finish())
}

impl<'a> Sim<'a> {
    fn new(sc: &'a Scenario, seed: u64) -> Result<Self, SimError> {
        let mut drones = Vec::with_capacity(sc.drones.len());
        for spec in &sc.drones {
            let shortlist = offline_select(&sc.catalog, spec.platform, spec.storage_budget_mb);
            if shortlist.is_empty() {
                return Err(SimError::NoImplementationForDrone { drone_id: spec.drone_id.clone() });
            }
            drones.push(DroneRun {
                state: DroneState {
                    drone_id: spec.drone_id.clone(),
                    platform: spec.platform,
                    storage_budget_mb: spec.storage_budget_mb,
                    battery_j: spec.battery_capacity_j * spec.initial_battery_frac,
                    battery_capacity_j: spec.battery_capacity_j,
                    cpu_reserved_frac: spec.cpu_reserved_frac,
                    active_impl: None,
                    shortlist,
                    backlog: VecDeque::new(),
                },
                meta: VecDeque::new(),
                busy: false,
                last_charge_s: 0.0,
                latency_sum_ms: 0.0,
                metrics: DroneMetrics { drone_id: spec.drone_id.clone(), ..DroneMetrics::default() },
            });
        }
        let n = drones.len();
        Ok(Self {
            sc,
            seed,
            queue: EventQueue::new(),
            drones,
            zone: 0,
            reports: Vec::new(),
            report_epoch: None,
            routes: (0..n).map(|d| alloc::vec![d]).collect(),
            route_cursor: alloc::vec![0; n],
            arrival_carry: alloc::vec![0.0; n],
            energy_this_event: BTreeMap::new(),
            events: Vec::new(),
            series: Vec::new(),
        })
    }

    fn schedule_recurring(&mut self) {
        let duration = self.sc.duration_s;
        let epochs = self.sc.distribution.epochs;
        // (time, rank within an instant, sub-order, kind)
        let mut ticks: Vec<(f64, u8, usize, EventKind)> = Vec::new();
        let periodic = |period: f64, first: u64| {
            (first..).map(move |k| (k, k as f64 * period)).take_while(move |&(_, t)| t < duration)
        };

        for (i, z) in self.sc.zones.iter().enumerate() {
            if z.enter_time_s < duration {
                ticks.push((z.enter_time_s, 0, i, EventKind::ZoneTransition { zone: i }));
            }
        }
        for (_, t) in periodic(epochs.selection_s, 0) {
            ticks.push((t, 1, 0, EventKind::SelectionEpoch));
        }
        for (k, t) in periodic(epochs.report_s, 0) {
            ticks.push((t, 2, 0, EventKind::ReportEpoch { epoch: k }));
        }
        for (_, t) in periodic(epochs.redistribution_s, 0) {
            ticks.push((t, 3, 0, EventKind::RedistributionEpoch));
        }
        for (k, t) in periodic(epochs.arrival_s, 1) {
            for d in 0..self.drones.len() {
                ticks.push((t, 4, d, EventKind::TrafficArrival { drone: d, tick: k }));
            }
        }
        ticks.push((duration, 5, 0, EventKind::End));

        ticks.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        for (t, _, _, kind) in ticks {
            self.queue.schedule(t, kind);
        }
    }

    fn current_zone(&self) -> &'a Zone {
        &self.sc.zones[self.zone]
    }

    fn dispatch(&mut self, now: f64, seq: u64, kind: EventKind) {
        self.energy_this_event.clear();
        let (drone_id, detail) = match kind {
            EventKind::ZoneTransition { zone } => {
                self.zone = zone;
                let z = self.current_zone();
                let selections = self.reselect();
                (None, Detail::Zone { zone_id: z.zone_id.clone(), security: z.security, selections })
            }
            EventKind::SelectionEpoch => (None, Detail::Selection { selections: self.reselect() }),
            EventKind::ReportEpoch { epoch } => (None, self.report_epoch(now, epoch)),
            EventKind::RedistributionEpoch => (None, self.redistribute()),
            EventKind::TrafficArrival { drone, tick } => {
                (Some(self.drones[drone].state.drone_id.clone()), self.arrival(now, drone, tick))
            }
            EventKind::FlowCompleted { drone } => {
                (Some(self.drones[drone].state.drone_id.clone()), self.complete(now, drone))
            }
            EventKind::End => (None, self.end(now)),
        };
        self.events.push(EventRecord {
            time_s: now,
            seq,
            kind: kind.tag(),
            drone_id,
            payload: Payload { energy_j: core::mem::take(&mut self.energy_this_event), detail },
        });
    }

    /// Brings a drone's battery up to `now` and charges extra work on top.
    fn charge(&mut self, d: usize, now: f64, flows: &[FlowBatch], energy_mj_per_flow: f64, bytes: u64) {
        let run = &mut self.drones[d];
        let dt = now - run.last_charge_s;
        run.last_charge_s = now;
        let drained = account_energy(&mut run.state, &self.sc.energy, dt, flows, energy_mj_per_flow, bytes);
        run.metrics.energy_j += drained;
        if drained != 0.0 {
            *self.energy_this_event.entry(run.state.drone_id.clone()).or_insert(0.0) += drained;
        }
    }

    fn reselect(&mut self) -> Vec<SelectionRecord> {
        let constraints = self
            .sc
            .security_profiles
            .get(self.current_zone().security)
            .expect("validated scenario has a profile per zone level");
        let mut out = Vec::with_capacity(self.drones.len());
        for run in &mut self.drones {
            let previous = run.state.active_impl.clone();
            let decision = select_online(&run.state.shortlist, constraints, previous.as_deref())
                .expect("shortlists are non-empty");
            let switched = previous.as_ref().is_some_and(|p| *p != decision.chosen);
            if switched {
                run.metrics.impl_switches += 1;
            }
            run.state.active_impl = Some(decision.chosen.clone());
            out.push(SelectionRecord {
                drone_id: run.state.drone_id.clone(),
                chosen: decision.chosen,
                previous,
                rationale: decision.rationale,
                feasible_count: decision.feasible_count,
                switched,
            });
        }
        out
    }

    fn report_epoch(&mut self, now: f64, epoch: u64) -> Detail {
        let bytes = self.sc.energy.report_bytes * (self.drones.len() as u64 - 1);
        let mut fresh = Vec::with_capacity(self.drones.len());
        for d in 0..self.drones.len() {
            self.charge(d, now, &[], 0.0, bytes);
            let run = &mut self.drones[d];
            run.metrics.comm_bytes += bytes;
            if let Ok(report) = self_assess(&run.state, epoch) {
                fresh.push(report);
            }
            self.series.push(SeriesSample {
                time_s: now,
                drone_id: run.state.drone_id.clone(),
                battery_j: run.state.battery_j,
                queue_flows: run.state.backlog_flows(),
                cumulative_detected: run.metrics.detected,
            });
        }
        let staleness = self.sc.distribution.staleness_epochs;
        self.reports.retain(|r| r.epoch + staleness >= epoch);
        self.reports.extend(fresh.iter().cloned());
        self.report_epoch = Some(epoch);
        Detail::Reports { reports: fresh }
    }

    fn redistribute(&mut self) -> Detail {
        let params = &self.sc.distribution;
        let zone = self.current_zone();
        let chunks = params.forecast_chunks as u64;
        let horizon_flows = zone.flow_rate_fps * params.epochs.redistribution_s;
        let per_chunk = libm::ceil(horizon_flows / chunks as f64) as u64;

        let mut forecast = Vec::new();
        if per_chunk > 0 {
            for run in &self.drones {
                for k in 0..chunks {
                    forecast.push(FlowBatch {
                        flow_id: format!("{}#{k}", run.state.drone_id),
                        origin_drone: run.state.drone_id.clone(),
                        size_bytes: per_chunk * zone.mean_flow_bytes,
                        flow_count: per_chunk,
                    });
                }
            }
        }

        for (d, route) in self.routes.iter_mut().enumerate() {
            route.clear();
            route.push(d);
        }
        let mut plan = None;
        let mut error = None;
        if let Some(epoch) = self.report_epoch {
            let view = merge_reports(&self.reports, epoch, params.staleness_epochs);
            match distribute_flows(&view, &forecast, &params.weights()) {
                Ok(p) if !forecast.is_empty() => {
                    let index: BTreeMap<&str, usize> = self
                        .drones
                        .iter()
                        .enumerate()
                        .map(|(i, r)| (r.state.drone_id.as_str(), i))
                        .collect();
                    for (d, run) in self.drones.iter().enumerate() {
                        let targets: Vec<usize> = (0..chunks)
                            .map(|k| {
                                let key = format!("{}#{k}", run.state.drone_id);
                                index[p.assignments[&key].as_str()]
                            })
                            .collect();
                        self.routes[d] = targets;
                    }
                    plan = Some(p);
                }
                Ok(p) => plan = Some(p),
                Err(e) => error = Some(e.to_string()),
            }
        }
        self.route_cursor.iter_mut().for_each(|c| *c = 0);

        let routes = self
            .routes
            .iter()
            .enumerate()
            .map(|(d, r)| {
                let id = |i: &usize| self.drones[*i].state.drone_id.clone();
                (id(&d), r.iter().map(id).collect())
            })
            .collect();
        Detail::Plan { plan, routes, error }
    }

    fn arrival(&mut self, now: f64, origin: usize, tick: u64) -> Detail {
        let zone = self.current_zone();
        self.arrival_carry[origin] += zone.flow_rate_fps * self.sc.distribution.epochs.arrival_s;
        let count = libm::floor(self.arrival_carry[origin]);
        self.arrival_carry[origin] -= count;
        let count = count as u64;
        if count == 0 {
            return Detail::Arrival { flow_id: None, flow_count: 0, size_bytes: 0, target: None };
        }

        let origin_id = self.drones[origin].state.drone_id.clone();
        let flow_id = format!("{origin_id}/{tick}");
        let size_bytes = count * zone.mean_flow_bytes;
        let target = if self.drones[origin].state.is_depleted() {
            origin
        } else {
            let route = &self.routes[origin];
            let t = route[self.route_cursor[origin] % route.len()];
            self.route_cursor[origin] += 1;
            t
        };

        self.drones[origin].metrics.flows_generated += count;
        if target != origin {
            self.charge(origin, now, &[], 0.0, size_bytes);
            self.drones[origin].metrics.comm_bytes += size_bytes;
        }
        let run = &mut self.drones[target];
        run.state.backlog.push_back(FlowBatch {
            flow_id: flow_id.clone(),
            origin_drone: origin_id,
            size_bytes,
            flow_count: count,
        });
        run.meta.push_back(BatchMeta {
            arrival_s: now,
            attack_prob: zone.attack_prob,
            origin,
            tick,
            service: None,
        });
        self.try_start(target, now);
        Detail::Arrival {
            flow_id: Some(flow_id),
            flow_count: count,
            size_bytes,
            target: Some(self.drones[target].state.drone_id.clone()),
        }
    }

    fn try_start(&mut self, d: usize, now: f64) {
        {
            let run = &self.drones[d];
            if run.busy || run.state.backlog.is_empty() || run.state.active_profile().is_none() {
                return;
            }
        }
        // capacity depends on the battery, so settle idle drain first
        self.charge(d, now, &[], 0.0, 0);
        let run = &mut self.drones[d];
        let epoch = self.report_epoch.unwrap_or(0);
        let Ok(report) = self_assess(&run.state, epoch) else { return };
        if !(report.capacity_fps > 0.0) {
            return;
        }
        let active = run.state.active_profile().expect("checked above");
        let service = Service {
            start_s: now,
            capacity_fps: report.capacity_fps,
            accuracy: active.accuracy,
            energy_mj: active.energy_mj,
        };
        let flows = run.state.backlog.front().expect("non-empty").flow_count;
        run.meta.front_mut().expect("lockstep with backlog").service = Some(service);
        run.busy = true;
        self.queue.schedule(now + flows as f64 / service.capacity_fps, EventKind::FlowCompleted { drone: d });
    }

    fn complete(&mut self, now: f64, d: usize) -> Detail {
        let run = &mut self.drones[d];
        let batch = run.state.backlog.pop_front().expect("completion without a batch");
        let meta = run.meta.pop_front().expect("lockstep with backlog");
        let service = meta.service.expect("completed batch was in service");
        run.busy = false;
        self.charge(d, now, core::slice::from_ref(&batch), service.energy_mj, 0);

        let (mut malicious, mut detected, mut missed) = (0u64, 0u64, 0u64);
        for k in 0..batch.flow_count {
            let mut rng = flow_stream(self.seed, meta.origin as u64, meta.tick, k);
            let is_malicious = rng.gen::<f64>() < meta.attack_prob;
            match sample_detection(is_malicious, service.accuracy, &mut rng) {
                DetectionOutcome::TruePositive => detected += 1,
                DetectionOutcome::FalseNegative => missed += 1,
                DetectionOutcome::TrueNegative | DetectionOutcome::FalsePositive => {}
            }
            malicious += is_malicious as u64;
        }

        let n = batch.flow_count as f64;
        let wait_s = service.start_s - meta.arrival_s;
        let service_sum_s = n * (n + 1.0) / 2.0 / service.capacity_fps;
        let run = &mut self.drones[d];
        run.latency_sum_ms += 1e3 * (n * wait_s + service_sum_s);
        let m = &mut run.metrics;
        m.flows_analyzed += batch.flow_count;
        m.malicious_total += malicious;
        m.detected += detected;
        m.missed += missed;

        self.try_start(d, now);
        Detail::Completion { flow_id: batch.flow_id, flow_count: batch.flow_count, malicious, detected, missed }
    }

    fn end(&mut self, now: f64) -> Detail {
        let mut dropped_total = 0;
        for d in 0..self.drones.len() {
            self.charge(d, now, &[], 0.0, 0);
            let run = &mut self.drones[d];
            for (batch, meta) in run.state.backlog.drain(..).zip(run.meta.drain(..)) {
                let malicious = (0..batch.flow_count)
                    .filter(|&k| {
                        flow_stream(self.seed, meta.origin as u64, meta.tick, k).gen::<f64>() < meta.attack_prob
                    })
                    .count() as u64;
                run.metrics.dropped += batch.flow_count;
                run.metrics.malicious_total += malicious;
                dropped_total += batch.flow_count;
            }
            run.busy = false;
        }
        Detail::End { dropped: dropped_total }
    }

    fn finish(self) -> SimOutput {
        let mut swarm = DroneMetrics { drone_id: "swarm".into(), ..DroneMetrics::default() };
        let mut swarm_latency_ms = 0.0;
        let drones: Vec<DroneMetrics> = self
            .drones
            .into_iter()
            .map(|run| {
                let mut m = run.metrics;
                if m.flows_analyzed > 0 {
                    m.mean_latency_ms = run.latency_sum_ms / m.flows_analyzed as f64;
                }
                swarm.flows_generated += m.flows_generated;
                swarm.flows_analyzed += m.flows_analyzed;
                swarm.malicious_total += m.malicious_total;
                swarm.detected += m.detected;
                swarm.missed += m.missed;
                swarm.dropped += m.dropped;
                swarm.energy_j += m.energy_j;
                swarm.comm_bytes += m.comm_bytes;
                swarm.impl_switches += m.impl_switches;
                swarm_latency_ms += run.latency_sum_ms;
                m
            })
            .collect();
        if swarm.flows_analyzed > 0 {
            swarm.mean_latency_ms = swarm_latency_ms / swarm.flows_analyzed as f64;
        }
        SimOutput {
            metrics: SimMetrics { seed: self.seed, duration_s: self.sc.duration_s, drones, swarm },
            events: self.events,
            series: self.series,
        }
    }
}
