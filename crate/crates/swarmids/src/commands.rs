//! Subcommand implementations, independent of argument parsing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use swarmids_core::{
    brute_force_distribute, distribute_flows, merge_reports, offline_select, run, select_online,
    synth_catalog, AssignmentPlan, CapacityReport, Catalog, CostWeights, DistributeError,
    FlowBatch, MissionConstraints, PlatformKind, Scenario, SecurityLevel, SecurityProfiles,
    SelectError, SelectionDecision, SimError, SimMetrics, SynthParams,
};
use thiserror::Error;

use crate::catalog_io::{catalog_to_csv, load_catalog};
use crate::output::{write_report, write_run};
use crate::scenario_file::{bundled_scenario, load_scenario};

pub const DEFAULT_N_PER_PLATFORM: usize = 12;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Generation(String),
    #[error("{0}")]
    EmptyShortlist(String),
    #[error("{0}")]
    Simulation(String),
}

impl CommandError {
    /// 1 config/validation, 2 generation, 3 empty shortlist, 4 simulation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Generation(_) => 2,
            Self::EmptyShortlist(_) => 3,
            Self::Simulation(_) => 4,
        }
    }
}

fn config<E: std::fmt::Display>(e: E) -> CommandError {
    CommandError::Config(e.to_string())
}

/// Writes a synthetic catalog CSV to `out`, or returns it when `out` is `None`.
pub fn cmd_synth(seed: u64, n_per_platform: usize, out: Option<&Path>) -> Result<String, CommandError> {
    let catalog = synth_catalog(seed, n_per_platform, &SynthParams::default())
        .map_err(|e| CommandError::Generation(e.to_string()))?;
    let text = catalog_to_csv(&catalog);
    if let Some(path) = out {
        fs::write(path, &text).map_err(|e| config(format!("writing {}: {e}", path.display())))?;
    }
    Ok(text)
}

pub fn cmd_validate_catalog(path: &Path) -> Result<String, CommandError> {
    let catalog = load_catalog(path).map_err(config)?;
    let per_platform: Vec<String> = PlatformKind::ALL
        .iter()
        .map(|p| format!("{}={}", p.label(), catalog.for_platform(*p).count()))
        .collect();
    Ok(format!("catalog ok: {} entries ({})", catalog.len(), per_platform.join(", ")))
}

pub fn cmd_validate_scenario(path: &Path) -> Result<String, CommandError> {
    let sc = load_scenario(path).map_err(config)?;
    for d in &sc.drones {
        if offline_select(&sc.catalog, d.platform, d.storage_budget_mb).is_empty() {
            return Err(CommandError::EmptyShortlist(format!(
                "drone `{}` has no implementation within {} MiB on {}",
                d.drone_id, d.storage_budget_mb, d.platform
            )));
        }
    }
    Ok(format!(
        "scenario ok: {} drones, {} zones, {} catalog entries, {} s",
        sc.drones.len(),
        sc.zones.len(),
        sc.catalog.len(),
        sc.duration_s
    ))
}

/// Constraint source for `select`: inline JSON, a JSON file, or a level's
/// default profile.
pub enum ConstraintsArg<'a> {
    Json(&'a str),
    Level(SecurityLevel),
    Unbounded,
}

fn parse_constraints(arg: ConstraintsArg<'_>) -> Result<MissionConstraints, CommandError> {
    let c = match arg {
        ConstraintsArg::Json(raw) => {
            let text = if raw.trim_start().starts_with('{') {
                raw.to_string()
            } else {
                fs::read_to_string(raw).map_err(|e| config(format!("reading constraints {raw}: {e}")))?
            };
            serde_json::from_str(&text).map_err(|e| config(format!("malformed constraints: {e}")))?
        }
        ConstraintsArg::Level(level) => SecurityProfiles::default()
            .get(level)
            .cloned()
            .expect("defaults cover every level"),
        ConstraintsArg::Unbounded => MissionConstraints::unbounded([0.25; 4]),
    };
    c.validate().map_err(config)?;
    Ok(c)
}

pub fn cmd_select(
    catalog_path: &Path,
    platform: PlatformKind,
    storage_budget_mb: f64,
    constraints: ConstraintsArg<'_>,
) -> Result<SelectionDecision, CommandError> {
    if storage_budget_mb.is_nan() || storage_budget_mb <= 0.0 {
        return Err(config(format!("storage budget must be positive, got {storage_budget_mb}")));
    }
    let c = parse_constraints(constraints)?;
    let catalog: Catalog = load_catalog(catalog_path).map_err(config)?;
    let shortlist = offline_select(&catalog, platform, storage_budget_mb);
    select_online(&shortlist, &c, None).map_err(|e| match e {
        SelectError::EmptyShortlist => CommandError::EmptyShortlist(format!(
            "no {platform} implementation fits within {storage_budget_mb} MiB"
        )),
        other => config(other),
    })
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CommandError> {
    let text = fs::read_to_string(path).map_err(|e| config(format!("reading {}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| config(format!("{} line {}: {e}", path.display(), i + 1)))
        })
        .collect()
}

pub struct DistributeArgs<'a> {
    pub reports: &'a Path,
    pub flows: &'a Path,
    /// Defaults to the newest report epoch.
    pub epoch: Option<u64>,
    pub staleness_epochs: u64,
    pub weights: CostWeights,
    /// Use the exhaustive solver instead of the greedy planner.
    pub exact: bool,
}

pub fn cmd_distribute(args: &DistributeArgs<'_>) -> Result<AssignmentPlan, CommandError> {
    let reports: Vec<CapacityReport> = read_jsonl(args.reports)?;
    let flows: Vec<FlowBatch> = read_jsonl(args.flows)?;
    let epoch = args.epoch.unwrap_or_else(|| reports.iter().map(|r| r.epoch).max().unwrap_or(0));
    let view = merge_reports(&reports, epoch, args.staleness_epochs);
    let planned = if args.exact {
        brute_force_distribute(&view, &flows, &args.weights)
    } else {
        distribute_flows(&view, &flows, &args.weights)
    };
    planned.map_err(|e| match e {
        DistributeError::InstanceTooLarge { .. } => config(e),
        other => CommandError::Simulation(other.to_string()),
    })
}

fn resolve_scenario(path: Option<&Path>) -> Result<Scenario, CommandError> {
    match path {
        Some(p) => load_scenario(p).map_err(config),
        None => Ok(bundled_scenario()),
    }
}

fn simulate_one(sc: &Scenario, seed: u64, out_dir: &Path) -> Result<SimMetrics, CommandError> {
    let output = run(sc, seed).map_err(|e| match e {
        SimError::Config(c) => config(c),
        other => CommandError::Simulation(other.to_string()),
    })?;
    write_run(out_dir, &output).map_err(|e| CommandError::Simulation(format!("{e:#}")))?;
    Ok(output.metrics)
}

/// Runs one simulation; `None` uses the bundled scenario.
pub fn cmd_simulate(scenario: Option<&Path>, seed: u64, out_dir: &Path) -> Result<SimMetrics, CommandError> {
    let sc = resolve_scenario(scenario)?;
    simulate_one(&sc, seed, out_dir)
}

/// Runs one simulation per seed in parallel, each into `out_dir/seed-<s>`.
pub fn cmd_simulate_batch(
    scenario: Option<&Path>,
    seeds: &[u64],
    out_dir: &Path,
) -> Result<Vec<(u64, SimMetrics)>, CommandError> {
    let sc = resolve_scenario(scenario)?;
    let results: Vec<Result<SimMetrics, CommandError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let sc = &sc;
                let dir = out_dir.join(format!("seed-{seed}"));
                scope.spawn(move || simulate_one(sc, seed, &dir))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    });
    seeds.iter().copied().zip(results).map(|(s, r)| r.map(|m| (s, m))).collect()
}

/// Aggregates several `metrics.json` files into one comparison CSV.
pub fn cmd_report<W: Write>(inputs: &[PathBuf], writer: W) -> Result<(), CommandError> {
    if inputs.is_empty() {
        return Err(config("report needs at least one metrics.json"));
    }
    let mut runs = Vec::with_capacity(inputs.len());
    for path in inputs {
        let text = fs::read_to_string(path).map_err(|e| config(format!("reading {}: {e}", path.display())))?;
        let metrics: SimMetrics =
            serde_json::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))?;
        runs.push((path.display().to_string(), metrics));
    }
    write_report(&runs, writer).map_err(config)
}
