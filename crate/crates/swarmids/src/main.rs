use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use swarmids::commands::{
    cmd_distribute, cmd_report, cmd_select, cmd_simulate, cmd_simulate_batch, cmd_synth,
    cmd_validate_catalog, cmd_validate_scenario, CommandError, ConstraintsArg, DistributeArgs,
    DEFAULT_N_PER_PLATFORM,
};
use swarmids_core::{CostWeights, PlatformKind, SecurityLevel};

#[derive(Parser)]
#[command(name = "swarmids", version, about = "IDS selection and traffic distribution for drone swarms")]
struct Cli {
    /// RNG seed (synth-catalog defaults to 7, simulate to 42).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (synth-catalog, select, distribute, report) or directory (simulate).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic implementation catalog as CSV.
    SynthCatalog {
        #[arg(long, default_value_t = DEFAULT_N_PER_PLATFORM)]
        n_per_platform: usize,
    },
    /// Check a catalog CSV or a scenario file.
    Validate(ValidateArgs),
    /// Run offline and online selection for one drone and print the decision.
    Select {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long, value_parser = parse_platform)]
        platform: PlatformKind,
        #[arg(long)]
        storage_budget: f64,
        /// Mission constraints as inline JSON or a path to a JSON file.
        #[arg(long, conflicts_with = "level")]
        constraints: Option<String>,
        /// Use the default constraint profile of a security level.
        #[arg(long, value_parser = parse_level)]
        level: Option<SecurityLevel>,
    },
    /// Plan a flow-to-drone assignment from JSON-lines reports and flows.
    Distribute {
        #[arg(long)]
        reports: PathBuf,
        #[arg(long)]
        flows: PathBuf,
        #[arg(long)]
        epoch: Option<u64>,
        #[arg(long, default_value_t = 2)]
        staleness: u64,
        #[arg(long, default_value_t = CostWeights::default().alpha)]
        alpha: f64,
        #[arg(long, default_value_t = CostWeights::default().beta)]
        beta: f64,
        #[arg(long, default_value_t = CostWeights::default().gamma)]
        gamma: f64,
        /// Exhaustive search instead of the greedy planner.
        #[arg(long)]
        exact: bool,
    },
    /// Run a mission simulation and write metrics, events and plot data.
    Simulate {
        /// Scenario JSON; the bundled 5-drone scenario when omitted.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Run N consecutive seeds starting at --seed.
        #[arg(long, conflicts_with = "seeds")]
        runs: Option<u64>,
        /// Explicit comma-separated seeds for a batch.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Combine several metrics.json files into one comparison CSV.
    Report {
        #[arg(required = true)]
        metrics: Vec<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ValidateArgs {
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<PathBuf>,
}

fn parse_platform(s: &str) -> Result<PlatformKind, String> {
    s.parse()
}

fn parse_level(s: &str) -> Result<SecurityLevel, String> {
    SecurityLevel::ALL
        .into_iter()
        .find(|l| l.label() == s)
        .ok_or_else(|| format!("unknown level `{s}` (low, medium, high)"))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CommandError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CommandError::Config(format!("writing {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CommandError::Config(format!("writing stdout: {e}")))
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn execute(cli: Cli) -> Result<(), CommandError> {
    let note = |msg: String| {
        if !cli.quiet {
            eprintln!("{msg}");
        }
    };
    let out = cli.out.as_deref();
    match cli.command {
        Command::SynthCatalog { n_per_platform } => {
            let text = cmd_synth(cli.seed.unwrap_or(7), n_per_platform, out)?;
            match out {
                Some(p) => note(format!("wrote {} rows to {}", text.lines().count() - 1, p.display())),
                None => emit(None, &text)?,
            }
        }
        Command::Validate(args) => {
            let msg = match (args.catalog, args.scenario) {
                (Some(c), _) => cmd_validate_catalog(&c)?,
                (_, Some(s)) => cmd_validate_scenario(&s)?,
                _ => unreachable!("clap enforces exactly one"),
            };
            println!("{msg}");
        }
        Command::Select { catalog, platform, storage_budget, constraints, level } => {
            let arg = match (&constraints, level) {
                (Some(raw), _) => ConstraintsArg::Json(raw),
                (None, Some(l)) => ConstraintsArg::Level(l),
                (None, None) => ConstraintsArg::Unbounded,
            };
            let decision = cmd_select(&catalog, platform, storage_budget, arg)?;
            emit(out, &to_json(&decision))?;
        }
        Command::Distribute { reports, flows, epoch, staleness, alpha, beta, gamma, exact } => {
            let plan = cmd_distribute(&DistributeArgs {
                reports: &reports,
                flows: &flows,
                epoch,
                staleness_epochs: staleness,
                weights: CostWeights { alpha, beta, gamma },
                exact,
            })?;
            let mut line = serde_json::to_string(&plan).expect("plan serializes");
            line.push('\n');
            emit(out, &line)?;
        }
        Command::Simulate { scenario, runs, seeds } => {
            let out_dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("out"));
            let base = cli.seed.unwrap_or(42);
            let batch = match (runs, seeds) {
                (Some(n), _) => Some((0..n).map(|i| base + i).collect::<Vec<_>>()),
                (None, Some(s)) => Some(s),
                (None, None) => None,
            };
            match batch {
                Some(seeds) => {
                    for (seed, m) in cmd_simulate_batch(scenario.as_deref(), &seeds, &out_dir)? {
                        note(format!(
                            "seed {seed}: {} analyzed, {} dropped, {:.1} J",
                            m.swarm.flows_analyzed, m.swarm.dropped, m.swarm.energy_j
                        ));
                    }
                }
                None => {
                    let m = cmd_simulate(scenario.as_deref(), base, &out_dir)?;
                    note(format!(
                        "{} analyzed, {} dropped, {} detected / {} missed, {:.1} J; outputs in {}",
                        m.swarm.flows_analyzed,
                        m.swarm.dropped,
                        m.swarm.detected,
                        m.swarm.missed,
                        m.swarm.energy_j,
                        out_dir.display()
                    ));
                }
            }
        }
        Command::Report { metrics } => {
            let mut buf = Vec::new();
            cmd_report(&metrics, &mut buf)?;
            emit(out, &String::from_utf8(buf).expect("CSV is UTF-8"))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
