//! Run artifacts: `metrics.json`, `summary.csv`, `events.jsonl` and
//! `plotdata/*.csv`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use swarmids_core::sim::{DroneMetrics, EventRecord, SeriesSample};
use swarmids_core::{SimMetrics, SimOutput};

pub const SUMMARY_HEADER: [&str; 11] = [
    "drone_id",
    "flows_generated",
    "flows_analyzed",
    "malicious_total",
    "detected",
    "missed",
    "dropped",
    "mean_latency_ms",
    "energy_j",
    "comm_bytes",
    "impl_switches",
];

pub fn metrics_json(metrics: &SimMetrics) -> String {
    let mut text = serde_json::to_string_pretty(metrics).expect("metrics serialize");
    text.push('\n');
    text
}

pub fn events_jsonl(events: &[EventRecord]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("events serialize"));
        out.push('\n');
    }
    out
}

fn summary_row(m: &DroneMetrics) -> [String; 11] {
    [
        m.drone_id.clone(),
        m.flows_generated.to_string(),
        m.flows_analyzed.to_string(),
        m.malicious_total.to_string(),
        m.detected.to_string(),
        m.missed.to_string(),
        m.dropped.to_string(),
        m.mean_latency_ms.to_string(),
        m.energy_j.to_string(),
        m.comm_bytes.to_string(),
        m.impl_switches.to_string(),
    ]
}

/// One row per drone plus a final `swarm` row.
pub fn write_summary<W: Write>(metrics: &SimMetrics, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SUMMARY_HEADER)?;
    for m in metrics.drones.iter().chain(std::iter::once(&metrics.swarm)) {
        w.write_record(summary_row(m))?;
    }
    w.flush()?;
    Ok(())
}

fn write_series<F>(path: &Path, column: &str, series: &[SeriesSample], value: F) -> Result<()>
where
    F: Fn(&SeriesSample) -> String,
{
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["time_s", "drone_id", column])?;
    for s in series {
        w.write_record([s.time_s.to_string(), s.drone_id.clone(), value(s)])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every artifact of one run into `dir`, creating it if needed.
pub fn write_run(dir: &Path, output: &SimOutput) -> Result<()> {
    let plot_dir = dir.join("plotdata");
    fs::create_dir_all(&plot_dir).with_context(|| format!("creating {}", plot_dir.display()))?;

    fs::write(dir.join("metrics.json"), metrics_json(&output.metrics))?;
    fs::write(dir.join("events.jsonl"), events_jsonl(&output.events))?;
    let summary = File::create(dir.join("summary.csv"))?;
    write_summary(&output.metrics, BufWriter::new(summary))?;

    write_series(&plot_dir.join("battery.csv"), "battery_j", &output.series, |s| s.battery_j.to_string())?;
    write_series(&plot_dir.join("queue.csv"), "queue_flows", &output.series, |s| s.queue_flows.to_string())?;
    write_series(&plot_dir.join("detections.csv"), "cumulative_detected", &output.series, |s| {
        s.cumulative_detected.to_string()
    })?;
    Ok(())
}

pub const REPORT_HEADER: [&str; 14] = [
    "run",
    "seed",
    "duration_s",
    "flows_generated",
    "flows_analyzed",
    "malicious_total",
    "detected",
    "missed",
    "dropped",
    "detection_rate",
    "mean_latency_ms",
    "energy_j",
    "comm_bytes",
    "impl_switches",
];

/// Swarm-level comparison of several runs, one row per `metrics.json`.
pub fn write_report<W: Write>(runs: &[(String, SimMetrics)], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(REPORT_HEADER)?;
    for (label, m) in runs {
        let s = &m.swarm;
        let rate = m.detection_rate().map(|r| r.to_string()).unwrap_or_default();
        w.write_record([
            label.clone(),
            m.seed.to_string(),
            m.duration_s.to_string(),
            s.flows_generated.to_string(),
            s.flows_analyzed.to_string(),
            s.malicious_total.to_string(),
            s.detected.to_string(),
            s.missed.to_string(),
            s.dropped.to_string(),
            rate,
            s.mean_latency_ms.to_string(),
            s.energy_j.to_string(),
            s.comm_bytes.to_string(),
            s.impl_switches.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
