//! Runs a config and writes its outputs.
//!
//! Output directory layout:
//!
//! - `series.csv`: `t,energy,flux_reduced,flux_projected,err_sq,tail_fraction,M`
//! - `events.jsonl`: one `{t, M_before, M_after, flux, rel_flux, strategy}` per event
//! - `spectrum_<t>.csv`: `k,esq` at each requested time
//! - `result.json`: outcome and summary

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{parse_config, RunConfig};
use crate::error::Result;
use crate::par::Execution;
use crate::refinement::{run_driver, Outcome, RefinementEvent, RunResult, Strategy};

/// Overrides the root that relative output directories are resolved against.
pub const OUTPUT_ROOT_ENV: &str = "MZREFINE_OUTPUT_ROOT";

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

impl Outcome {
    /// Process exit code: 0 completed, 2 at the band limit, 3 blow-up.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Completed => 0,
            Outcome::AtLimit => 2,
            Outcome::BlowUp => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the canonical JSON form of the resolved config.
    pub config_hash: String,
    pub code_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub outcome: Outcome,
    pub t_final: f64,
    #[serde(rename = "M_final")]
    pub m_final: usize,
    /// `||u(0)||^2`.
    pub initial_norm_sq: f64,
    /// `(1/2) ||u(0)||^2`.
    pub initial_energy: f64,
    pub final_energy: f64,
    pub events: usize,
    pub steps: usize,
    pub max_flux: f64,
    pub limit_time: Option<f64>,
    pub failure: Option<String>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EventRow {
    t: f64,
    #[serde(rename = "M_before")]
    m_before: usize,
    #[serde(rename = "M_after")]
    m_after: usize,
    flux: f64,
    rel_flux: f64,
    strategy: Strategy,
}

impl From<&RefinementEvent> for EventRow {
    fn from(e: &RefinementEvent) -> Self {
        Self {
            t: e.t,
            m_before: e.m_before,
            m_after: e.m_after,
            flux: e.trigger.flux,
            rel_flux: e.trigger.rel_flux,
            strategy: e.trigger.strategy,
        }
    }
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let canonical = serde_json::to_vec(cfg).expect("config serializes");
    let digest = Sha256::digest(&canonical);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Output directory for a config: its `output_dir` (or `runs/<name>`),
/// placed under `$MZREFINE_OUTPUT_ROOT` when that is set and the path is relative.
pub fn output_dir_for(cfg: &RunConfig, name: &str) -> PathBuf {
    let dir = cfg
        .output_dir
        .clone()
        .unwrap_or_else(|| Path::new("runs").join(name));
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if dir.is_relative() => PathBuf::from(root).join(dir),
        _ => dir,
    }
}

pub fn summarize(cfg: &RunConfig, r: &RunResult) -> RunSummary {
    let initial_norm_sq = 2.0 * r.initial_energy;
    RunSummary {
        outcome: r.outcome,
        t_final: r.final_state.t,
        m_final: r.final_state.field.band().size(),
        initial_norm_sq,
        initial_energy: r.initial_energy,
        final_energy: r.final_state.energy(),
        events: r.events.len(),
        steps: r.samples.len().saturating_sub(1),
        max_flux: r.samples.iter().map(|s| s.flux).fold(0.0, f64::max),
        limit_time: r.limit_time,
        failure: r.failure.clone(),
        provenance: Provenance {
            config_hash: config_hash(cfg),
            code_version: VERSION.to_string(),
        },
    }
}

/// Writes every output file for a finished run.
pub fn write_outputs(dir: &Path, summary: &RunSummary, r: &RunResult) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut series = csv::Writer::from_path(dir.join("series.csv"))?;
    for row in &r.series {
        series.serialize(row)?;
    }
    if r.series.is_empty() {
        series.write_record(["t", "energy", "flux_reduced", "flux_projected", "err_sq", "tail_fraction", "M"])?;
    }
    series.flush()?;

    let mut events = BufWriter::new(File::create(dir.join("events.jsonl"))?);
    for e in &r.events {
        serde_json::to_writer(&mut events, &EventRow::from(e))?;
        events.write_all(b"\n")?;
    }
    events.flush()?;

    for snap in &r.spectra {
        let mut w = csv::Writer::from_path(dir.join(format!("spectrum_{}.csv", snap.t)))?;
        w.write_record(["k", "esq"])?;
        for &(k, esq) in &snap.entries {
            w.write_record([k.to_string(), esq.to_string()])?;
        }
        w.flush()?;
    }

    let mut out = BufWriter::new(File::create(dir.join("result.json"))?);
    serde_json::to_writer_pretty(&mut out, summary)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Runs a validated config and writes its outputs under `dir`.
pub fn run(cfg: &RunConfig, dir: &Path) -> Result<(RunSummary, RunResult)> {
    let result = run_driver(&cfg.driver_config()?)?;
    let summary = summarize(cfg, &result);
    write_outputs(dir, &summary, &result)?;
    Ok((summary, result))
}

/// Reads, runs and writes one config file. The default output name is the file stem.
pub fn run_file(path: &Path) -> Result<(PathBuf, RunSummary)> {
    let cfg = parse_config(&fs::read_to_string(path)?)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    let dir = output_dir_for(&cfg, name);
    let (summary, _) = run(&cfg, &dir)?;
    Ok((dir, summary))
}

/// Runs several config files, independent runs in parallel under `exec`.
pub fn sweep(paths: &[PathBuf], exec: Execution) -> Vec<(PathBuf, Result<(PathBuf, RunSummary)>)> {
    exec.map(paths.len(), |i| (paths[i].clone(), run_file(&paths[i])))
}
