//! Output files.
//!
//! | file            | content                                   |
//! |-----------------|-------------------------------------------|
//! | `trials.csv`    | one row per mission                       |
//! | `summary.json`  | one object per (policy, δ, load) cell     |
//! | `rollup.csv`    | one row per policy, pooled over all cells |
//! | `pareto.csv`    | trade-off points with front membership    |
//! | `manifest.json` | config echo, seed, counts, wall time      |
//!
//! With [`Format::Json`] the three tables are written as JSON arrays of row
//! objects instead (`trials.json`, `rollup.json`, `pareto.json`). Floats are
//! written in shortest round-trip form, so reading a file back reproduces
//! every value bit for bit.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::SweepConfig;
use crate::error::{Error, Result};
use crate::experiment::{ParetoScope, SweepResult, TrialRecord};
use crate::metrics::{HighSeverityDelay, TrialMetrics};
use crate::policy::PolicyId;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::config("format", format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub policy: PolicyId,
    pub delta: f64,
    pub load: u32,
    pub condition_id: u32,
    pub trial: u32,
    pub aborted: bool,
    pub duration: f64,
    /// `id:delay:censored` triples joined by `;`.
    pub hs_delays: String,
    pub t_int_mean: Option<f64>,
    pub served: u32,
    pub total: u32,
    pub rho: f64,
    pub lambda_sw: f64,
    pub lambda_int: f64,
    pub workload: f64,
}

impl From<&TrialRecord> for TrialRow {
    fn from(r: &TrialRecord) -> Self {
        let m = &r.metrics;
        let hs_delays = m
            .high_severity_delays
            .iter()
            .map(|d| format!("{}:{}:{}", d.patient_id, d.delay, u8::from(d.censored)))
            .collect::<Vec<_>>()
            .join(";");
        TrialRow {
            policy: r.policy,
            delta: r.delta,
            load: r.load,
            condition_id: r.condition_id,
            trial: r.trial,
            aborted: m.aborted,
            duration: m.duration,
            hs_delays,
            t_int_mean: m.t_int_mean(),
            served: m.served_count,
            total: m.total_patients,
            rho: m.rho(),
            lambda_sw: m.lambda_sw,
            lambda_int: m.lambda_int,
            workload: m.workload,
        }
    }
}

fn parse_delays(s: &str, line: usize) -> Result<Vec<HighSeverityDelay>> {
    let bad = |reason: String| Error::TrialsFormat { line, reason };
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|item| {
            let mut parts = item.split(':');
            let (Some(id), Some(delay), Some(c), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
                return Err(bad(format!("malformed delay entry `{item}`")));
            };
            Ok(HighSeverityDelay {
                patient_id: id.parse().map_err(|_| bad(format!("bad patient id `{id}`")))?,
                delay: delay.parse().map_err(|_| bad(format!("bad delay `{delay}`")))?,
                censored: match c {
                    "0" => false,
                    "1" => true,
                    _ => return Err(bad(format!("bad censored flag `{c}`"))),
                },
            })
        })
        .collect()
}

impl TrialRow {
    fn into_record(self, line: usize) -> Result<TrialRecord> {
        if self.served > self.total {
            return Err(Error::TrialsFormat {
                line,
                reason: "served exceeds total".into(),
            });
        }
        Ok(TrialRecord {
            policy: self.policy,
            condition_id: self.condition_id,
            delta: self.delta,
            load: self.load,
            trial: self.trial,
            metrics: TrialMetrics {
                high_severity_delays: parse_delays(&self.hs_delays, line)?,
                served_count: self.served,
                total_patients: self.total,
                aborted: self.aborted,
                lambda_sw: self.lambda_sw,
                lambda_int: self.lambda_int,
                workload: self.workload,
                duration: self.duration,
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollupRow {
    pub policy: PolicyId,
    pub missions: usize,
    pub t_int_mean: Option<f64>,
    pub rho: f64,
    pub r_fail: f64,
    pub w_mean: f64,
    pub mission_time: f64,
    pub delay_median: Option<f64>,
    pub delay_p90: Option<f64>,
    pub delay_p95: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoRow {
    pub scope: ParetoScope,
    pub policy: PolicyId,
    pub delta: Option<f64>,
    pub load: Option<u32>,
    pub x: f64,
    pub y: f64,
    pub size: f64,
    pub on_front: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub master_seed: u64,
    pub total_missions: usize,
    pub wall_time_s: f64,
    pub files: Vec<String>,
    pub config: SweepConfig,
}

/// Paths written by [`emit_reports`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputBundle {
    pub trials: PathBuf,
    pub summary: PathBuf,
    pub rollup: PathBuf,
    pub pareto: PathBuf,
    pub manifest: PathBuf,
}

fn write_table<T: Serialize>(path: &Path, rows: &[T], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        Format::Json => write_json(path, rows)?,
    }
    Ok(())
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn rollup_rows(result: &SweepResult) -> Vec<RollupRow> {
    result
        .rollup
        .iter()
        .map(|r| RollupRow {
            policy: r.policy,
            missions: r.missions,
            t_int_mean: r.t_int_mean,
            rho: r.rho,
            r_fail: r.r_fail,
            w_mean: r.w_mean,
            mission_time: r.mission_time,
            delay_median: r.delay_quantiles.map(|q| q.median),
            delay_p90: r.delay_quantiles.map(|q| q.p90),
            delay_p95: r.delay_quantiles.map(|q| q.p95),
        })
        .collect()
}

pub fn pareto_rows(result: &SweepResult) -> Vec<ParetoRow> {
    result
        .pareto
        .iter()
        .map(|e| ParetoRow {
            scope: e.scope,
            policy: e.point.key.policy,
            delta: e.point.key.delta,
            load: e.point.key.load,
            x: e.point.x,
            y: e.point.y,
            size: e.point.size,
            on_front: e.on_front,
        })
        .collect()
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes summary, rollup and pareto files; returns their paths.
pub fn emit_analysis(result: &SweepResult, format: Format, dir: &Path) -> Result<(PathBuf, PathBuf, PathBuf)> {
    prepare_dir(dir)?;
    let summary = dir.join("summary.json");
    write_json(&summary, &result.summaries)?;
    let rollup = dir.join(format!("rollup.{}", format.ext()));
    write_table(&rollup, &rollup_rows(result), format)?;
    let pareto = dir.join(format!("pareto.{}", format.ext()));
    write_table(&pareto, &pareto_rows(result), format)?;
    Ok((summary, rollup, pareto))
}

/// Writes the full output bundle of a sweep into `dir`.
pub fn emit_reports(
    result: &SweepResult,
    config: &SweepConfig,
    format: Format,
    dir: &Path,
    wall_time_s: f64,
) -> Result<OutputBundle> {
    if result.records.is_empty() {
        return Err(Error::EmptySample("emit_reports"));
    }
    prepare_dir(dir)?;
    let trials = dir.join(format!("trials.{}", format.ext()));
    let rows: Vec<TrialRow> = result.records.iter().map(TrialRow::from).collect();
    write_table(&trials, &rows, format)?;
    let (summary, rollup, pareto) = emit_analysis(result, format, dir)?;
    let manifest = dir.join("manifest.json");
    let name = |p: &Path| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    write_json(
        &manifest,
        &Manifest {
            version: VERSION.to_string(),
            master_seed: config.master_seed,
            total_missions: rows.len(),
            wall_time_s,
            files: [&trials, &summary, &rollup, &pareto].iter().map(|p| name(p)).collect(),
            config: config.clone(),
        },
    )?;
    Ok(OutputBundle {
        trials,
        summary,
        rollup,
        pareto,
        manifest,
    })
}

/// Reads a trials file written by [`emit_reports`] (CSV or JSON by
/// extension).
pub fn read_trials(path: &Path) -> Result<Vec<TrialRecord>> {
    let rows: Vec<TrialRow> = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text)?
    } else {
        let mut r = csv::Reader::from_path(path)?;
        r.deserialize().collect::<std::result::Result<_, _>>()?
    };
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| row.into_record(i + 2))
        .collect()
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
