//! Plot-ready CSV and JSON tables.
//!
//! Both formats are rendered from the same cell rows, so they agree field by
//! field. Reals are rounded to 9 significant digits and printed in their
//! shortest round-tripping form.

use crate::config::CliConfig;
use crate::{CliError, CliResult, VERSION};
use beamtrack_core::simulator::{EpochRecord, RunOutput, RunSummary, StepRecord};
use beamtrack_core::tiam::TiamMode;
use beamtrack_core::Point;
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

pub const STEP_COLUMNS: [&str; 13] = [
    "t",
    "u_true",
    "v_true",
    "u_pred",
    "v_pred",
    "gain",
    "snr_db",
    "rate",
    "ee",
    "reconstructed",
    "dt_star",
    "rebuild_u",
    "rebuild_v",
];

pub const EPOCH_COLUMNS: [&str; 7] = ["t", "truth_x", "truth_y", "estimate_x", "estimate_y", "error", "fitness"];

pub const SUMMARY_COLUMNS: [&str; 18] = [
    "config_digest",
    "seed",
    "version",
    "tiam_mode",
    "tracker",
    "steps",
    "mean_gain",
    "min_gain",
    "mean_rate",
    "mean_ee",
    "reconstructions",
    "rebuilds_u",
    "rebuilds_v",
    "coverage",
    "localization_error",
    "angle_rms_error",
    "wall_clock_per_cycle",
    "trajectory_digest",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

/// Rounds to 9 significant digits.
pub fn round9(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.8e}").parse().expect("formatted floats parse")
    } else {
        x
    }
}

pub fn format_real(x: f64) -> String {
    round9(x).to_string()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Flag(bool),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(x) => format_real(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Flag(b) => u8::from(*b).to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Real(x) => serde_json::Number::from_f64(round9(*x)).map_or(Value::Null, Value::Number),
            Cell::Int(n) => Value::from(*n),
            Cell::Flag(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Missing => Value::Null,
        }
    }
}

/// Everything needed to rerun and identify a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub config_digest: String,
    pub seed: u64,
    pub version: String,
    pub tiam_mode: TiamMode,
}

impl Metadata {
    pub fn of(cfg: &CliConfig) -> Self {
        Self {
            config_digest: cfg.digest(),
            seed: cfg.scenario.seed,
            version: VERSION.to_string(),
            tiam_mode: cfg.scenario.tiam.mode,
        }
    }

    fn json(&self) -> Value {
        serde_json::json!({
            "config_digest": self.config_digest,
            "seed": self.seed,
            "version": self.version,
            "tiam_mode": self.tiam_mode.as_str(),
        })
    }

    /// One line for the top of console tables.
    pub fn banner(&self) -> String {
        format!(
            "# config_digest={} seed={} version={} tiam_mode={}",
            self.config_digest,
            self.seed,
            self.version,
            self.tiam_mode.as_str()
        )
    }
}

pub struct ExportBundle<'a> {
    pub metadata: Metadata,
    pub config: &'a CliConfig,
    pub steps: &'a [StepRecord],
    pub epochs: &'a [EpochRecord],
    pub summary: &'a RunSummary,
}

impl<'a> ExportBundle<'a> {
    pub fn new(config: &'a CliConfig, run: &'a RunOutput) -> Self {
        Self {
            metadata: Metadata::of(config),
            config,
            steps: &run.steps,
            epochs: &run.epochs,
            summary: &run.summary,
        }
    }
}

pub fn step_cells(s: &StepRecord) -> Vec<Cell> {
    use Cell::{Flag, Real};
    vec![
        Real(s.t),
        Real(s.u_true),
        Real(s.v_true),
        Real(s.u_pred),
        Real(s.v_pred),
        Real(s.gain),
        Real(s.snr_db),
        Real(s.rate),
        Real(s.ee),
        Flag(s.reconstructed),
        Real(s.dt_star),
        Flag(s.rebuild_u),
        Flag(s.rebuild_v),
    ]
}

pub fn epoch_cells(e: &EpochRecord) -> Vec<Cell> {
    [e.t, e.truth.x, e.truth.y, e.estimate.x, e.estimate.y, e.error, e.fitness]
        .into_iter()
        .map(Cell::Real)
        .collect()
}

pub fn summary_cells(m: &Metadata, s: &RunSummary) -> Vec<Cell> {
    use Cell::{Int, Real, Text};
    vec![
        Text(m.config_digest.clone()),
        Int(m.seed),
        Text(m.version.clone()),
        Text(m.tiam_mode.as_str().into()),
        Text(s.tracker.as_str().into()),
        Int(s.steps as u64),
        Real(s.mean_gain),
        Real(s.min_gain),
        Real(s.mean_rate),
        Real(s.mean_ee),
        Int(s.reconstructions as u64),
        Int(s.rebuilds_u as u64),
        Int(s.rebuilds_v as u64),
        Real(s.coverage),
        Real(s.localization_error),
        Real(s.angle_rms_error),
        s.wall_clock_per_cycle.map_or(Cell::Missing, Real),
        Text(s.trajectory_digest.clone()),
    ]
}

pub fn csv_table(columns: &[&str], rows: impl IntoIterator<Item = Vec<Cell>>) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(Cell::csv).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn json_rows(columns: &[&str], rows: impl IntoIterator<Item = Vec<Cell>>) -> Value {
    Value::Array(rows.into_iter().map(|r| json_object(columns, &r)).collect())
}

fn json_object(columns: &[&str], row: &[Cell]) -> Value {
    let map: Map<String, Value> = columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
    Value::Object(map)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// File names and contents for one run.
pub fn render(bundle: &ExportBundle, format: Format) -> Vec<(&'static str, String)> {
    let steps = bundle.steps.iter().map(step_cells);
    let epochs = bundle.epochs.iter().map(epoch_cells);
    let summary = summary_cells(&bundle.metadata, bundle.summary);
    let config = ("config.toml", bundle.config.to_toml());
    match format {
        Format::Csv => vec![
            ("steps.csv", csv_table(&STEP_COLUMNS, steps)),
            ("epochs.csv", csv_table(&EPOCH_COLUMNS, epochs)),
            ("summary.csv", csv_table(&SUMMARY_COLUMNS, [summary])),
            config,
        ],
        Format::Json => {
            let meta = bundle.metadata.json();
            vec![
                (
                    "steps.json",
                    pretty(&serde_json::json!({ "metadata": meta, "steps": json_rows(&STEP_COLUMNS, steps) })),
                ),
                (
                    "epochs.json",
                    pretty(&serde_json::json!({ "metadata": meta, "epochs": json_rows(&EPOCH_COLUMNS, epochs) })),
                ),
                ("summary.json", pretty(&json_object(&SUMMARY_COLUMNS, &summary))),
                config,
            ]
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("io error on {}: {e}", path.display()))
}

/// Writes all files into a staging directory first and then moves them into
/// `dir`, so a failed export leaves no partial tables behind.
pub fn write_files(dir: &Path, files: &[(&str, String)]) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let staging = dir.join(format!(".beamtrack-staging-{}", std::process::id()));
    let staged = (|| {
        fs::create_dir_all(&staging).map_err(|e| io_error(&staging, e))?;
        for (name, text) in files {
            let p = staging.join(name);
            fs::write(&p, text).map_err(|e| io_error(&p, e))?;
        }
        let mut out = Vec::with_capacity(files.len());
        for (name, _) in files {
            let target = dir.join(name);
            fs::rename(staging.join(name), &target).map_err(|e| io_error(&target, e))?;
            out.push(target);
        }
        Ok(out)
    })();
    let _ = fs::remove_dir_all(&staging);
    staged
}

pub fn export(bundle: &ExportBundle, dir: &Path, format: Format) -> CliResult<Vec<PathBuf>> {
    write_files(dir, &render(bundle, format))
}

/// A CSV file as named columns over rows of raw strings.
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let mut lines = text.lines().filter(|l| !l.starts_with('#'));
        let columns: Vec<String> = lines
            .next()
            .ok_or_else(|| CliError::Validation(format!("{origin}: missing header")))?
            .split(',')
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row: Vec<String> = line.split(',').map(str::to_string).collect();
            if row.len() != columns.len() {
                return Err(CliError::Validation(format!(
                    "{origin}: row {} has {} fields, expected {}",
                    i + 1,
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn records(&self) -> impl Iterator<Item = BTreeMap<&str, &str>> {
        self.rows
            .iter()
            .map(|r| self.columns.iter().map(String::as_str).zip(r.iter().map(String::as_str)).collect())
    }
}

fn field<'a>(rec: &BTreeMap<&str, &'a str>, name: &str) -> CliResult<&'a str> {
    rec.get(name)
        .copied()
        .ok_or_else(|| CliError::Validation(format!("missing column `{name}`")))
}

fn real(rec: &BTreeMap<&str, &str>, name: &str) -> CliResult<f64> {
    let raw = field(rec, name)?;
    raw.parse()
        .map_err(|_| CliError::Validation(format!("column `{name}`: `{raw}` is not a number")))
}

fn flag(rec: &BTreeMap<&str, &str>, name: &str) -> CliResult<bool> {
    match field(rec, name)? {
        "0" => Ok(false),
        "1" => Ok(true),
        raw => Err(CliError::Validation(format!("column `{name}`: `{raw}` is not 0 or 1"))),
    }
}

pub fn import_steps(path: &Path) -> CliResult<Vec<StepRecord>> {
    let table = CsvTable::read(path)?;
    if table.columns != STEP_COLUMNS {
        return Err(CliError::Validation(format!("{}: unexpected columns", path.display())));
    }
    table
        .records()
        .map(|r| {
            Ok(StepRecord {
                t: real(&r, "t")?,
                u_true: real(&r, "u_true")?,
                v_true: real(&r, "v_true")?,
                u_pred: real(&r, "u_pred")?,
                v_pred: real(&r, "v_pred")?,
                gain: real(&r, "gain")?,
                snr_db: real(&r, "snr_db")?,
                rate: real(&r, "rate")?,
                ee: real(&r, "ee")?,
                reconstructed: flag(&r, "reconstructed")?,
                dt_star: real(&r, "dt_star")?,
                rebuild_u: flag(&r, "rebuild_u")?,
                rebuild_v: flag(&r, "rebuild_v")?,
            })
        })
        .collect()
}

pub fn import_epochs(path: &Path) -> CliResult<Vec<EpochRecord>> {
    let table = CsvTable::read(path)?;
    table
        .records()
        .map(|r| {
            Ok(EpochRecord {
                t: real(&r, "t")?,
                truth: Point::new(real(&r, "truth_x")?, real(&r, "truth_y")?),
                estimate: Point::new(real(&r, "estimate_x")?, real(&r, "estimate_y")?),
                error: real(&r, "error")?,
                fitness: real(&r, "fitness")?,
            })
        })
        .collect()
}

/// Summary recomputed from an exported CSV run directory.
pub fn recompute_summary(dir: &Path) -> CliResult<RunSummary> {
    let cfg = crate::config::parse_config(&dir.join("config.toml"))?;
    let steps = import_steps(&dir.join("steps.csv"))?;
    let epochs = import_epochs(&dir.join("epochs.csv"))?;
    let exported = CsvTable::read(&dir.join("summary.csv"))?;
    let digest = exported
        .records()
        .next()
        .map(|r| field(&r, "trajectory_digest").map(str::to_string))
        .transpose()?
        .unwrap_or_default();
    let s = &cfg.scenario;
    Ok(RunSummary::from_log(s.tracker, s.tiam.mode, &steps, &epochs, &s.array, digest))
}
