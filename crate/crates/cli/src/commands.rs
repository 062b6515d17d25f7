//! Subcommand definitions and dispatch.

use crate::config::{resolve, CliConfig};
use crate::export::{self, csv_table, Cell, ExportBundle, Format, Metadata};
use crate::{CliError, CliResult};
use beamtrack_core::simulator::{
    bench_optimizers, localization_experiment, measure_runtime, percentile, presets, run_comparison,
    run_scenario, with_trackers, MotionModel, Tracker,
};
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "beamtrack", version, about = "Seeded UAV-to-ground beam tracking experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Scenario file (TOML). Omitted fields take the base preset's values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Base preset for omitted fields.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(presets::NAMES))]
    pub preset: Option<String>,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ConfigArgs {
    fn load(&self) -> CliResult<CliConfig> {
        resolve(self.config.as_deref(), self.preset.as_deref(), self.seed)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario and export its step log and summary.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
        format: String,
    },
    /// Run several trackers on one trajectory realization.
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated trackers; the first is the reference row.
        #[arg(long, value_delimiter = ',', default_value = "bab-ar,fixed,codebook,beamopt")]
        trackers: Vec<String>,
    },
    /// Compare GDCSA, CSA and PSO on the localization problem.
    BenchOptimizers {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 21)]
        seeds: usize,
    },
    /// Time reconstruction cycles across square array sizes.
    RuntimeSweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated sizes, either `NxN` or a total antenna count that is a perfect square.
        #[arg(long, value_delimiter = ',', default_value = "8x8,16x16,32x32")]
        antennas: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "bab-ar,codebook,beamopt")]
        trackers: Vec<String>,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
    },
    /// Repeatedly localize a moving U-UAV.
    Localize {
        #[command(flatten)]
        config: ConfigArgs,
        /// Also write every sample to `localization.csv` in this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the complete config of a preset.
    EmitDefaults {
        #[arg(long, default_value = "default", value_parser = clap::builder::PossibleValuesParser::new(presets::NAMES))]
        preset: String,
    },
}

fn trackers(names: &[String]) -> CliResult<Vec<Tracker>> {
    if names.is_empty() {
        return Err(CliError::Validation("at least one tracker is required".into()));
    }
    names
        .iter()
        .map(|n| {
            Tracker::parse(n.trim()).ok_or_else(|| {
                let known: Vec<&str> = Tracker::ALL.iter().map(Tracker::as_str).collect();
                CliError::Validation(format!("unknown tracker `{n}` (expected one of {})", known.join(", ")))
            })
        })
        .collect()
}

/// Elements per side for `NxN` or a perfect-square total.
pub fn parse_side(spec: &str) -> CliResult<usize> {
    let bad = || CliError::Validation(format!("bad array size `{spec}`: expected NxN or a perfect square"));
    let spec = spec.trim();
    if let Some((a, b)) = spec.split_once('x') {
        let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
        return if a == b && a > 0 { Ok(a) } else { Err(bad()) };
    }
    let n: usize = spec.parse().map_err(|_| bad())?;
    let side = (n as f64).sqrt().round() as usize;
    if side > 0 && side * side == n {
        Ok(side)
    } else {
        Err(bad())
    }
}

fn run(config: &ConfigArgs, out: &Path, format: &str) -> CliResult<String> {
    let cfg = config.load()?;
    let format = Format::parse(format).ok_or_else(|| CliError::Validation(format!("unknown format `{format}`")))?;
    let result = run_scenario(&cfg.scenario).map_err(CliError::runtime)?;
    let bundle = ExportBundle::new(&cfg, &result);
    let files = export::export(&bundle, out, format)?;
    let mut text = bundle.metadata.banner();
    text.push('\n');
    for f in files {
        text.push_str(&format!("# wrote {}\n", f.display()));
    }
    Ok(text)
}

fn compare(config: &ConfigArgs, names: &[String]) -> CliResult<String> {
    let cfg = config.load()?;
    let list = trackers(names)?;
    let table = run_comparison(&with_trackers(&cfg.scenario, &list)).map_err(CliError::runtime)?;
    let rows = table.rows.iter().map(|r| {
        let s = &r.summary;
        vec![
            Cell::Text(s.tracker.as_str().into()),
            Cell::Real(s.mean_gain),
            Cell::Real(s.min_gain),
            Cell::Real(s.mean_rate),
            Cell::Real(s.mean_ee),
            Cell::Int(s.reconstructions as u64),
            Cell::Real(s.coverage),
            Cell::Real(r.gain_improvement),
            Cell::Real(r.rate_improvement),
            Cell::Real(r.ee_improvement),
            Cell::Text(s.trajectory_digest.clone()),
        ]
    });
    let columns = [
        "tracker",
        "mean_gain",
        "min_gain",
        "mean_rate",
        "mean_ee",
        "reconstructions",
        "coverage",
        "gain_improvement",
        "rate_improvement",
        "ee_improvement",
        "trajectory_digest",
    ];
    Ok(format!("{}\n{}", Metadata::of(&cfg).banner(), csv_table(&columns, rows)))
}

fn bench(config: &ConfigArgs, seeds: usize) -> CliResult<String> {
    let cfg = config.load()?;
    let report = bench_optimizers(&cfg.scenario, seeds).map_err(CliError::runtime)?;
    let rows = report.rows.iter().map(|r| {
        vec![
            Cell::Text(r.optimizer.as_str().into()),
            Cell::Real(r.median_fitness),
            Cell::Real(r.median_error),
            Cell::Int(r.evaluations as u64),
        ]
    });
    let columns = ["optimizer", "median_fitness", "median_error", "evaluations"];
    Ok(format!("{}\n{}", Metadata::of(&cfg).banner(), csv_table(&columns, rows)))
}

fn runtime_sweep(config: &ConfigArgs, antennas: &[String], names: &[String], repetitions: usize) -> CliResult<String> {
    let cfg = config.load()?;
    let sides = antennas.iter().map(|a| parse_side(a)).collect::<CliResult<Vec<_>>>()?;
    let list = trackers(names)?;
    let report = measure_runtime(&cfg.scenario, &list, &sides, repetitions).map_err(CliError::runtime)?;
    let rows = report.points.iter().map(|p| {
        vec![
            Cell::Text(p.tracker.as_str().into()),
            Cell::Int((p.side * p.side) as u64),
            Cell::Int(p.side as u64),
            Cell::Real(p.median),
            Cell::Real(p.iqr),
            Cell::Int(p.samples.len() as u64),
        ]
    });
    let columns = ["tracker", "antennas", "side", "median_s", "iqr_s", "samples"];
    Ok(format!("{}\n{}", Metadata::of(&cfg).banner(), csv_table(&columns, rows)))
}

fn motion_name(m: MotionModel) -> &'static str {
    match m {
        MotionModel::Static => "static",
        MotionModel::Ctrv => "ctrv",
        MotionModel::Ctra => "ctra",
        MotionModel::Random => "random",
        MotionModel::Trace => "trace",
    }
}

fn localize(config: &ConfigArgs, out: Option<&PathBuf>) -> CliResult<String> {
    let cfg = config.load()?;
    let report = localization_experiment(&cfg.scenario, &cfg.localization).map_err(CliError::runtime)?;
    let mut groups: Vec<(String, Vec<&_>)> = cfg
        .localization
        .motions
        .iter()
        .map(|&m| (motion_name(m).to_string(), report.samples.iter().filter(|s| s.motion == m).collect()))
        .collect();
    groups.push(("all".into(), report.samples.iter().collect()));
    let rows = groups.iter().map(|(name, ss)| {
        let errors: Vec<f64> = ss.iter().map(|s| s.error).collect();
        let rel: Vec<f64> = ss.iter().flat_map(|s| s.angle_relative_errors.iter().copied()).collect();
        let within = errors.iter().filter(|&&e| e < 0.5).count() as f64 / errors.len().max(1) as f64;
        vec![
            Cell::Text(name.clone()),
            Cell::Int(ss.len() as u64),
            Cell::Real(within),
            Cell::Real(percentile(&errors, 0.5)),
            Cell::Real(percentile(&errors, 0.95)),
            Cell::Real(percentile(&rel, 0.95)),
        ]
    });
    let columns = ["motion", "epochs", "within_0_5m", "median_error", "p95_error", "p95_angle_relative_error"];
    let table = csv_table(&columns, rows);
    let meta = Metadata::of(&cfg);
    let mut text = format!("{}\n{table}", meta.banner());
    if let Some(dir) = out {
        let n = cfg.scenario.a_uav_positions.len();
        let mut cols: Vec<String> = ["motion", "epoch", "truth_x", "truth_y", "estimate_x", "estimate_y", "error"]
            .map(String::from)
            .to_vec();
        cols.extend((0..n).map(|i| format!("angle_relative_error_{i}")));
        let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
        let rows = report.samples.iter().map(|s| {
            let mut r = vec![
                Cell::Text(motion_name(s.motion).into()),
                Cell::Int(s.epoch as u64),
                Cell::Real(s.truth.x),
                Cell::Real(s.truth.y),
                Cell::Real(s.estimate.x),
                Cell::Real(s.estimate.y),
                Cell::Real(s.error),
            ];
            r.extend(s.angle_relative_errors.iter().map(|&e| Cell::Real(e)));
            r
        });
        let files = [
            ("localization.csv", csv_table(&col_refs, rows)),
            ("config.toml", cfg.to_toml()),
        ];
        for f in export::write_files(dir, &files)? {
            text.push_str(&format!("# wrote {}\n", f.display()));
        }
    }
    Ok(text)
}

/// Executes a parsed command and returns what it prints on success.
pub fn dispatch(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Run { config, out, format } => run(config, out, format),
        Command::Compare { config, trackers } => compare(config, trackers),
        Command::BenchOptimizers { config, seeds } => bench(config, *seeds),
        Command::RuntimeSweep {
            config,
            antennas,
            trackers,
            repetitions,
        } => runtime_sweep(config, antennas, trackers, *repetitions),
        Command::Localize { config, out } => localize(config, out.as_ref()),
        Command::EmitDefaults { preset } => Ok(CliConfig::preset(preset)?.to_toml()),
    }
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(text) => {
            let _ = write!(stdout, "{text}");
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
