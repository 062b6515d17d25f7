use beamtrack_cli::config::{parse_config, CliConfig};
use beamtrack_cli::export::{self, recompute_summary, CsvTable, ExportBundle, Format, STEP_COLUMNS};
use beamtrack_core::simulator::{RunOutput, RunSummary, Tracker};
use beamtrack_core::tiam::TiamMode;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn beamtrack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beamtrack")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn quick_config(dir: &Path) -> String {
    let p = dir.join("quick.toml");
    fs::write(&p, "preset = \"ctra\"\nduration = 2.0\n").unwrap();
    p.display().to_string()
}

#[test]
fn emitted_defaults_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["default", "fast", "trace"] {
        let o = beamtrack(&["emit-defaults", "--preset", preset]);
        assert!(o.status.success());
        let p = dir.path().join(format!("{preset}.toml"));
        fs::write(&p, &o.stdout).unwrap();
        assert_eq!(parse_config(&p).unwrap(), CliConfig::preset(preset).unwrap());
    }
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = beamtrack(&["run", "--config", &cfg, "--seed", "5", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("seed=5"));
    }
    for f in ["steps.csv", "epochs.csv", "summary.csv", "config.toml"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let c = dir.path().join("c");
    beamtrack(&["run", "--config", &cfg, "--seed", "6", "--out", c.to_str().unwrap()]);
    assert_ne!(fs::read(a.join("steps.csv")).unwrap(), fs::read(c.join("steps.csv")).unwrap());
}

#[test]
fn step_header_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let cfg = quick_config(dir.path());
    assert!(beamtrack(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let text = fs::read_to_string(out.join("steps.csv")).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "t,u_true,v_true,u_pred,v_pred,gain,snr_db,rate,ee,reconstructed,dt_star,rebuild_u,rebuild_v"
    );
    assert_eq!(text.lines().count(), 21);
}

fn as_number(v: &serde_json::Value) -> Option<f64> {
    match v {
        serde_json::Value::Bool(b) => Some(f64::from(u8::from(*b))),
        other => other.as_f64(),
    }
}

fn assert_json_matches_csv(csv: &CsvTable, json: &serde_json::Value) {
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), csv.rows.len());
    for (rec, obj) in csv.records().zip(rows) {
        let obj = obj.as_object().unwrap();
        assert_eq!(obj.len(), rec.len());
        for (k, raw) in rec {
            let v = &obj[k];
            match (raw.parse::<f64>(), as_number(v)) {
                (Ok(x), Some(y)) => assert_eq!(x, y, "{k}"),
                _ if raw.is_empty() => assert!(v.is_null(), "{k}"),
                _ => assert_eq!(v.as_str().unwrap(), raw, "{k}"),
            }
        }
    }
}

#[test]
fn csv_and_json_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    let c = dir.path().join("csv");
    let j = dir.path().join("json");
    beamtrack(&["run", "--config", &cfg, "--out", c.to_str().unwrap()]);
    let o = beamtrack(&["run", "--config", &cfg, "--out", j.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let steps: serde_json::Value = serde_json::from_str(&fs::read_to_string(j.join("steps.json")).unwrap()).unwrap();
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(j.join("summary.json")).unwrap()).unwrap();
    let epochs: serde_json::Value = serde_json::from_str(&fs::read_to_string(j.join("epochs.json")).unwrap()).unwrap();
    assert_json_matches_csv(&CsvTable::read(&c.join("steps.csv")).unwrap(), &steps["steps"]);
    assert_json_matches_csv(&CsvTable::read(&c.join("epochs.csv")).unwrap(), &epochs["epochs"]);
    assert_json_matches_csv(&CsvTable::read(&c.join("summary.csv")).unwrap(), &serde_json::json!([summary]));
    assert_eq!(steps["metadata"], epochs["metadata"]);
    assert_eq!(steps["metadata"]["config_digest"], summary["config_digest"]);
}

#[test]
fn reimported_steps_reproduce_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["ctra", "slow"] {
        let out = dir.path().join(preset);
        let o = beamtrack(&["run", "--preset", preset, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        let again = recompute_summary(&out).unwrap();
        let table = CsvTable::read(&out.join("summary.csv")).unwrap();
        let rec = table.records().next().unwrap();
        let num = |k: &str| rec[k].parse::<f64>().unwrap();
        let close = |k: &str, v: f64| assert!((num(k) - v).abs() <= 1e-6 * v.abs().max(1.0), "{preset} {k}: {} vs {v}", num(k));
        close("mean_gain", again.mean_gain);
        close("min_gain", again.min_gain);
        close("mean_rate", again.mean_rate);
        close("mean_ee", again.mean_ee);
        close("coverage", again.coverage);
        close("localization_error", again.localization_error);
        close("angle_rms_error", again.angle_rms_error);
        for (k, v) in [
            ("steps", again.steps),
            ("reconstructions", again.reconstructions),
            ("rebuilds_u", again.rebuilds_u),
            ("rebuilds_v", again.rebuilds_v),
        ] {
            assert_eq!(num(k), v as f64, "{preset} {k}");
        }
    }
}

#[test]
fn empty_log_exports_headers_only() {
    let cfg = CliConfig::preset("default").unwrap();
    let summary = RunSummary::from_log(Tracker::BabAr, TiamMode::Kinematic, &[], &[], &cfg.scenario.array, String::new());
    let run = RunOutput { summary, steps: vec![], epochs: vec![] };
    let dir = tempfile::tempdir().unwrap();
    export::export(&ExportBundle::new(&cfg, &run), dir.path(), Format::Csv).unwrap();
    assert_eq!(fs::read_to_string(dir.path().join("steps.csv")).unwrap(), STEP_COLUMNS.join(",") + "\n");
}

#[test]
fn validation_errors_exit_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    let out = dir.path().join("out");
    for text in ["duration = -2.0", "[array]\nn_x = 0", "[tiam]\nmod = \"kinematic\"", "seed = "] {
        fs::write(&bad, text).unwrap();
        let o = beamtrack(&["run", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{text}");
        assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
        assert!(o.stdout.is_empty());
        assert!(!out.exists());
    }
    let o = beamtrack(&["run", "--config", dir.path().join("missing.toml").to_str().unwrap(), "--out", "x"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(beamtrack(&["compare", "--trackers", "bab-ar,warp"]).status.code(), Some(1));
    assert_eq!(beamtrack(&["runtime-sweep", "--antennas", "8x4"]).status.code(), Some(1));
    assert_eq!(beamtrack(&["bench-optimizers", "--seeds", "0"]).status.code(), Some(1));
    assert_eq!(beamtrack(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn negative_duration_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "duration = -1.0\n").unwrap();
    let o = beamtrack(&["run", "--config", bad.to_str().unwrap(), "--out", "unused"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("`duration`"));
}

#[test]
fn runtime_errors_exit_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let cfg = quick_config(dir.path());
    let o = beamtrack(&["run", "--config", &cfg, "--out", blocker.join("run").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(fs::read_to_string(&blocker).unwrap(), "not a directory");
}

#[test]
fn compare_lists_trackers_on_one_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    let o = beamtrack(&["compare", "--config", &cfg, "--trackers", "bab-ar,fixed,codebook"]);
    assert!(o.status.success());
    let table = CsvTable::parse(&stdout(&o), "compare").unwrap();
    let recs: Vec<_> = table.records().collect();
    assert_eq!(recs.iter().map(|r| r["tracker"]).collect::<Vec<_>>(), ["bab-ar", "fixed", "codebook"]);
    assert!(recs.iter().all(|r| r["trajectory_digest"] == recs[0]["trajectory_digest"]));
    assert_eq!(recs[0]["gain_improvement"], "0");
}

#[test]
fn bench_prints_three_optimizers() {
    let o = beamtrack(&["bench-optimizers", "--seeds", "2"]);
    assert!(o.status.success());
    let table = CsvTable::parse(&stdout(&o), "bench").unwrap();
    let names: Vec<_> = table.records().map(|r| r["optimizer"].to_string()).collect();
    assert_eq!(names, ["GDCSA", "CSA", "PSO"]);
}

#[test]
fn runtime_sweep_records_each_repetition() {
    let o = beamtrack(&["runtime-sweep", "--antennas", "16,4x4", "--trackers", "codebook", "--repetitions", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = CsvTable::parse(&stdout(&o), "sweep").unwrap();
    let recs: Vec<_> = table.records().collect();
    assert_eq!(recs.len(), 2);
    assert!(recs.iter().all(|r| r["samples"] == "3" && r["side"] == "4" && r["antennas"] == "16"));
}

#[test]
fn localize_reports_each_motion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("loc.toml");
    fs::write(&cfg, "[localization]\nepochs = 4\nmotions = [\"ctrv\", \"random\"]\n").unwrap();
    let out = dir.path().join("loc");
    let o = beamtrack(&["localize", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = CsvTable::parse(&stdout(&o), "localize").unwrap();
    let motions: Vec<_> = table.records().map(|r| r["motion"].to_string()).collect();
    assert_eq!(motions, ["ctrv", "random", "all"]);
    assert_eq!(CsvTable::read(&out.join("localization.csv")).unwrap().rows.len(), 8);
}
