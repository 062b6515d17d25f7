use super::{run_scenario, RunSummary, ScenarioConfig, Tracker};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub summary: RunSummary,
    /// `(first - this) / this` for mean gain, relative to the first row.
    pub gain_improvement: f64,
    pub rate_improvement: f64,
    pub ee_improvement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub trajectory_digest: String,
    pub rows: Vec<ComparisonRow>,
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b) / b
}

/// Runs every config on the same trajectory realization. The configs may
/// differ only in their tracker.
pub fn run_comparison(cfgs: &[ScenarioConfig]) -> Result<Comparison> {
    let Some(first) = cfgs.first() else {
        return Err(Error::InvalidArgument("comparison needs at least one config".into()));
    };
    for (i, c) in cfgs.iter().enumerate().skip(1) {
        let normalized = ScenarioConfig {
            tracker: first.tracker,
            ..c.clone()
        };
        if normalized != *first {
            return Err(Error::InvalidArgument(format!(
                "config {i} differs from config 0 in more than the tracker"
            )));
        }
    }
    let mut summaries = Vec::with_capacity(cfgs.len());
    for c in cfgs {
        summaries.push(run_scenario(c)?.summary);
    }
    let digest = summaries[0].trajectory_digest.clone();
    if let Some(bad) = summaries.iter().find(|s| s.trajectory_digest != digest) {
        return Err(Error::InvalidArgument(format!(
            "tracker {} saw a different trajectory realization",
            bad.tracker.as_str()
        )));
    }
    let base = summaries[0].clone();
    let rows = summaries
        .into_iter()
        .map(|s| ComparisonRow {
            gain_improvement: relative(base.mean_gain, s.mean_gain),
            rate_improvement: relative(base.mean_rate, s.mean_rate),
            ee_improvement: relative(base.mean_ee, s.mean_ee),
            summary: s,
        })
        .collect();
    Ok(Comparison {
        trajectory_digest: digest,
        rows,
    })
}

/// Copies of `base` with each tracker substituted in turn.
pub fn with_trackers(base: &ScenarioConfig, trackers: &[Tracker]) -> Vec<ScenarioConfig> {
    trackers
        .iter()
        .map(|&tracker| ScenarioConfig { tracker, ..base.clone() })
        .collect()
}
