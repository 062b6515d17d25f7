use super::config::Tracker;
use crate::geometry::wrap_angle;
use crate::phased_array::ArrayConfig;
use crate::tiam::{within_half_beam, TiamMode};
use crate::Point;
use serde::Serialize;

/// One simulation step as logged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: f64,
    pub u_true: f64,
    pub v_true: f64,
    /// Direction the active beam points at.
    pub u_pred: f64,
    pub v_pred: f64,
    /// `|√N <w, a>|` with a unit channel.
    pub gain: f64,
    pub snr_db: f64,
    pub rate: f64,
    pub ee: f64,
    pub reconstructed: bool,
    /// Reconstruction interval in effect after this step, seconds.
    pub dt_star: f64,
    pub rebuild_u: bool,
    pub rebuild_v: bool,
}

/// One U-UAV localization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochRecord {
    pub t: f64,
    pub truth: Point,
    pub estimate: Point,
    pub error: f64,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub tracker: Tracker,
    pub tiam_mode: TiamMode,
    pub steps: usize,
    pub mean_gain: f64,
    pub min_gain: f64,
    pub mean_rate: f64,
    pub mean_ee: f64,
    pub reconstructions: usize,
    pub rebuilds_u: usize,
    pub rebuilds_v: usize,
    /// Fraction of steps with the user inside half the beamwidth on both axes.
    pub coverage: f64,
    /// Mean localization error over epochs, meters.
    pub localization_error: f64,
    /// RMS of the combined azimuth and elevation pointing error, radians.
    pub angle_rms_error: f64,
    /// Only filled by timed runs, so untimed output stays reproducible.
    pub wall_clock_per_cycle: Option<f64>,
    pub trajectory_digest: String,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

impl RunSummary {
    /// Aggregates recomputed from the logs alone.
    pub fn from_log(
        tracker: Tracker,
        tiam_mode: TiamMode,
        steps: &[StepRecord],
        epochs: &[EpochRecord],
        array: &ArrayConfig,
        trajectory_digest: String,
    ) -> Self {
        let covered = steps
            .iter()
            .filter(|s| within_half_beam(s.u_true, s.v_true, s.u_pred, s.v_pred, array))
            .count();
        let sq = mean(steps.iter().map(|s| {
            let du = wrap_angle(s.u_pred - s.u_true);
            let dv = s.v_pred - s.v_true;
            du * du + dv * dv
        }));
        Self {
            tracker,
            tiam_mode,
            steps: steps.len(),
            mean_gain: mean(steps.iter().map(|s| s.gain)),
            min_gain: steps.iter().map(|s| s.gain).fold(f64::INFINITY, f64::min),
            mean_rate: mean(steps.iter().map(|s| s.rate)),
            mean_ee: mean(steps.iter().map(|s| s.ee)),
            reconstructions: steps.iter().filter(|s| s.reconstructed).count(),
            rebuilds_u: steps.iter().filter(|s| s.rebuild_u).count(),
            rebuilds_v: steps.iter().filter(|s| s.rebuild_v).count(),
            coverage: if steps.is_empty() { 0.0 } else { covered as f64 / steps.len() as f64 },
            localization_error: mean(epochs.iter().map(|e| e.error)),
            angle_rms_error: sq.sqrt(),
            wall_clock_per_cycle: None,
            trajectory_digest,
        }
    }

    /// Maximum beam gain of the configured array.
    pub fn aligned_gain(array: &ArrayConfig) -> f64 {
        array.upa_len() as f64
    }
}
