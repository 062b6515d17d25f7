//! Named experiment setups.

use super::{MotionConfig, MotionModel, ScenarioConfig};
use crate::gpr::GprConfig;
use crate::trajectory::MotionState;
use crate::{Error, Point, Result};
use std::f64::consts::FRAC_PI_2;

pub const NAMES: [&str; 5] = ["default", "fast", "slow", "ctra", "trace"];

/// Tracking presets train on 100 samples of history and pick the kernel
/// length scale by marginal likelihood. Short windows with a fixed 0.5 s
/// scale extrapolate back toward the window mean, which underestimates the
/// angular velocity and stretches the reconstruction interval.
fn tracking(base: ScenarioConfig) -> ScenarioConfig {
    let window = 100;
    ScenarioConfig {
        history: base.history.max(window),
        gpr: GprConfig {
            window,
            select_length_scale: true,
            ..base.gpr
        },
        ..base
    }
}

/// A fast user braking past the U-UAV, sampled every 10 ms.
pub fn fast() -> ScenarioConfig {
    tracking(ScenarioConfig {
        duration: 5.0,
        collection_dt: 0.01,
        mu: MotionConfig {
            model: MotionModel::Ctra,
            initial: MotionState {
                position: Point::new(120.0, -25.0),
                heading: FRAC_PI_2,
                speed: 40.0,
                yaw_rate: 0.0,
                acceleration: -4.0,
            },
            ..MotionConfig::default()
        },
        ..ScenarioConfig::default()
    })
}

/// A pedestrian-speed user far from the U-UAV nadir.
pub fn slow() -> ScenarioConfig {
    tracking(ScenarioConfig {
        duration: 10.0,
        collection_dt: 0.1,
        mu: MotionConfig {
            model: MotionModel::Ctrv,
            initial: MotionState {
                position: Point::new(40.0, 20.0),
                heading: 0.3,
                speed: 1.0,
                yaw_rate: 0.02,
                acceleration: 0.0,
            },
            ..MotionConfig::default()
        },
        ..ScenarioConfig::default()
    })
}

/// Turning and accelerating user with the default motion parameters and
/// the tracking GPR settings.
pub fn ctra() -> ScenarioConfig {
    tracking(ScenarioConfig::default())
}

/// Replay of the bundled highway trace.
pub fn trace() -> ScenarioConfig {
    tracking(ScenarioConfig {
        duration: 10.0,
        mu: MotionConfig {
            model: MotionModel::Trace,
            ..MotionConfig::default()
        },
        ..ScenarioConfig::default()
    })
}

pub fn by_name(name: &str) -> Result<ScenarioConfig> {
    match name {
        "default" => Ok(ScenarioConfig::default()),
        "fast" => Ok(fast()),
        "slow" => Ok(slow()),
        "ctra" => Ok(ctra()),
        "trace" => Ok(trace()),
        other => Err(Error::InvalidArgument(format!(
            "unknown preset `{other}` (expected one of {})",
            NAMES.join(", ")
        ))),
    }
}
