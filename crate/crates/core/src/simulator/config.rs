use crate::channel::{LinkBudget, PowerModel};
use crate::gdcsa::{GdcsaParams, PsoParams};
use crate::geometry::Area;
use crate::gpr::GprConfig;
use crate::phased_array::ArrayConfig;
use crate::tiam::TiamConfig;
use crate::trajectory::{MotionState, DEFAULT_WANDER};
use crate::{Error, Point, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MotionModel {
    Static,
    Ctrv,
    Ctra,
    Random,
    /// Replay of a recorded `t,x,y` trace.
    Trace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotionConfig {
    pub model: MotionModel,
    pub initial: MotionState,
    /// Heading jitter bound for random wandering, radians.
    pub wander: f64,
    /// Trace file for `model = "trace"`; the bundled highway trace when absent.
    pub trace: Option<String>,
}

impl Default for MotionConfig {
    fn default() -> Self {
        Self {
            model: MotionModel::Ctra,
            initial: MotionState {
                position: Point::new(60.0, 20.0),
                heading: 0.0,
                ..MotionState::default()
            },
            wander: DEFAULT_WANDER,
            trace: None,
        }
    }
}

impl MotionConfig {
    pub fn validate(&self, field: &str) -> Result<()> {
        self.initial.validate(&format!("{field}.initial"))?;
        if !(self.wander >= 0.0 && self.wander.is_finite()) {
            return Err(Error::config(format!("{field}.wander"), "must be non-negative"));
        }
        if self.trace.is_some() && self.model != MotionModel::Trace {
            return Err(Error::config(format!("{field}.trace"), "only valid with model = \"trace\""));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShakeMode {
    /// A fresh offset every simulation step.
    PerStep,
    /// One offset per localization epoch.
    PerEpoch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UavConfig {
    pub motion: MotionConfig,
    /// Radius of the positional jitter, meters.
    pub shake_radius: f64,
    pub shake_mode: ShakeMode,
}

impl Default for UavConfig {
    fn default() -> Self {
        Self {
            motion: MotionConfig {
                model: MotionModel::Static,
                initial: MotionState {
                    position: Point::new(100.0, 80.0),
                    heading: 0.0,
                    speed: 0.0,
                    yaw_rate: 0.0,
                    acceleration: 0.0,
                },
                wander: DEFAULT_WANDER,
                trace: None,
            },
            shake_radius: 0.0,
            shake_mode: ShakeMode::PerStep,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tracker {
    BabAr,
    Fixed,
    Codebook,
    Beamopt,
}

impl Tracker {
    pub const ALL: [Tracker; 4] = [Tracker::BabAr, Tracker::Fixed, Tracker::Codebook, Tracker::Beamopt];

    pub fn as_str(&self) -> &'static str {
        match self {
            Tracker::BabAr => "bab-ar",
            Tracker::Fixed => "fixed",
            Tracker::Codebook => "codebook",
            Tracker::Beamopt => "beamopt",
        }
    }

    pub fn parse(s: &str) -> Option<Tracker> {
        Tracker::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodebookConfig {
    pub grid_u: usize,
    pub grid_v: usize,
}

impl Default for CodebookConfig {
    fn default() -> Self {
        Self { grid_u: 24, grid_v: 12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamoptConfig {
    /// Objective evaluations per antenna element at each reconstruction.
    pub budget_per_element: usize,
}

impl Default for BeamoptConfig {
    fn default() -> Self {
        Self { budget_per_element: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    /// Tracking time, seconds.
    pub duration: f64,
    /// Trajectory sampling interval, which is also the simulation step.
    pub collection_dt: f64,
    /// Samples collected before tracking starts.
    pub history: usize,
    pub area: Area,
    /// UAV altitude above the ground plane, meters.
    pub altitude: f64,
    pub a_uav_positions: Vec<Point>,
    pub u_uav: UavConfig,
    pub mu: MotionConfig,
    pub array: ArrayConfig,
    pub link: LinkBudget,
    pub power: PowerModel,
    pub observation_noise: bool,
    pub tracker: Tracker,
    /// Reconstruction interval of the fixed, codebook and beamopt trackers.
    pub fixed_dt: f64,
    /// Steps between the A-UAV measurement and its use by the tracker.
    pub relay_delay_steps: usize,
    pub codebook: CodebookConfig,
    pub beamopt: BeamoptConfig,
    pub tiam: TiamConfig,
    pub gpr: GprConfig,
    pub gdcsa: GdcsaParams,
    pub pso: PsoParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            duration: 10.0,
            collection_dt: 0.1,
            history: 30,
            area: Area::default(),
            altitude: 100.0,
            a_uav_positions: vec![Point::new(0.0, 0.0), Point::new(50.0, 50.0)],
            u_uav: UavConfig::default(),
            mu: MotionConfig::default(),
            array: ArrayConfig::default(),
            link: LinkBudget::default(),
            power: PowerModel::default(),
            observation_noise: true,
            tracker: Tracker::BabAr,
            fixed_dt: 0.1,
            relay_delay_steps: 0,
            codebook: CodebookConfig::default(),
            beamopt: BeamoptConfig::default(),
            tiam: TiamConfig::default(),
            gpr: GprConfig::default(),
            gdcsa: GdcsaParams::default(),
            pso: PsoParams::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::config("duration", "must be positive"));
        }
        if !(self.collection_dt > 0.0 && self.collection_dt.is_finite()) {
            return Err(Error::config("collection_dt", "must be positive"));
        }
        if self.history < 2 {
            return Err(Error::config("history", "must be at least 2"));
        }
        if !self.area.is_valid() {
            return Err(Error::config("area", "must be a non-degenerate rectangle"));
        }
        if !(self.altitude > 0.0 && self.altitude.is_finite()) {
            return Err(Error::config("altitude", "must be positive"));
        }
        if self.a_uav_positions.len() < 2 {
            return Err(Error::config("a_uav_positions", "at least two A-UAVs are required"));
        }
        if let Some(i) = self.a_uav_positions.iter().position(|p| !p.is_finite()) {
            return Err(Error::config(format!("a_uav_positions[{i}]"), "must be finite"));
        }
        self.u_uav.motion.validate("u_uav.motion")?;
        if self.u_uav.motion.model == MotionModel::Trace {
            return Err(Error::config("u_uav.motion.model", "trace replay is only supported for the MU"));
        }
        if !(self.u_uav.shake_radius >= 0.0 && self.u_uav.shake_radius.is_finite()) {
            return Err(Error::config("u_uav.shake_radius", "must be non-negative"));
        }
        self.mu.validate("mu")?;
        self.array.validate()?;
        self.link.validate()?;
        self.power.validate()?;
        if !(self.fixed_dt > 0.0 && self.fixed_dt.is_finite()) {
            return Err(Error::config("fixed_dt", "must be positive"));
        }
        if self.codebook.grid_u == 0 {
            return Err(Error::config("codebook.grid_u", "must be at least 1"));
        }
        if self.codebook.grid_v == 0 {
            return Err(Error::config("codebook.grid_v", "must be at least 1"));
        }
        if self.beamopt.budget_per_element == 0 {
            return Err(Error::config("beamopt.budget_per_element", "must be at least 1"));
        }
        self.tiam.validate()?;
        self.gpr.validate()?;
        self.gdcsa.validate()?;
        if self.gdcsa.search_box != self.area {
            return Err(Error::config("gdcsa.search_box", "must equal the scenario area"));
        }
        if self.relay_delay_steps >= self.history {
            return Err(Error::config("relay_delay_steps", "must be smaller than history"));
        }
        Ok(())
    }

    /// Number of tracking steps.
    pub fn steps(&self) -> usize {
        (self.duration / self.collection_dt).round().max(1.0) as usize
    }
}
