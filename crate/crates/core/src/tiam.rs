//! Adaptive beam-reconstruction interval.
//!
//! The next reconstruction is scheduled for when the predicted angular motion
//! would carry the user out of half the current beamwidth.

use crate::geometry::wrap_angle;
use crate::phased_array::{hpbw, upa_beam_vector, ArrayConfig, BeamVector, Hpbw};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiamMode {
    /// Positive root of `|ω| t + ½ |α| t² = θ / 2`.
    Kinematic,
    /// `sqrt(2 (θ/2 - |ω|) / |α|)`, which mixes a rate into an angle budget.
    #[serde(rename = "paper-literal")]
    Literal,
}

impl TiamMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TiamMode::Kinematic => "kinematic",
            TiamMode::Literal => "paper-literal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TiamConfig {
    pub dt_min: f64,
    pub dt_max: f64,
    pub mode: TiamMode,
    pub initial_dt: f64,
}

impl Default for TiamConfig {
    fn default() -> Self {
        Self {
            dt_min: 0.001,
            dt_max: 1.0,
            mode: TiamMode::Kinematic,
            initial_dt: 0.1,
        }
    }
}

impl TiamConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_min > 0.0 && self.dt_min.is_finite()) {
            return Err(Error::config("tiam.dt_min", "must be positive"));
        }
        if !(self.dt_max.is_finite() && self.dt_max >= self.dt_min) {
            return Err(Error::config("tiam.dt_max", "must be finite and at least dt_min"));
        }
        if !(self.initial_dt >= self.dt_min && self.initial_dt <= self.dt_max) {
            return Err(Error::config("tiam.initial_dt", "must lie in [dt_min, dt_max]"));
        }
        Ok(())
    }

    pub fn clamp(&self, dt: f64) -> f64 {
        dt.clamp(self.dt_min, self.dt_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AngularKinematics {
    pub omega_u: f64,
    pub omega_v: f64,
    pub alpha_u: f64,
    pub alpha_v: f64,
    pub last_interval: f64,
}

/// Wrapped difference quotient.
pub fn angular_velocity(angle_now: f64, angle_next: f64, dt: f64) -> f64 {
    wrap_angle(angle_next - angle_now) / dt
}

pub fn angular_acceleration(omega_prev: f64, omega_now: f64, dt: f64) -> f64 {
    (omega_now - omega_prev) / dt
}

/// Unclamped interval for one axis. Infinite when the axis is at rest.
pub fn axis_interval(theta: f64, omega: f64, alpha: f64, mode: TiamMode, dt_max: f64) -> f64 {
    let (w, a) = (omega.abs(), alpha.abs());
    match mode {
        TiamMode::Kinematic => {
            // rationalized root, stable as α → 0
            let denom = w + (w * w + a * theta).sqrt();
            if denom > 0.0 {
                theta / denom
            } else {
                f64::INFINITY
            }
        }
        TiamMode::Literal => {
            let radicand = 2.0 * (theta / 2.0 - w);
            if a == 0.0 || radicand <= 0.0 {
                dt_max
            } else {
                (radicand / a).sqrt()
            }
        }
    }
}

/// Smaller of the two axis intervals, clamped to the configured range.
pub fn reconstruction_interval(kin: &AngularKinematics, beam: &Hpbw, cfg: &TiamConfig) -> f64 {
    let tu = axis_interval(beam.theta_u, kin.omega_u, kin.alpha_u, cfg.mode, cfg.dt_max);
    let tv = axis_interval(beam.theta_v, kin.omega_v, kin.alpha_v, cfg.mode, cfg.dt_max);
    cfg.clamp(tu.min(tv))
}

/// Whether `(u, v)` lies within half the beamwidth of a beam centred at
/// `(u_beam, v_beam)` on both axes.
pub fn within_half_beam(u: f64, v: f64, u_beam: f64, v_beam: f64, array: &ArrayConfig) -> bool {
    match hpbw(u_beam, v_beam, array) {
        Ok(h) => wrap_angle(u - u_beam).abs() <= h.theta_u / 2.0 && (v - v_beam).abs() <= h.theta_v / 2.0,
        Err(_) => false,
    }
}

/// Memory carried between reconstructions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiamState {
    pub prev_time: f64,
    pub prev_u: f64,
    pub prev_v: f64,
    pub last_interval: f64,
}

impl TiamState {
    /// Starts from the latest measured angles.
    pub fn new(time: f64, u: f64, v: f64, cfg: &TiamConfig) -> Self {
        Self {
            prev_time: time,
            prev_u: u,
            prev_v: v,
            last_interval: cfg.initial_dt,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TiamStep {
    pub u: f64,
    pub v: f64,
    pub beam: BeamVector,
    pub kinematics: AngularKinematics,
    /// `None` when the beamwidth is undefined at the predicted direction.
    pub hpbw: Option<Hpbw>,
    pub dt_star: f64,
}

/// One reconstruction: predict the current direction, estimate angular
/// velocity and acceleration from the predictor, pick the next interval, and
/// synthesize the beam.
pub fn tiam_step<P>(state: &mut TiamState, predict: P, array: &ArrayConfig, cfg: &TiamConfig, t: f64) -> Result<TiamStep>
where
    P: Fn(f64) -> (f64, f64),
{
    let dt = state.last_interval;
    let (u, v) = predict(t);
    let (u_next, v_next) = predict(t + dt);
    let since_prev = t - state.prev_time;
    let (omega_u_prev, omega_v_prev) = if since_prev > 0.0 {
        (
            angular_velocity(state.prev_u, u, since_prev),
            angular_velocity(state.prev_v, v, since_prev),
        )
    } else {
        (0.0, 0.0)
    };
    let omega_u = angular_velocity(u, u_next, dt);
    let omega_v = angular_velocity(v, v_next, dt);
    let kinematics = AngularKinematics {
        omega_u,
        omega_v,
        alpha_u: if since_prev > 0.0 { angular_acceleration(omega_u_prev, omega_u, dt) } else { 0.0 },
        alpha_v: if since_prev > 0.0 { angular_acceleration(omega_v_prev, omega_v, dt) } else { 0.0 },
        last_interval: dt,
    };
    let beam_width = hpbw(u, v, array).ok();
    let dt_star = match &beam_width {
        Some(h) => reconstruction_interval(&kinematics, h, cfg),
        None => cfg.dt_min,
    };
    let beam = upa_beam_vector(u, v, array)?;
    *state = TiamState {
        prev_time: t,
        prev_u: u,
        prev_v: v,
        last_interval: dt_star,
    };
    Ok(TiamStep {
        u,
        v,
        beam,
        kinematics,
        hpbw: beam_width,
        dt_star,
    })
}
