//! Motion models for the ground user and the UAVs.
//!
//! CTRV and CTRA steps integrate the motion in closed form rather than with
//! Euler steps, so splitting an interval into smaller steps reproduces the
//! same endpoint up to rounding.

use crate::{Error, Point, Result, C64};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotionState {
    pub position: Point,
    /// Radians, counter-clockwise from +x.
    pub heading: f64,
    /// m/s, never negative.
    pub speed: f64,
    /// rad/s.
    pub yaw_rate: f64,
    /// m/s².
    pub acceleration: f64,
}

impl Default for MotionState {
    fn default() -> Self {
        Self {
            position: Point::new(0.0, 0.0),
            heading: 0.0,
            speed: 10.0,
            yaw_rate: 0.1,
            acceleration: 1.0,
        }
    }
}

impl MotionState {
    pub fn validate(&self, field: &str) -> Result<()> {
        let finite = self.position.is_finite()
            && self.heading.is_finite()
            && self.speed.is_finite()
            && self.yaw_rate.is_finite()
            && self.acceleration.is_finite();
        if !finite {
            return Err(Error::config(field, "motion state must be finite"));
        }
        if self.speed < 0.0 {
            return Err(Error::config(format!("{field}.speed"), "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub time: f64,
    pub position: Point,
}

/// `(e^z - 1) / z` and `(e^z (z - 1) + 1) / z²`, i.e. `∫₀¹ e^{zs} ds` and `∫₀¹ s e^{zs} ds`.
fn exp_moments(z: C64) -> (C64, C64) {
    if z.norm() < 0.5 {
        // k!(k+1) and k!(k+2) series; 18 terms is well past f64 precision here
        let mut e1 = C64::new(0.0, 0.0);
        let mut e2 = C64::new(0.0, 0.0);
        let mut zk_over_fact = C64::new(1.0, 0.0);
        for k in 0..18 {
            let kf = k as f64;
            e1 += zk_over_fact / (kf + 1.0);
            e2 += zk_over_fact / (kf + 2.0);
            zk_over_fact = zk_over_fact * z / (kf + 1.0);
        }
        (e1, e2)
    } else {
        let ez = z.exp();
        ((ez - 1.0) / z, (ez * (z - 1.0) + 1.0) / (z * z))
    }
}

/// Displacement over `dt` with speed `v0 + a s` and heading `h0 + ω s`.
fn arc_displacement(h0: f64, v0: f64, accel: f64, yaw_rate: f64, dt: f64) -> Point {
    let (m1, m2) = exp_moments(C64::new(0.0, yaw_rate * dt));
    let d = C64::cis(h0) * (m1 * (v0 * dt) + m2 * (accel * dt * dt));
    Point::new(d.re, d.im)
}

pub fn ctrv_step(state: &MotionState, dt: f64) -> MotionState {
    let d = arc_displacement(state.heading, state.speed, 0.0, state.yaw_rate, dt);
    MotionState {
        position: Point::new(state.position.x + d.x, state.position.y + d.y),
        heading: state.heading + state.yaw_rate * dt,
        ..*state
    }
}

/// Constant turn rate and acceleration; the user stops rather than reverses.
pub fn ctra_step(state: &MotionState, dt: f64) -> MotionState {
    let end_speed = state.speed + state.acceleration * dt;
    let moving = if end_speed < 0.0 {
        -state.speed / state.acceleration
    } else {
        dt
    };
    let d = arc_displacement(state.heading, state.speed, state.acceleration, state.yaw_rate, moving);
    MotionState {
        position: Point::new(state.position.x + d.x, state.position.y + d.y),
        heading: state.heading + state.yaw_rate * dt,
        speed: end_speed.max(0.0),
        ..*state
    }
}

/// Default heading jitter for random wandering.
pub const DEFAULT_WANDER: f64 = PI / 6.0;

/// Heading jitter drawn uniformly from `[-max_turn, max_turn]`, then a CTRV step.
pub fn random_step<R: Rng + ?Sized>(state: &MotionState, dt: f64, max_turn: f64, rng: &mut R) -> MotionState {
    let r: f64 = rng.random();
    let jittered = MotionState {
        heading: state.heading + (2.0 * r - 1.0) * max_turn,
        ..*state
    };
    ctrv_step(&jittered, dt)
}

/// Area-uniform offset inside a disc of `radius`.
pub fn apply_shake<R: Rng + ?Sized>(position: Point, radius: f64, rng: &mut R) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    Point::new(position.x + r * phi.cos(), position.y + r * phi.sin())
}

/// Parses `t,x,y` text. `origin` labels error messages.
pub fn parse_trace(text: &str, origin: &str) -> Result<Vec<TrajectorySample>> {
    let err = |message: String| Error::Trace {
        path: origin.to_string(),
        message,
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Err(err("empty trace".into()));
    };
    let header: Vec<&str> = header.split(',').map(str::trim).collect();
    if header != ["t", "x", "y"] {
        return Err(err(format!("line 1: expected header `t,x,y`, found `{}`", header.join(","))));
    }
    let mut samples: Vec<TrajectorySample> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(err(format!("line {lineno}: expected 3 fields, found {}", fields.len())));
        }
        let mut vals = [0.0; 3];
        for (slot, f) in vals.iter_mut().zip(&fields) {
            *slot = f
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("line {lineno}: cannot parse `{f}` as a number")))?;
        }
        if let Some(prev) = samples.last() {
            if vals[0] <= prev.time {
                return Err(err(format!(
                    "line {lineno}: time {} does not increase past {}",
                    vals[0], prev.time
                )));
            }
        }
        samples.push(TrajectorySample {
            time: vals[0],
            position: Point::new(vals[1], vals[2]),
        });
    }
    if samples.is_empty() {
        return Err(err("empty trace".into()));
    }
    Ok(samples)
}

pub fn load_trace(path: &Path) -> Result<Vec<TrajectorySample>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_trace(&text, &path.display().to_string())
}

pub fn format_trace(samples: &[TrajectorySample]) -> String {
    let mut out = String::from("t,x,y\n");
    for s in samples {
        out.push_str(&format!("{},{},{}\n", s.time, s.position.x, s.position.y));
    }
    out
}

pub fn write_trace(path: &Path, samples: &[TrajectorySample]) -> Result<()> {
    fs::write(path, format_trace(samples)).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Linear interpolation, holding the end samples outside the trace.
pub fn interpolate(samples: &[TrajectorySample], t: f64) -> Point {
    let first = samples[0];
    let last = samples[samples.len() - 1];
    if t <= first.time {
        return first.position;
    }
    if t >= last.time {
        return last.position;
    }
    let hi = samples.partition_point(|s| s.time <= t);
    let (a, b) = (samples[hi - 1], samples[hi]);
    let f = (t - a.time) / (b.time - a.time);
    Point::new(
        a.position.x + f * (b.position.x - a.position.x),
        a.position.y + f * (b.position.y - a.position.y),
    )
}
