//! Line-of-sight link budget and the scalar link metrics.

use crate::phased_array::{BeamVector, SteeringVector};
use crate::{Error, Point, Result, C64};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const LIGHT_SPEED: f64 = 2.998e8;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkBudget {
    /// Hz.
    pub carrier_frequency: f64,
    pub fading_re: f64,
    pub fading_im: f64,
    /// Watts.
    pub tx_power: f64,
    /// Watts.
    pub noise_power: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            carrier_frequency: 28e9,
            fading_re: 1.0,
            fading_im: 0.0,
            tx_power: dbm_to_watts(20.0),
            noise_power: dbm_to_watts(-100.0),
        }
    }
}

impl LinkBudget {
    pub fn fading(&self) -> C64 {
        C64::new(self.fading_re, self.fading_im)
    }


    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_frequency > 0.0 && self.carrier_frequency.is_finite()) {
            return Err(Error::config("link.carrier_frequency", "must be positive"));
        }
        if !(self.tx_power > 0.0 && self.tx_power.is_finite()) {
            return Err(Error::config("link.tx_power", "must be positive"));
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return Err(Error::config("link.noise_power", "must be positive"));
        }
        if !(self.fading_re.is_finite() && self.fading_im.is_finite()) {
            return Err(Error::config("link.fading_re", "fading must be finite"));
        }
        Ok(())
    }
}

/// When the phase-shifter bank draws power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseShifterCharge {
    /// Every slot, as in the static power budget.
    Always,
    /// Only in slots where the beam is rebuilt.
    OnReconstruction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerModel {
    /// Watts per phase shifter.
    pub p_ps: f64,
    /// Watts per RF chain.
    pub p_rf: f64,
    pub n_rf: usize,
    /// Baseband watts.
    pub p_bb: f64,
    pub phase_shifter_charge: PhaseShifterCharge,
}

impl Default for PowerModel {
    fn default() -> Self {
        Self {
            p_ps: 0.040,
            p_rf: 0.300,
            n_rf: 1,
            p_bb: 0.200,
            phase_shifter_charge: PhaseShifterCharge::OnReconstruction,
        }
    }
}

impl PowerModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("power.p_ps", self.p_ps), ("power.p_rf", self.p_rf), ("power.p_bb", self.p_bb)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(name, "must be non-negative"));
            }
        }
        if self.n_rf == 0 {
            return Err(Error::config("power.n_rf", "must be at least 1"));
        }
        Ok(())
    }

    /// Total consumed power, watts.
    pub fn total(&self, tx_power: f64, n_x: usize, n_y: usize) -> f64 {
        tx_power + self.n_rf as f64 * self.p_rf + (n_x * n_y) as f64 * self.p_ps + self.p_bb
    }

    /// Power drawn in one slot; phase shifters are left out of idle slots
    /// under [`PhaseShifterCharge::OnReconstruction`].
    pub fn slot_power(&self, tx_power: f64, n_x: usize, n_y: usize, reconstructing: bool) -> f64 {
        match self.phase_shifter_charge {
            PhaseShifterCharge::Always => self.total(tx_power, n_x, n_y),
            PhaseShifterCharge::OnReconstruction if reconstructing => self.total(tx_power, n_x, n_y),
            PhaseShifterCharge::OnReconstruction => tx_power + self.n_rf as f64 * self.p_rf + self.p_bb,
        }
    }
}

/// Free-space amplitude gain `c ρ / (4π f_c d)`.
pub fn path_gain(distance: f64, budget: &LinkBudget) -> Result<C64> {
    if !(distance > 0.0) {
        return Err(Error::Singular(format!("path gain at distance {distance}")));
    }
    Ok(budget.fading() * (LIGHT_SPEED / (4.0 * PI * budget.carrier_frequency * distance)))
}

pub fn distance_2d(p: Point, q: Point) -> f64 {
    p.distance(q)
}

/// Slant range from a ground point to a UAV hovering at altitude `h`.
pub fn distance_3d(mu: Point, uav: Point, h: f64) -> f64 {
    (mu.distance(uav).powi(2) + h * h).sqrt()
}

/// Bearing of `to` as seen from `from`.
pub fn angle_2d(from: Point, to: Point) -> Result<f64> {
    if from == to {
        return Err(Error::Singular("bearing between coincident points".into()));
    }
    Ok((to.y - from.y).atan2(to.x - from.x))
}

/// Azimuth `u` and elevation `v` from a ground user to a UAV at altitude `h`.
/// `v = 0` when the user is directly below.
pub fn angles_3d(mu: Point, uav: Point, h: f64) -> Result<(f64, f64)> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("altitude must be positive, got {h}")));
    }
    let u = (mu.y - uav.y).atan2(mu.x - uav.x);
    let v = (mu.distance(uav) / h).atan();
    Ok((u, v))
}

/// Noiseless received amplitude for a unit-power symbol. Without a beam the
/// array output is summed coherently; with one it is `sqrt(n) * gain * <w, a>`.
pub fn received_amplitude(w: Option<&BeamVector>, a: &SteeringVector, gain: C64, n: usize) -> Result<C64> {
    if a.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.len() });
    }
    match w {
        None => Ok(gain * a.entries().iter().map(|c| c.conj()).sum::<C64>()),
        Some(w) => {
            if w.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: w.len() });
            }
            Ok((n as f64).sqrt() * gain * w.inner(a)?)
        }
    }
}

/// Linear SNR, `p |r|² / σ²`.
pub fn snr(amplitude: C64, budget: &LinkBudget) -> f64 {
    budget.tx_power * amplitude.norm_sqr() / budget.noise_power
}

pub fn snr_db(amplitude: C64, budget: &LinkBudget) -> f64 {
    to_db(snr(amplitude, budget))
}

/// Spectral efficiency, bits/s/Hz.
pub fn rate(snr: f64) -> f64 {
    (1.0 + snr).log2()
}

/// bits/s/Hz/W with the static power budget.
pub fn energy_efficiency(rate: f64, tx_power: f64, pm: &PowerModel, n_x: usize, n_y: usize) -> f64 {
    rate / pm.total(tx_power, n_x, n_y)
}

/// Adds circular complex Gaussian noise of the given variance to every entry.
pub fn add_noise<R: Rng + ?Sized>(signal: &mut [C64], variance: f64, rng: &mut R) {
    let sd = (variance / 2.0).sqrt();
    for s in signal {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *s += C64::new(re * sd, im * sd);
    }
}
