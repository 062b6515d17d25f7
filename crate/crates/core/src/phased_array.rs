//! Array responses for the linear arrays on the anchor UAVs and the planar
//! array on the serving UAV.
//!
//! Inner products use `<w, a> = sum_m w_m * conj(a_m)`, so a beam vector
//! built for the same direction as a steering vector attains `|<w, a>| = sqrt(N)`.
//! Planar-array entries are flattened row-major over `(m_x, m_y)`.

use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Geometry and phase conventions shared by all array computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArrayConfig {
    /// Elements of the linear array carried by anchor UAVs.
    pub n_ula: usize,
    pub n_x: usize,
    pub n_y: usize,
    /// Per-element phase scale (radians). `PI` is half-wavelength spacing;
    /// `1.0` gives the bare `exp(-j cos θ)` progression.
    pub phase_constant: f64,
    /// Beamwidth coefficient in `Δθ = coefficient * 2 / N`.
    pub hpbw_coefficient: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            n_ula: 16,
            n_x: 16,
            n_y: 16,
            phase_constant: PI,
            hpbw_coefficient: 0.886,
        }
    }
}

impl ArrayConfig {
    pub fn upa_len(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ula == 0 {
            return Err(Error::config("array.n_ula", "must be at least 1"));
        }
        if self.n_x == 0 {
            return Err(Error::config("array.n_x", "must be at least 1"));
        }
        if self.n_y == 0 {
            return Err(Error::config("array.n_y", "must be at least 1"));
        }
        if !self.phase_constant.is_finite() {
            return Err(Error::config("array.phase_constant", "must be finite"));
        }
        if !(self.hpbw_coefficient > 0.0 && self.hpbw_coefficient.is_finite()) {
            return Err(Error::config("array.hpbw_coefficient", "must be positive"));
        }
        Ok(())
    }
}

/// Unit-modulus array response toward a direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector(Vec<C64>);

/// Transmit weights with entries of modulus `1/sqrt(N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamVector(Vec<C64>);

macro_rules! vector_common {
    ($t:ty) => {
        impl $t {
            pub fn entries(&self) -> &[C64] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }
        }
    };
}
vector_common!(SteeringVector);
vector_common!(BeamVector);

impl SteeringVector {
    /// Wraps raw entries; callers are responsible for unit modulus.
    pub fn from_entries(entries: Vec<C64>) -> Self {
        Self(entries)
    }
}

impl BeamVector {
    /// Builds a beam from per-element phases, scaled by `1/sqrt(N)`.
    pub fn from_phases(phases: &[f64]) -> Self {
        let scale = 1.0 / (phases.len() as f64).sqrt();
        Self(phases.iter().map(|&p| C64::from_polar(scale, p)).collect())
    }

    pub fn phases(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.arg()).collect()
    }

    /// `sum_m w_m * conj(a_m)`.
    pub fn inner(&self, a: &SteeringVector) -> Result<C64> {
        if self.len() != a.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: a.len(),
            });
        }
        Ok(self.0.iter().zip(&a.0).map(|(w, s)| w * s.conj()).sum())
    }
}

/// Half-power beamwidths of the planar-array beam, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hpbw {
    pub theta_u: f64,
    pub theta_v: f64,
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("array must have at least one element".into()))
    } else {
        Ok(())
    }
}

fn ula_phases(theta: f64, n: usize, cfg: &ArrayConfig) -> impl Iterator<Item = f64> + '_ {
    let step = -cfg.phase_constant * theta.cos();
    (0..n).map(move |m| step * m as f64)
}

fn upa_phases(u: f64, v: f64, cfg: &ArrayConfig) -> impl Iterator<Item = f64> + '_ {
    let (sin_v, cos_v) = v.sin_cos();
    let k = cfg.phase_constant * u.sin();
    (0..cfg.n_x).flat_map(move |mx| (0..cfg.n_y).map(move |my| k * (mx as f64 * cos_v + my as f64 * sin_v)))
}

pub fn ula_steering(theta: f64, n: usize, cfg: &ArrayConfig) -> Result<SteeringVector> {
    check_count(n)?;
    Ok(SteeringVector(ula_phases(theta, n, cfg).map(C64::cis).collect()))
}

pub fn upa_steering(u: f64, v: f64, cfg: &ArrayConfig) -> Result<SteeringVector> {
    check_count(cfg.upa_len())?;
    Ok(SteeringVector(upa_phases(u, v, cfg).map(C64::cis).collect()))
}

pub fn ula_beam_vector(theta_hat: f64, n: usize, cfg: &ArrayConfig) -> Result<BeamVector> {
    check_count(n)?;
    let scale = 1.0 / (n as f64).sqrt();
    Ok(BeamVector(
        ula_phases(theta_hat, n, cfg).map(|p| C64::from_polar(scale, p)).collect(),
    ))
}

pub fn upa_beam_vector(u_hat: f64, v_hat: f64, cfg: &ArrayConfig) -> Result<BeamVector> {
    let n = cfg.upa_len();
    check_count(n)?;
    let scale = 1.0 / (n as f64).sqrt();
    Ok(BeamVector(
        upa_phases(u_hat, v_hat, cfg).map(|p| C64::from_polar(scale, p)).collect(),
    ))
}

/// Linear-array beamwidths `(Δθ_u, Δθ_v)` for the `n_x` and `n_y` edges.
pub fn linear_hpbw(cfg: &ArrayConfig) -> (f64, f64) {
    let c = cfg.hpbw_coefficient * 2.0;
    (c / cfg.n_x as f64, c / cfg.n_y as f64)
}

/// Planar-array beamwidths at pointing direction `(u, v)`.
///
/// Azimuth is circular here, so `|cos u|` is used; the response depends on
/// `sin u` only, which makes `u` and `π - u` equivalent.
pub fn hpbw(u: f64, v: f64, cfg: &ArrayConfig) -> Result<Hpbw> {
    let cos_u = u.cos().abs();
    if cos_u < 1e-12 {
        return Err(Error::Singular(format!("azimuth beamwidth diverges at u = {u}")));
    }
    let (du, dv) = linear_hpbw(cfg);
    let (sin_v, cos_v) = v.sin_cos();
    let (iu2, iv2) = (du.powi(-2), dv.powi(-2));
    let theta_u = 1.0 / (cos_u * (iu2 * cos_v * cos_v + iv2 * sin_v * sin_v).sqrt());
    let theta_v = 1.0 / (iu2 * sin_v * sin_v + iv2 * cos_v * cos_v).sqrt();
    Ok(Hpbw { theta_u, theta_v })
}

/// `|sqrt(n) * <w, a> * channel|`.
pub fn beam_gain(w: &BeamVector, a: &SteeringVector, channel: C64, n: usize) -> Result<f64> {
    if w.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: w.len() });
    }
    let ip = w.inner(a)?;
    Ok(((n as f64).sqrt() * ip * channel).norm())
}
