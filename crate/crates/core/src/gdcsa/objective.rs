use crate::channel::{add_noise, angle_2d, path_gain, LinkBudget};
use crate::phased_array::{ula_steering, ArrayConfig};
use crate::{Error, Point, Result, C64};
use rand::Rng;

/// Signals received by the anchor UAVs from one position-unknown UAV.
///
/// Only the received signals and the anchors' positions enter the
/// objective; no motion history is involved.
#[derive(Debug, Clone)]
pub struct LocalizationProblem {
    pub a_uav_positions: Vec<Point>,
    pub observed_signals: Vec<Vec<C64>>,
    pub link: LinkBudget,
    pub array: ArrayConfig,
}

/// Array output at an anchor for a source at `source`, before noise.
pub fn modelled_signal(source: Point, anchor: Point, link: &LinkBudget, array: &ArrayConfig) -> Result<Vec<C64>> {
    let theta = angle_2d(anchor, source)?;
    let gain = path_gain(anchor.distance(source), link)?;
    let a = ula_steering(theta, array.n_ula, array)?;
    Ok(a.entries().iter().map(|c| gain * c).collect())
}

impl LocalizationProblem {
    /// Observations of a source at `truth`; `noise` adds circular complex
    /// Gaussian noise of variance `noise_power` to every entry.
    pub fn observe<R: Rng + ?Sized>(
        truth: Point,
        a_uav_positions: &[Point],
        link: &LinkBudget,
        array: &ArrayConfig,
        noise: Option<&mut R>,
    ) -> Result<Self> {
        let mut observed = a_uav_positions
            .iter()
            .map(|&k| modelled_signal(truth, k, link, array))
            .collect::<Result<Vec<_>>>()?;
        if let Some(rng) = noise {
            let var = link.noise_power;
            for s in &mut observed {
                add_noise(s, var, rng);
            }
        }
        Ok(Self {
            a_uav_positions: a_uav_positions.to_vec(),
            observed_signals: observed,
            link: *link,
            array: *array,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.a_uav_positions.is_empty() {
            return Err(Error::InvalidArgument("no anchor UAVs".into()));
        }
        if self.a_uav_positions.len() != self.observed_signals.len() {
            return Err(Error::DimensionMismatch {
                expected: self.a_uav_positions.len(),
                got: self.observed_signals.len(),
            });
        }
        for s in &self.observed_signals {
            if s.len() != self.array.n_ula {
                return Err(Error::DimensionMismatch {
                    expected: self.array.n_ula,
                    got: s.len(),
                });
            }
        }
        Ok(())
    }
}

/// Half the summed residual norms between observed and modelled signals.
pub fn localization_objective(candidate: Point, problem: &LocalizationProblem) -> Result<f64> {
    if !candidate.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite candidate {candidate:?}")));
    }
    let mut total = 0.0;
    for (&anchor, observed) in problem.a_uav_positions.iter().zip(&problem.observed_signals) {
        if anchor == candidate {
            return Err(Error::Singular(format!("candidate coincides with anchor at {anchor:?}")));
        }
        let model = modelled_signal(candidate, anchor, &problem.link, &problem.array)?;
        let residual: f64 = observed.iter().zip(&model).map(|(o, m)| (o - m).norm_sqr()).sum();
        total += residual.sqrt();
    }
    Ok(0.5 * total)
}
