//! Comparison trackers: a uniform-grid codebook, a budgeted beam-vector
//! search, and fixed-interval reconstruction.

use crate::phased_array::{beam_gain, upa_beam_vector, ArrayConfig, BeamVector, SteeringVector};
use crate::{Error, Result, C64};
use rand::seq::SliceRandom;
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, PartialEq)]
pub struct CodebookEntry {
    pub u: f64,
    pub v: f64,
    pub beam: BeamVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub beams: Vec<CodebookEntry>,
    pub grid_u: usize,
    pub grid_v: usize,
}

/// Cell-centred design angles over u in (-π/2, π/2) and v in [0, π/2).
pub fn codebook_angles(grid_u: usize, grid_v: usize) -> Vec<(f64, f64)> {
    let du = PI / grid_u as f64;
    let dv = FRAC_PI_2 / grid_v as f64;
    (0..grid_u)
        .flat_map(|i| (0..grid_v).map(move |j| ((i as f64 + 0.5) * du - FRAC_PI_2, (j as f64 + 0.5) * dv)))
        .collect()
}

pub fn build_codebook(grid_u: usize, grid_v: usize, cfg: &ArrayConfig) -> Result<Codebook> {
    if grid_u == 0 || grid_v == 0 {
        return Err(Error::InvalidArgument(format!(
            "codebook grid must be at least 1x1, got {grid_u}x{grid_v}"
        )));
    }
    let beams = codebook_angles(grid_u, grid_v)
        .into_iter()
        .map(|(u, v)| Ok(CodebookEntry { u, v, beam: upa_beam_vector(u, v, cfg)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(Codebook { beams, grid_u, grid_v })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub gain: f64,
}

/// Exhaustive scan against the steering vector `a`; ties keep the lowest index.
pub fn select_beam(cb: &Codebook, a: &SteeringVector, channel: C64) -> Result<Selection> {
    let n = a.len();
    let mut best = Selection {
        index: 0,
        gain: f64::NEG_INFINITY,
    };
    for (i, entry) in cb.beams.iter().enumerate() {
        let g = beam_gain(&entry.beam, a, channel, n)?;
        if g > best.gain {
            best = Selection { index: i, gain: g };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamSearchResult {
    pub beam: BeamVector,
    /// `|<w, a>|` of the returned beam.
    pub response: f64,
    pub evaluations: usize,
}

/// Phase search from random initial phases.
pub fn optimize_beam_vector<R: Rng + ?Sized>(a: &SteeringVector, budget: usize, rng: &mut R) -> Result<BeamSearchResult> {
    let phases: Vec<f64> = (0..a.len()).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
    optimize_beam_vector_from(&phases, a, budget, rng)
}

/// Coordinate hill climbing over element phases, maximizing `|<w, a>|`.
///
/// Each pass visits the elements in a random order and tries `±step` on
/// each; the step halves after a pass without improvement. Every candidate
/// costs one full evaluation, and the search stops once `budget` is spent.
pub fn optimize_beam_vector_from<R: Rng + ?Sized>(
    initial_phases: &[f64],
    a: &SteeringVector,
    budget: usize,
    rng: &mut R,
) -> Result<BeamSearchResult> {
    if budget == 0 {
        return Err(Error::InvalidArgument("beam search budget must be at least 1".into()));
    }
    if initial_phases.len() != a.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: initial_phases.len(),
        });
    }
    let mut evaluations = 0usize;
    let mut eval = |phases: &[f64]| -> Result<f64> {
        evaluations += 1;
        Ok(BeamVector::from_phases(phases).inner(a)?.norm())
    };
    let mut phases = initial_phases.to_vec();
    let mut best = eval(&phases)?;
    let mut spent = 1;
    let mut step = FRAC_PI_2;
    let mut order: Vec<usize> = (0..phases.len()).collect();
    'search: while spent < budget && step > 1e-12 {
        order.shuffle(rng);
        let mut improved = false;
        for &m in &order {
            for delta in [step, -step] {
                if spent >= budget {
                    break 'search;
                }
                let old = phases[m];
                phases[m] = old + delta;
                let f = eval(&phases)?;
                spent += 1;
                if f > best {
                    best = f;
                    improved = true;
                    break;
                }
                phases[m] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(BeamSearchResult {
        beam: BeamVector::from_phases(&phases),
        response: best,
        evaluations,
    })
}

/// Reconstruction times `k * dt_fixed` strictly before `duration`.
pub fn fixed_interval_schedule(dt_fixed: f64, duration: f64) -> Result<Vec<f64>> {
    if !(dt_fixed > 0.0 && dt_fixed.is_finite()) {
        return Err(Error::InvalidArgument(format!("fixed interval must be positive, got {dt_fixed}")));
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::InvalidArgument(format!("duration must be non-negative, got {duration}")));
    }
    // tolerate accumulated rounding so 5.0 / 0.1 yields 50 slots, not 51
    let count = (duration / dt_fixed - 1e-9).ceil().max(0.0) as usize;
    Ok((0..count).map(|k| k as f64 * dt_fixed).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phased_array::upa_steering;
    use crate::rng;

    #[test]
    fn codebook_sizes() {
        let cfg = ArrayConfig::default();
        assert_eq!(build_codebook(1, 1, &cfg).unwrap().beams.len(), 1);
        let cb = build_codebook(8, 8, &cfg).unwrap();
        assert_eq!(cb.beams.len(), 64);
        let n = cfg.upa_len() as f64;
        for e in &cb.beams {
            assert!(e.u > -FRAC_PI_2 && e.u < FRAC_PI_2 && (0.0..FRAC_PI_2).contains(&e.v));
            for w in e.beam.entries() {
                assert!((w.norm() - 1.0 / n.sqrt()).abs() < 1e-12);
            }
        }
        assert!(build_codebook(0, 3, &cfg).is_err());
    }

    #[test]
    fn on_grid_selection_is_aligned() {
        let cfg = ArrayConfig::default();
        let cb = build_codebook(24, 12, &cfg).unwrap();
        let e = &cb.beams[77];
        let a = upa_steering(e.u, e.v, &cfg).unwrap();
        let s = select_beam(&cb, &a, C64::new(1.0, 0.0)).unwrap();
        assert!((s.gain - 256.0).abs() < 1e-9);
    }

    #[test]
    fn midpoint_selection_drops() {
        let cfg = ArrayConfig::default();
        let cb = build_codebook(24, 12, &cfg).unwrap();
        let (a0, a1) = (&cb.beams[0], &cb.beams[cb.grid_v + 1]);
        let a = upa_steering(0.5 * (a0.u + a1.u) + 0.3, 0.5 * (a0.v + a1.v), &cfg).unwrap();
        let s = select_beam(&cb, &a, C64::new(1.0, 0.0)).unwrap();
        assert!(s.gain < 256.0 - 1e-6);
        for e in &cb.beams {
            assert!(beam_gain(&e.beam, &a, C64::new(1.0, 0.0), 256).unwrap() <= s.gain);
        }
    }

    #[test]
    fn beam_search_converges_with_large_budget() {
        let cfg = ArrayConfig {
            n_x: 4,
            n_y: 4,
            ..ArrayConfig::default()
        };
        let a = upa_steering(0.4, 0.9, &cfg).unwrap();
        let n = a.len();
        let r = optimize_beam_vector(&a, 50 * n, &mut rng::stream(4, rng::BEAMOPT)).unwrap();
        assert!(r.response >= 0.99 * (n as f64).sqrt(), "{}", r.response);
        assert!(r.evaluations <= 50 * n);
    }

    #[test]
    fn beam_search_budget_one() {
        let cfg = ArrayConfig::default();
        let a = upa_steering(0.2, 0.3, &cfg).unwrap();
        let mut rng = rng::stream(1, "x");
        let phases: Vec<f64> = (0..a.len()).map(|i| i as f64 * 0.37).collect();
        let start = BeamVector::from_phases(&phases).inner(&a).unwrap().norm();
        let r = optimize_beam_vector_from(&phases, &a, 1, &mut rng).unwrap();
        assert_eq!(r.evaluations, 1);
        assert!(r.response >= start);
        assert!(optimize_beam_vector(&a, 0, &mut rng).is_err());
    }

    #[test]
    fn beam_search_is_monotone_in_budget() {
        let cfg = ArrayConfig {
            n_x: 4,
            n_y: 4,
            ..ArrayConfig::default()
        };
        let a = upa_steering(-0.7, 0.2, &cfg).unwrap();
        let phases = vec![0.0; a.len()];
        let mut last = 0.0;
        for budget in [1, 5, 20, 80, 320] {
            let r = optimize_beam_vector_from(&phases, &a, budget, &mut rng::stream(9, "b")).unwrap();
            assert!(r.evaluations <= budget);
            assert!(r.response >= last - 1e-12);
            last = r.response;
        }
    }

    #[test]
    fn fixed_schedule_counts() {
        assert_eq!(fixed_interval_schedule(0.1, 5.0).unwrap().len(), 50);
        assert_eq!(fixed_interval_schedule(0.01, 5.0).unwrap().len(), 500);
        assert_eq!(fixed_interval_schedule(0.3, 1.0).unwrap(), vec![0.0, 0.3, 0.6, 0.8999999999999999]);
        assert!(fixed_interval_schedule(0.0, 1.0).is_err());
    }
}
