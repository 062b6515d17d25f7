use super::{build_world, split_measured, ScenarioConfig, Tracker};
use crate::baselines::{build_codebook, optimize_beam_vector_from, select_beam};
use crate::gdcsa::{locate, LocalizationProblem};
use crate::gpr::AngleModels;
use crate::phased_array::{upa_steering, ArrayConfig};
use crate::rng;
use crate::tiam::{tiam_step, TiamState};
use crate::{Error, Result, C64};
use serde::Serialize;
use std::hint::black_box;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuntimePoint {
    pub tracker: Tracker,
    /// Elements per side of the square array.
    pub side: usize,
    /// Seconds per cycle, one entry per repetition.
    pub samples: Vec<f64>,
    pub median: f64,
    pub iqr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuntimeReport {
    pub points: Vec<RuntimePoint>,
}

impl RuntimeReport {
    pub fn median(&self, tracker: Tracker, side: usize) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.tracker == tracker && p.side == side)
            .map(|p| p.median)
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn time_cycles(repetitions: usize, mut cycle: impl FnMut() -> Result<()>) -> Result<Vec<f64>> {
    cycle()?; // warm-up
    let mut out = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let t = Instant::now();
        cycle()?;
        out.push(t.elapsed().as_secs_f64());
    }
    Ok(out)
}

/// Wall time of one reconstruction cycle per tracker and square array size.
///
/// A BAB-AR cycle covers a full frame: localizing the U-UAV, fitting both
/// angle models, choosing the next interval and synthesizing the beam. The
/// codebook cycle is an exhaustive beam scan, and the beamopt cycle one
/// budgeted phase search.
pub fn measure_runtime(
    cfg: &ScenarioConfig,
    trackers: &[Tracker],
    sides: &[usize],
    repetitions: usize,
) -> Result<RuntimeReport> {
    if repetitions < 3 {
        return Err(Error::InvalidArgument("at least 3 repetitions are required".into()));
    }
    if sides.is_empty() || sides.contains(&0) {
        return Err(Error::InvalidArgument("array sizes must be positive".into()));
    }
    let mut points = Vec::new();
    for &side in sides {
        let array = ArrayConfig {
            n_x: side,
            n_y: side,
            ..cfg.array
        };
        let c = ScenarioConfig {
            array,
            duration: cfg.collection_dt,
            ..cfg.clone()
        };
        c.validate()?;
        let world = build_world(&c)?;
        let j = c.history - 1;
        let (u_true, v_true) = world.truth[j];
        let truth = world.epochs[0].truth;
        for &tracker in trackers {
            let samples = match tracker {
                Tracker::BabAr | Tracker::Fixed => {
                    let (t, u, v) = split_measured(&world, j);
                    let mut obs = rng::stream(c.seed, rng::OBSERVATION);
                    time_cycles(repetitions, || {
                        let problem = LocalizationProblem::observe(
                            truth,
                            &c.a_uav_positions,
                            &c.link,
                            &c.array,
                            c.observation_noise.then_some(&mut obs),
                        )?;
                        let r = locate(&problem, &c.gdcsa, &mut rng::stream(c.seed, rng::OPTIMIZER))?;
                        black_box(r);
                        let models = AngleModels::fit(&t, &u, &v, &c.gpr)?;
                        let mut state = TiamState::new(t[j - 1], u[j - 1], v[j - 1], &c.tiam);
                        let step = tiam_step(&mut state, |x| models.predict(x), &c.array, &c.tiam, 0.0)?;
                        black_box(step);
                        Ok(())
                    })?
                }
                Tracker::Codebook => {
                    let cb = build_codebook(c.codebook.grid_u, c.codebook.grid_v, &c.array)?;
                    time_cycles(repetitions, || {
                        let a = upa_steering(u_true, v_true, &c.array)?;
                        black_box(select_beam(&cb, &a, C64::new(1.0, 0.0))?);
                        Ok(())
                    })?
                }
                Tracker::Beamopt => {
                    let n = c.array.upa_len();
                    let budget = c.beamopt.budget_per_element * n;
                    let start = vec![0.0; n];
                    let mut r = rng::stream(c.seed, rng::BEAMOPT);
                    time_cycles(repetitions, || {
                        let a = upa_steering(u_true, v_true, &c.array)?;
                        black_box(optimize_beam_vector_from(&start, &a, budget, &mut r)?);
                        Ok(())
                    })?
                }
            };
            let mut sorted = samples.clone();
            sorted.sort_by(f64::total_cmp);
            points.push(RuntimePoint {
                tracker,
                side,
                median: quantile(&sorted, 0.5),
                iqr: quantile(&sorted, 0.75) - quantile(&sorted, 0.25),
                samples,
            });
        }
    }
    Ok(RuntimeReport { points })
}
