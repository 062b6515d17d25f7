//! Scenario orchestration.
//!
//! A run first localizes the U-UAV from the A-UAV observations, collects the
//! user's trajectory history, then steps the selected tracker to the end of
//! the scenario while logging link metrics. Localization repeats every
//! `gpr.rebuild.t_check` seconds.

mod compare;
mod config;
mod localization;
pub mod presets;
mod runtime;
mod summary;

pub use compare::{run_comparison, with_trackers, Comparison, ComparisonRow};
pub use config::{
    BeamoptConfig, CodebookConfig, MotionConfig, MotionModel, ScenarioConfig, ShakeMode, Tracker, UavConfig,
};
pub use localization::{
    bench_optimizers, localization_experiment, percentile, BenchReport, BenchRow, LocalizationConfig,
    LocalizationReport, LocalizationSample, Optimizer,
};
pub use runtime::{measure_runtime, RuntimePoint, RuntimeReport};
pub use summary::{EpochRecord, RunSummary, StepRecord};

use crate::baselines::{build_codebook, optimize_beam_vector_from, select_beam, Codebook};
use crate::channel::{angles_3d, distance_3d, path_gain, rate, received_amplitude, snr, snr_db};
use crate::gdcsa::{locate, LocalizationProblem};
use crate::gpr::{should_rebuild, AngleModels, GprUpdate};
use crate::phased_array::{beam_gain, upa_steering, BeamVector};
use crate::rng::{self, Stream};
use crate::tiam::{tiam_step, TiamState};
use crate::trajectory::{apply_shake, ctra_step, ctrv_step, interpolate, load_trace, parse_trace, random_step};
use crate::{Point, Result, C64};
use sha2::{Digest, Sha256};
use std::time::Instant;

/// Synthetic highway drive bundled for trace replay.
pub const BUNDLED_TRACE: &str = include_str!("../../data/highway.csv");

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub steps: Vec<StepRecord>,
    pub epochs: Vec<EpochRecord>,
}

/// How the next reconstruction time is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    Adaptive,
    Fixed(f64),
}

/// Positions sampled at `times`, which are evenly spaced by `dt`.
pub fn generate_path(motion: &MotionConfig, times: &[f64], dt: f64, rng: &mut Stream) -> Result<Vec<Point>> {
    if motion.model == MotionModel::Trace {
        let samples = match &motion.trace {
            Some(path) => load_trace(std::path::Path::new(path))?,
            None => parse_trace(BUNDLED_TRACE, "bundled highway trace")?,
        };
        let offset = samples[0].time - times.first().copied().unwrap_or(0.0);
        return Ok(times.iter().map(|&t| interpolate(&samples, t + offset)).collect());
    }
    let mut state = motion.initial;
    let mut out = Vec::with_capacity(times.len());
    for i in 0..times.len() {
        if i > 0 {
            state = match motion.model {
                MotionModel::Static => state,
                MotionModel::Ctrv => ctrv_step(&state, dt),
                MotionModel::Ctra => ctra_step(&state, dt),
                MotionModel::Random => random_step(&state, dt, motion.wander, rng),
                MotionModel::Trace => unreachable!(),
            };
        }
        out.push(state.position);
    }
    Ok(out)
}

/// Everything shared by trackers that run on the same configuration.
struct World {
    /// Sample times; index `history - 1` is `t = 0`.
    times: Vec<f64>,
    mu: Vec<Point>,
    /// True U-UAV position including shake.
    uav: Vec<Point>,
    /// Angles of the user from the true U-UAV.
    truth: Vec<(f64, f64)>,
    /// Angles measured against the latest U-UAV estimate.
    measured: Vec<(f64, f64)>,
    epochs: Vec<EpochRecord>,
    digest: String,
    /// Time spent localizing, seconds.
    localization_time: f64,
}

fn epoch_steps(cfg: &ScenarioConfig) -> usize {
    ((cfg.gpr.rebuild.t_check / cfg.collection_dt).round() as usize).max(1)
}

fn build_world(cfg: &ScenarioConfig) -> Result<World> {
    let dt = cfg.collection_dt;
    let h = cfg.history;
    let n = cfg.steps();
    let times: Vec<f64> = (0..h + n).map(|j| (j as f64 - (h as f64 - 1.0)) * dt).collect();
    let mu = generate_path(&cfg.mu, &times, dt, &mut rng::stream(cfg.seed, rng::TRAJECTORY))?;
    let base = generate_path(&cfg.u_uav.motion, &times, dt, &mut rng::stream(cfg.seed, rng::U_UAV_MOTION))?;

    let every = epoch_steps(cfg);
    let epoch_of = |j: usize| (j + 1).saturating_sub(h) / every;
    let mut shake_rng = rng::stream(cfg.seed, rng::SHAKE);
    let radius = cfg.u_uav.shake_radius;
    let mut uav = Vec::with_capacity(base.len());
    let mut held: Option<(usize, Point)> = None;
    for (j, &p) in base.iter().enumerate() {
        let shaken = match cfg.u_uav.shake_mode {
            _ if radius == 0.0 => p,
            ShakeMode::PerStep => apply_shake(p, radius, &mut shake_rng),
            ShakeMode::PerEpoch => {
                let e = epoch_of(j);
                let offset = match held {
                    Some((he, off)) if he == e => off,
                    _ => {
                        let off = apply_shake(Point::default(), radius, &mut shake_rng);
                        held = Some((e, off));
                        off
                    }
                };
                Point::new(p.x + offset.x, p.y + offset.y)
            }
        };
        uav.push(cfg.area.clamp(shaken));
    }

    let mut obs_rng = rng::stream(cfg.seed, rng::OBSERVATION);
    let mut epochs = Vec::new();
    let started = Instant::now();
    for (e, k) in (0..n).step_by(every).enumerate() {
        let j = k + h - 1;
        let truth = uav[j];
        let problem = LocalizationProblem::observe(
            truth,
            &cfg.a_uav_positions,
            &cfg.link,
            &cfg.array,
            cfg.observation_noise.then_some(&mut obs_rng),
        )
        .map_err(|err| err.at(times[j]))?;
        let mut opt_rng = rng::indexed_stream(cfg.seed, rng::OPTIMIZER, e as u64);
        let r = locate(&problem, &cfg.gdcsa, &mut opt_rng).map_err(|err| err.at(times[j]))?;
        epochs.push(EpochRecord {
            t: times[j],
            truth,
            estimate: r.position,
            error: r.position.distance(truth),
            fitness: r.fitness,
        });
    }
    let localization_time = started.elapsed().as_secs_f64();

    let mut truth = Vec::with_capacity(times.len());
    let mut measured = Vec::with_capacity(times.len());
    for j in 0..times.len() {
        truth.push(angles_3d(mu[j], uav[j], cfg.altitude)?);
        let est = epochs[epoch_of(j).min(epochs.len() - 1)].estimate;
        measured.push(angles_3d(mu[j], est, cfg.altitude)?);
    }

    let mut hasher = Sha256::new();
    for j in 0..times.len() {
        for x in [times[j], mu[j].x, mu[j].y, uav[j].x, uav[j].y, truth[j].0, truth[j].1] {
            hasher.update(x.to_le_bytes());
        }
    }
    for e in &epochs {
        for x in [e.estimate.x, e.estimate.y, e.fitness] {
            hasher.update(x.to_le_bytes());
        }
    }
    let digest = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();

    Ok(World {
        times,
        mu,
        uav,
        truth,
        measured,
        epochs,
        digest,
        localization_time,
    })
}

/// Beam state owned by the active tracker.
enum TrackerState {
    Predictive {
        schedule: Schedule,
        models: AngleModels,
        tiam: TiamState,
    },
    Codebook(Codebook),
    Beamopt {
        rng: Stream,
        phases: Vec<f64>,
    },
}

struct Active {
    beam: BeamVector,
    u: f64,
    v: f64,
    interval: f64,
}

fn split_measured(world: &World, upto: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let t = world.times[..=upto].to_vec();
    let u = world.measured[..=upto].iter().map(|m| m.0).collect();
    let v = world.measured[..=upto].iter().map(|m| m.1).collect();
    (t, u, v)
}

fn run_tracker(cfg: &ScenarioConfig, world: &World, timed: bool) -> Result<(Vec<StepRecord>, f64)> {
    let dt = cfg.collection_dt;
    let h = cfg.history;
    let n = cfg.steps();
    let n_elements = cfg.array.upa_len();
    let every = epoch_steps(cfg);
    // newest sample index the tracker may use at step k
    let avail = |k: usize| k + h - 1 - cfg.relay_delay_steps;

    let mut state = match cfg.tracker {
        Tracker::BabAr | Tracker::Fixed => {
            let (t, u, v) = split_measured(world, avail(0));
            let models = AngleModels::fit(&t, &u, &v, &cfg.gpr).map_err(|e| e.at(0.0))?;
            let last = t.len() - 2;
            let tiam = TiamState::new(t[last], u[last], v[last], &cfg.tiam);
            let schedule = if cfg.tracker == Tracker::BabAr {
                Schedule::Adaptive
            } else {
                Schedule::Fixed(cfg.fixed_dt)
            };
            TrackerState::Predictive { schedule, models, tiam }
        }
        Tracker::Codebook => TrackerState::Codebook(build_codebook(cfg.codebook.grid_u, cfg.codebook.grid_v, &cfg.array)?),
        Tracker::Beamopt => {
            let mut rng = rng::stream(cfg.seed, rng::BEAMOPT);
            let phases = (0..n_elements)
                .map(|_| rand::Rng::random::<f64>(&mut rng) * std::f64::consts::TAU)
                .collect();
            TrackerState::Beamopt { rng, phases }
        }
    };

    let mut records = Vec::with_capacity(n);
    let mut active: Option<Active> = None;
    let mut next_reconstruction = 0usize;
    let mut busy = 0.0;
    for k in 0..n {
        let j = k + h - 1;
        let t = world.times[j];
        let (u_true, v_true) = world.truth[j];
        let a = upa_steering(u_true, v_true, &cfg.array)?;
        let started = timed.then(Instant::now);

        let (mut rebuild_u, mut rebuild_v) = (false, false);
        if let TrackerState::Predictive { models, .. } = &mut state {
            if k > 0 && k % every == 0 {
                let jm = avail(k);
                let (pu, pv) = models.predict(world.times[jm]);
                let (mu_, mv) = world.measured[jm];
                rebuild_u = should_rebuild(pu, mu_, &cfg.gpr.rebuild);
                rebuild_v = should_rebuild(pv, mv, &cfg.gpr.rebuild);
                if rebuild_u || rebuild_v {
                    let (tt, uu, vv) = split_measured(world, jm);
                    if rebuild_u {
                        models.u = AngleModels::fit_u(&tt, &uu, &cfg.gpr).map_err(|e| e.at(t))?;
                    }
                    if rebuild_v {
                        models.v = AngleModels::fit_v(&tt, &vv, &cfg.gpr).map_err(|e| e.at(t))?;
                    }
                }
            }
        }

        let reconstructed = k == next_reconstruction;
        if reconstructed {
            let next = match &mut state {
                TrackerState::Predictive { schedule, models, tiam } => {
                    if cfg.gpr.update == GprUpdate::Rolling && k > 0 {
                        let (tt, uu, vv) = split_measured(world, avail(k));
                        *models = AngleModels::fit(&tt, &uu, &vv, &cfg.gpr).map_err(|e| e.at(t))?;
                    }
                    let m = &*models;
                    let step = tiam_step(tiam, |x| m.predict(x), &cfg.array, &cfg.tiam, t).map_err(|e| e.at(t))?;
                    let interval = match *schedule {
                        Schedule::Adaptive => step.dt_star,
                        Schedule::Fixed(d) => d,
                    };
                    tiam.last_interval = interval;
                    Active {
                        beam: step.beam,
                        u: step.u,
                        v: step.v,
                        interval,
                    }
                }
                TrackerState::Codebook(cb) => {
                    let s = select_beam(cb, &a, C64::new(1.0, 0.0))?;
                    let e = &cb.beams[s.index];
                    Active {
                        beam: e.beam.clone(),
                        u: e.u,
                        v: e.v,
                        interval: cfg.fixed_dt,
                    }
                }
                TrackerState::Beamopt { rng, phases } => {
                    let budget = cfg.beamopt.budget_per_element * n_elements;
                    let r = optimize_beam_vector_from(phases, &a, budget, rng)?;
                    *phases = r.beam.phases();
                    Active {
                        beam: r.beam,
                        u: u_true,
                        v: v_true,
                        interval: cfg.fixed_dt,
                    }
                }
            };
            next_reconstruction = k + ((next.interval / dt + 1e-9).floor() as usize).max(1);
            active = Some(next);
        }
        if let Some(s) = started {
            busy += s.elapsed().as_secs_f64();
        }

        let cur = active.as_ref().expect("first step always reconstructs");
        let gain = beam_gain(&cur.beam, &a, C64::new(1.0, 0.0), n_elements)?;
        let distance = distance_3d(world.mu[j], world.uav[j], cfg.altitude);
        let amp = received_amplitude(Some(&cur.beam), &a, path_gain(distance, &cfg.link)?, n_elements)?;
        let s = snr(amp, &cfg.link);
        let r = rate(s);
        let power = cfg
            .power
            .slot_power(cfg.link.tx_power, cfg.array.n_x, cfg.array.n_y, reconstructed);
        records.push(StepRecord {
            t,
            u_true,
            v_true,
            u_pred: cur.u,
            v_pred: cur.v,
            gain,
            snr_db: snr_db(amp, &cfg.link),
            rate: r,
            ee: r / power,
            reconstructed,
            dt_star: cur.interval,
            rebuild_u,
            rebuild_v,
        });
    }
    Ok((records, busy))
}

fn run(cfg: &ScenarioConfig, timed: bool) -> Result<RunOutput> {
    cfg.validate()?;
    let world = build_world(cfg)?;
    let (steps, busy) = run_tracker(cfg, &world, timed)?;
    let mut summary = RunSummary::from_log(
        cfg.tracker,
        cfg.tiam.mode,
        &steps,
        &world.epochs,
        &cfg.array,
        world.digest.clone(),
    );
    if timed && summary.reconstructions > 0 {
        let localization = if matches!(cfg.tracker, Tracker::BabAr | Tracker::Fixed) {
            world.localization_time
        } else {
            0.0
        };
        summary.wall_clock_per_cycle = Some((busy + localization) / summary.reconstructions as f64);
    }
    Ok(RunOutput {
        summary,
        steps,
        epochs: world.epochs,
    })
}

/// Deterministic run: identical configs give identical outputs.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput> {
    run(cfg, false)
}

/// Like [`run_scenario`], also recording wall-clock time per reconstruction.
pub fn run_scenario_timed(cfg: &ScenarioConfig) -> Result<RunOutput> {
    run(cfg, true)
}

/// Rejects configurations that cannot be simulated, with the offending field.
pub fn check(cfg: &ScenarioConfig) -> Result<()> {
    cfg.validate()?;
    if cfg.mu.model == MotionModel::Trace {
        let times = [0.0];
        let mut rng = rng::stream(0, rng::TRAJECTORY);
        generate_path(&cfg.mu, &times, cfg.collection_dt, &mut rng)?;
    }
    Ok(())
}
