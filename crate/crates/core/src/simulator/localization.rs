use super::{generate_path, MotionConfig, MotionModel, ScenarioConfig};
use crate::channel::angle_2d;
use crate::gdcsa::{csa_locate, locate, pso_locate, LocalizationProblem, LocateResult};
use crate::geometry::wrap_angle;
use crate::rng;
use crate::trajectory::{apply_shake, MotionState};
use crate::{Error, Point, Result};
use serde::{Deserialize, Serialize};

/// Nearest-rank percentile of unsorted data, `q` in [0, 1].
pub fn percentile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Repeated localization of a moving U-UAV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizationConfig {
    pub epochs: usize,
    /// Seconds between epochs.
    pub epoch_dt: f64,
    pub motions: Vec<MotionModel>,
    pub initial: MotionState,
    pub shake_radius: f64,
}

impl Default for LocalizationConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            epoch_dt: 1.0,
            motions: vec![MotionModel::Ctrv, MotionModel::Ctra, MotionModel::Random],
            initial: MotionState {
                position: Point::new(75.0, 75.0),
                heading: 1.0,
                speed: 1.0,
                yaw_rate: 0.1,
                acceleration: 0.02,
            },
            shake_radius: 0.0,
        }
    }
}

impl LocalizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::config("localization.epochs", "must be at least 1"));
        }
        if !(self.epoch_dt > 0.0 && self.epoch_dt.is_finite()) {
            return Err(Error::config("localization.epoch_dt", "must be positive"));
        }
        if self.motions.is_empty() {
            return Err(Error::config("localization.motions", "must not be empty"));
        }
        if self.motions.contains(&MotionModel::Trace) {
            return Err(Error::config("localization.motions", "trace replay is not supported here"));
        }
        if !(self.shake_radius >= 0.0 && self.shake_radius.is_finite()) {
            return Err(Error::config("localization.shake_radius", "must be non-negative"));
        }
        self.initial.validate("localization.initial")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizationSample {
    pub motion: MotionModel,
    pub epoch: usize,
    pub truth: Point,
    pub estimate: Point,
    pub error: f64,
    /// `|θ̂ - θ| / |θ|` for each A-UAV.
    pub angle_relative_errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizationReport {
    pub samples: Vec<LocalizationSample>,
}

impl LocalizationReport {
    pub fn errors(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.error).collect()
    }

    pub fn angle_relative_errors(&self) -> Vec<f64> {
        self.samples.iter().flat_map(|s| s.angle_relative_errors.iter().copied()).collect()
    }

    /// Worst relative angle error over the A-UAVs, one entry per epoch.
    pub fn epoch_max_relative_errors(&self) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| s.angle_relative_errors.iter().copied().fold(0.0, f64::max))
            .collect()
    }

    pub fn fraction_within(&self, meters: f64) -> f64 {
        let e = self.errors();
        e.iter().filter(|&&x| x < meters).count() as f64 / e.len() as f64
    }
}

fn angle_relative_error(anchor: Point, truth: Point, estimate: Point) -> Result<f64> {
    let theta = angle_2d(anchor, truth)?;
    // an estimate landing on the anchor has no direction at all
    let theta_hat = angle_2d(anchor, estimate).unwrap_or(theta + std::f64::consts::PI);
    Ok(wrap_angle(theta_hat - theta).abs() / theta.abs())
}

/// Localizes the U-UAV once per epoch along each configured motion pattern.
/// Observation noise, optimizer and shake draws depend only on the seed,
/// motion index and epoch, so runs with and without shake see the same noise.
pub fn localization_experiment(scn: &ScenarioConfig, lc: &LocalizationConfig) -> Result<LocalizationReport> {
    scn.validate()?;
    lc.validate()?;
    let times: Vec<f64> = (0..lc.epochs).map(|e| e as f64 * lc.epoch_dt).collect();
    let mut samples = Vec::with_capacity(lc.epochs * lc.motions.len());
    for (mi, &model) in lc.motions.iter().enumerate() {
        let motion = MotionConfig {
            model,
            initial: lc.initial,
            ..MotionConfig::default()
        };
        let mut path_rng = rng::indexed_stream(scn.seed, rng::U_UAV_MOTION, mi as u64);
        let path = generate_path(&motion, &times, lc.epoch_dt, &mut path_rng)?;
        let mut shake_rng = rng::indexed_stream(scn.seed, rng::SHAKE, mi as u64);
        for (epoch, &p) in path.iter().enumerate() {
            let truth = scn.area.clamp(apply_shake(scn.area.clamp(p), lc.shake_radius, &mut shake_rng));
            let key = (mi * lc.epochs + epoch) as u64;
            let mut obs_rng = rng::indexed_stream(scn.seed, rng::OBSERVATION, key);
            let problem = LocalizationProblem::observe(
                truth,
                &scn.a_uav_positions,
                &scn.link,
                &scn.array,
                scn.observation_noise.then_some(&mut obs_rng),
            )?;
            let mut opt_rng = rng::indexed_stream(scn.seed, rng::OPTIMIZER, key);
            let r = locate(&problem, &scn.gdcsa, &mut opt_rng)?;
            let angle_relative_errors = scn
                .a_uav_positions
                .iter()
                .map(|&a| angle_relative_error(a, truth, r.position))
                .collect::<Result<Vec<_>>>()?;
            samples.push(LocalizationSample {
                motion: model,
                epoch,
                truth,
                estimate: r.position,
                error: r.position.distance(truth),
                angle_relative_errors,
            });
        }
    }
    Ok(LocalizationReport { samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    Gdcsa,
    Csa,
    Pso,
}

impl Optimizer {
    pub const ALL: [Optimizer; 3] = [Optimizer::Gdcsa, Optimizer::Csa, Optimizer::Pso];

    pub fn as_str(&self) -> &'static str {
        match self {
            Optimizer::Gdcsa => "GDCSA",
            Optimizer::Csa => "CSA",
            Optimizer::Pso => "PSO",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub optimizer: Optimizer,
    pub median_fitness: f64,
    pub median_error: f64,
    pub evaluations: usize,
    pub fitness: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub seeds: usize,
    pub rows: Vec<BenchRow>,
}

/// Runs the three optimizers on the scenario's localization problem with one
/// noise realization per seed and equal evaluation budgets.
pub fn bench_optimizers(scn: &ScenarioConfig, seeds: usize) -> Result<BenchReport> {
    scn.validate()?;
    if seeds == 0 {
        return Err(Error::InvalidArgument("at least one seed is required".into()));
    }
    let truth = scn.u_uav.motion.initial.position;
    let mut results: Vec<Vec<LocateResult>> = vec![Vec::new(); 3];
    for s in 0..seeds as u64 {
        let mut obs_rng = rng::indexed_stream(scn.seed, rng::OBSERVATION, s);
        let problem = LocalizationProblem::observe(
            truth,
            &scn.a_uav_positions,
            &scn.link,
            &scn.array,
            scn.observation_noise.then_some(&mut obs_rng),
        )?;
        for (slot, opt) in Optimizer::ALL.iter().enumerate() {
            let mut r = rng::indexed_stream(scn.seed, rng::OPTIMIZER, s);
            let res = match opt {
                Optimizer::Gdcsa => locate(&problem, &scn.gdcsa, &mut r)?,
                Optimizer::Csa => csa_locate(&problem, &scn.gdcsa, &mut r)?,
                Optimizer::Pso => pso_locate(&problem, &scn.gdcsa, &scn.pso, &mut r)?,
            };
            results[slot].push(res);
        }
    }
    let rows = Optimizer::ALL
        .iter()
        .zip(results)
        .map(|(&optimizer, rs)| {
            let fitness: Vec<f64> = rs.iter().map(|r| r.fitness).collect();
            let errors: Vec<f64> = rs.iter().map(|r| r.position.distance(truth)).collect();
            BenchRow {
                optimizer,
                median_fitness: median(&fitness),
                median_error: median(&errors),
                evaluations: rs[0].evaluations,
                fitness,
            }
        })
        .collect();
    Ok(BenchReport { seeds, rows })
}
