//! Gaussian process regression of angle time series.
//!
//! Targets are min-max normalized and centred before the solve. The kernel is
//! a squared-exponential over time with additive white noise.

use crate::geometry::{unwrap_angles, wrap_angle};
use crate::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Length scales tried when the kernel width is selected by marginal likelihood.
pub const LENGTH_SCALE_GRID: [f64; 5] = [0.1, 0.2, 0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub min: f64,
    pub max: f64,
    /// Set when every input value was identical.
    pub degenerate: bool,
}

impl Normalization {
    pub fn apply(&self, x: f64) -> f64 {
        if self.degenerate {
            0.5
        } else {
            (x - self.min) / (self.max - self.min)
        }
    }

    pub fn invert(&self, y: f64) -> f64 {
        if self.degenerate {
            self.min
        } else {
            self.min + y * (self.max - self.min)
        }
    }

    /// Factor converting normalized variances back to the original units.
    pub fn variance_scale(&self) -> f64 {
        let span = self.max - self.min;
        span * span
    }
}

pub fn minmax_normalize(values: &[f64]) -> Result<(Vec<f64>, Normalization)> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("cannot normalize an empty series".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("series contains a non-finite value".into()));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let norm = Normalization {
        min,
        max,
        degenerate: max == min,
    };
    Ok((values.iter().map(|&v| norm.apply(v)).collect(), norm))
}

pub fn denormalize(values: &[f64], norm: &Normalization) -> Vec<f64> {
    values.iter().map(|&y| norm.invert(y)).collect()
}

pub fn rbf_kernel(t1: f64, t2: f64, length_scale: f64) -> f64 {
    let d = t1 - t2;
    (-d * d / (2.0 * length_scale * length_scale)).exp()
}

/// Noise-free Gram matrix over `times`.
pub fn gram_matrix(times: &[f64], length_scale: f64) -> DMatrix<f64> {
    let n = times.len();
    DMatrix::from_fn(n, n, |i, j| rbf_kernel(times[i], times[j], length_scale))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone)]
pub struct GprModel {
    train_times: Vec<f64>,
    train_targets_normalized: Vec<f64>,
    normalization: Normalization,
    target_offset: f64,
    length_scale: f64,
    noise_variance: f64,
    factor: Cholesky<f64, Dyn>,
    weights: DVector<f64>,
}

fn check_hyper(length_scale: f64, noise_variance: f64) -> Result<()> {
    if !(length_scale > 0.0 && length_scale.is_finite()) {
        return Err(Error::InvalidArgument(format!("length scale must be positive, got {length_scale}")));
    }
    if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise variance must be non-negative, got {noise_variance}"
        )));
    }
    Ok(())
}

impl GprModel {
    pub fn fit(times: &[f64], targets: &[f64], length_scale: f64, noise_variance: f64) -> Result<Self> {
        check_hyper(length_scale, noise_variance)?;
        if times.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                got: targets.len(),
            });
        }
        if times.len() < 2 {
            return Err(Error::InvalidArgument("at least two training samples are required".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("training times must be finite".into()));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(format!(
                "training times must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        let (normalized, normalization) = minmax_normalize(targets)?;
        let n = normalized.len();
        let target_offset = normalized.iter().sum::<f64>() / n as f64;

        let mut k = gram_matrix(times, length_scale);
        for i in 0..n {
            k[(i, i)] += noise_variance;
        }
        let factor = Cholesky::new(k).ok_or_else(|| {
            Error::IllConditioned(format!(
                "{n} samples, length scale {length_scale}, noise variance {noise_variance}"
            ))
        })?;
        let centred = DVector::from_iterator(n, normalized.iter().map(|y| y - target_offset));
        let weights = factor.solve(&centred);
        Ok(Self {
            train_times: times.to_vec(),
            train_targets_normalized: normalized,
            normalization,
            target_offset,
            length_scale,
            noise_variance,
            factor,
            weights,
        })
    }

    /// Fits once per candidate length scale and keeps the model with the
    /// highest log marginal likelihood; ties keep the earlier candidate.
    pub fn fit_selecting(times: &[f64], targets: &[f64], candidates: &[f64], noise_variance: f64) -> Result<Self> {
        let mut best: Option<(f64, GprModel)> = None;
        let mut last_err = None;
        for &ls in candidates {
            match GprModel::fit(times, targets, ls, noise_variance) {
                Ok(m) => {
                    let lml = m.log_marginal_likelihood();
                    if best.as_ref().is_none_or(|(b, _)| lml > *b) {
                        best = Some((lml, m));
                    }
                }
                Err(e @ Error::IllConditioned(_)) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        best.map(|(_, m)| m).ok_or_else(|| {
            last_err.unwrap_or_else(|| Error::InvalidArgument("no length-scale candidates".into()))
        })
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn train_times(&self) -> &[f64] {
        &self.train_times
    }

    pub fn train_targets_normalized(&self) -> &[f64] {
        &self.train_targets_normalized
    }

    /// Log evidence of the centred normalized targets.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let n = self.train_times.len();
        let centred = DVector::from_iterator(n, self.train_targets_normalized.iter().map(|y| y - self.target_offset));
        let fit_term = centred.dot(&self.weights);
        let log_det: f64 = self.factor.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        -0.5 * fit_term - log_det - 0.5 * n as f64 * (2.0 * PI).ln()
    }

    pub fn predict(&self, t_star: f64) -> Prediction {
        let n = self.train_times.len();
        let k_star = DVector::from_iterator(n, self.train_times.iter().map(|&t| rbf_kernel(t, t_star, self.length_scale)));
        let mean_normalized = k_star.dot(&self.weights) + self.target_offset;
        let v = self
            .factor
            .l()
            .solve_lower_triangular(&k_star)
            .expect("Cholesky factor has a positive diagonal");
        let variance = (1.0 - v.norm_squared()).max(0.0);
        Prediction {
            mean: self.normalization.invert(mean_normalized),
            variance: variance * self.normalization.variance_scale(),
        }
    }
}

/// When and how strictly the fitted models are checked against new data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RebuildPolicy {
    pub t_check: f64,
    pub sigma_check: f64,
}

impl Default for RebuildPolicy {
    fn default() -> Self {
        Self {
            t_check: 3.0,
            sigma_check: 0.05 * PI,
        }
    }
}

impl RebuildPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_check > 0.0 && self.t_check.is_finite()) {
            return Err(Error::config("gpr.rebuild.t_check", "must be positive"));
        }
        if !(self.sigma_check > 0.0 && self.sigma_check.is_finite()) {
            return Err(Error::config("gpr.rebuild.sigma_check", "must be positive"));
        }
        Ok(())
    }
}

/// Strictly greater than the threshold; the difference is wrapped.
pub fn should_rebuild(predicted: f64, actual: f64, policy: &RebuildPolicy) -> bool {
    wrap_angle(predicted - actual).abs() > policy.sigma_check
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GprUpdate {
    /// Refit on the most recent window at every beam reconstruction.
    Rolling,
    /// Refit only when a periodic check finds the prediction off by more
    /// than the rebuild threshold.
    OnRebuild,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GprConfig {
    pub length_scale: f64,
    pub noise_variance: f64,
    pub select_length_scale: bool,
    pub window: usize,
    pub update: GprUpdate,
    pub rebuild: RebuildPolicy,
}

impl Default for GprConfig {
    fn default() -> Self {
        Self {
            length_scale: 0.5,
            noise_variance: 1e-4,
            select_length_scale: false,
            window: 30,
            update: GprUpdate::Rolling,
            rebuild: RebuildPolicy::default(),
        }
    }
}

impl GprConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.length_scale > 0.0 && self.length_scale.is_finite()) {
            return Err(Error::config("gpr.length_scale", "must be positive"));
        }
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return Err(Error::config("gpr.noise_variance", "must be non-negative"));
        }
        if self.window < 2 {
            return Err(Error::config("gpr.window", "must be at least 2"));
        }
        self.rebuild.validate()
    }

    pub fn fit(&self, times: &[f64], targets: &[f64]) -> Result<GprModel> {
        if self.select_length_scale {
            GprModel::fit_selecting(times, targets, &LENGTH_SCALE_GRID, self.noise_variance)
        } else {
            GprModel::fit(times, targets, self.length_scale, self.noise_variance)
        }
    }
}

/// Independent azimuth and elevation models.
#[derive(Debug, Clone)]
pub struct AngleModels {
    pub u: GprModel,
    pub v: GprModel,
}

impl AngleModels {
    /// Fits both axes on the trailing `cfg.window` samples. Azimuth is
    /// unwrapped first so a crossing of ±π stays continuous.
    pub fn fit(times: &[f64], u: &[f64], v: &[f64], cfg: &GprConfig) -> Result<Self> {
        let start = times.len().saturating_sub(cfg.window);
        Ok(Self {
            u: Self::fit_u(&times[start..], &u[start..], cfg)?,
            v: cfg.fit(&times[start..], &v[start..])?,
        })
    }

    pub fn fit_u(times: &[f64], u: &[f64], cfg: &GprConfig) -> Result<GprModel> {
        let start = times.len().saturating_sub(cfg.window);
        cfg.fit(&times[start..], &unwrap_angles(&u[start..]))
    }

    pub fn fit_v(times: &[f64], v: &[f64], cfg: &GprConfig) -> Result<GprModel> {
        let start = times.len().saturating_sub(cfg.window);
        cfg.fit(&times[start..], &v[start..])
    }

    /// Predicted `(u, v)` with azimuth wrapped back into (-π, π].
    pub fn predict(&self, t: f64) -> (f64, f64) {
        (wrap_angle(self.u.predict(t).mean), self.v.predict(t).mean)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        let (y, n) = minmax_normalize(&[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(y, vec![0.0, 0.5, 1.0]);
        assert_eq!((n.min, n.max, n.degenerate), (0.0, 2.0, false));
        let (y, n) = minmax_normalize(&[PI, PI]).unwrap();
        assert!(n.degenerate);
        assert_eq!(y, vec![0.5, 0.5]);
        assert_eq!(denormalize(&y, &n), vec![PI, PI]);
        assert!(minmax_normalize(&[]).is_err());
    }

    #[test]
    fn normalize_round_trip() {
        let x = [0.3, -1.7, 2.2, 0.0, 1e-3];
        let (y, n) = minmax_normalize(&x).unwrap();
        for (a, b) in denormalize(&y, &n).iter().zip(x) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_values() {
        assert_eq!(rbf_kernel(1.3, 1.3, 0.5), 1.0);
        assert_eq!(rbf_kernel(0.2, 1.1, 0.5), rbf_kernel(1.1, 0.2, 0.5));
        let s = 0.7;
        assert!((rbf_kernel(0.0, s * 2f64.sqrt(), s) - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn gram_is_symmetric_with_unit_diagonal() {
        let t: Vec<f64> = (0..12).map(|i| 0.13 * i as f64 + 0.01 * (i * i) as f64).collect();
        let k = gram_matrix(&t, 0.4);
        for i in 0..t.len() {
            assert!((k[(i, i)] - 1.0).abs() < 1e-12);
            for j in 0..t.len() {
                assert!((k[(i, j)] - k[(j, i)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fit_preconditions() {
        assert!(GprModel::fit(&[0.0, 1.0], &[0.1, 0.2], 0.5, 1e-4).is_ok());
        assert!(GprModel::fit(&[0.0, 0.0], &[0.1, 0.2], 0.5, 1e-4).is_err());
        assert!(GprModel::fit(&[0.0], &[0.1], 0.5, 1e-4).is_err());
        assert!(GprModel::fit(&[0.0, 1.0], &[0.1], 0.5, 1e-4).is_err());
        assert!(GprModel::fit(&[0.0, 1.0], &[0.1, 0.2], 0.0, 1e-4).is_err());
    }

    #[test]
    fn fifty_point_system_factorizes() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| t.sin()).collect();
        assert!(GprModel::fit(&t, &y, 0.5, 1e-4).is_ok());
    }

    #[test]
    fn ill_conditioned_is_reported() {
        let t: Vec<f64> = (0..60).map(|i| i as f64 * 1e-3).collect();
        let y: Vec<f64> = t.iter().map(|t| t * 2.0).collect();
        match GprModel::fit(&t, &y, 50.0, 0.0) {
            Err(Error::IllConditioned(_)) | Ok(_) => {}
            Err(e) => panic!("unexpected error {e:?}"),
        }
    }

    #[test]
    fn constant_series_predicts_constant() {
        let m = GprModel::fit(&[0.0, 0.5, 1.0], &[0.7, 0.7, 0.7], 0.5, 1e-4).unwrap();
        for t in [-3.0, 0.2, 9.0] {
            let p = m.predict(t);
            assert_eq!(p.mean, 0.7);
            assert_eq!(p.variance, 0.0);
        }
    }

    #[test]
    fn interpolates_training_points() {
        let t = [0.0, 0.3, 0.7, 1.2, 1.5];
        let y = [0.1, 0.4, -0.2, 0.05, 0.3];
        let m = GprModel::fit(&t, &y, 0.3, 1e-10).unwrap();
        for (ti, yi) in t.iter().zip(y) {
            assert!((m.predict(*ti).mean - yi).abs() < 1e-5);
        }
    }

    #[test]
    fn variance_grows_away_from_data() {
        let t: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| 0.2 * t).collect();
        let m = GprModel::fit(&t, &y, 0.5, 1e-4).unwrap();
        let near = m.predict(0.45).variance;
        let far = m.predict(3.0).variance;
        assert!(near >= 0.0 && far > near);
    }

    #[test]
    fn selection_picks_a_grid_value() {
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| (3.0 * t).sin()).collect();
        let m = GprModel::fit_selecting(&t, &y, &LENGTH_SCALE_GRID, 1e-4).unwrap();
        assert!(LENGTH_SCALE_GRID.contains(&m.length_scale()));
        for ls in LENGTH_SCALE_GRID {
            let other = GprModel::fit(&t, &y, ls, 1e-4).unwrap();
            assert!(other.log_marginal_likelihood() <= m.log_marginal_likelihood());
        }
    }

    #[test]
    fn rebuild_threshold_is_strict() {
        let p = RebuildPolicy::default();
        assert!(!should_rebuild(0.0, 0.0, &p));
        assert!(!should_rebuild(0.05 * PI, 0.0, &p));
        assert!(should_rebuild(0.2, 0.0, &p));
        assert!(!should_rebuild(PI - 0.01, -PI + 0.01, &p));
    }

    #[test]
    fn angle_models_handle_azimuth_wrap() {
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let u: Vec<f64> = t.iter().map(|t| wrap_angle(PI - 0.3 + 0.3 * t)).collect();
        let v: Vec<f64> = t.iter().map(|t| 0.4 + 0.01 * t).collect();
        let m = AngleModels::fit(&t, &u, &v, &GprConfig::default()).unwrap();
        let (pu, pv) = m.predict(1.0);
        assert!(wrap_angle(pu - PI).abs() < 1e-3);
        assert!((pv - 0.41).abs() < 1e-3);
    }
}
