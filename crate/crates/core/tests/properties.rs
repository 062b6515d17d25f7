use beamtrack_core::baselines::{build_codebook, optimize_beam_vector, select_beam};
use beamtrack_core::channel::{angles_3d, snr, LinkBudget};
use beamtrack_core::geometry::wrap_angle;
use beamtrack_core::gpr::{gram_matrix, GprModel};
use beamtrack_core::phased_array::{beam_gain, upa_beam_vector, upa_steering, ArrayConfig, Hpbw};
use beamtrack_core::rng;
use beamtrack_core::tiam::{axis_interval, reconstruction_interval, AngularKinematics, TiamConfig, TiamMode};
use beamtrack_core::trajectory::{ctra_step, ctrv_step, MotionState};
use beamtrack_core::{Point, C64};
use proptest::prelude::*;
use std::f64::consts::PI;

fn array(n_x: usize, n_y: usize) -> ArrayConfig {
    ArrayConfig {
        n_x,
        n_y,
        ..ArrayConfig::default()
    }
}

fn kinematic(cfg: TiamConfig) -> TiamConfig {
    TiamConfig {
        mode: TiamMode::Kinematic,
        ..cfg
    }
}

proptest! {
    #[test]
    fn steering_and_beam_entries_have_fixed_modulus(
        u in -PI..PI, v in 0.0..PI / 2.0, n_x in 1usize..10, n_y in 1usize..10,
    ) {
        let cfg = array(n_x, n_y);
        let a = upa_steering(u, v, &cfg).unwrap();
        let w = upa_beam_vector(u, v, &cfg).unwrap();
        let scale = 1.0 / ((n_x * n_y) as f64).sqrt();
        for x in a.entries() {
            prop_assert!((x.norm() - 1.0).abs() < 1e-12);
        }
        for x in w.entries() {
            prop_assert!((x.norm() - scale).abs() < 1e-12);
        }
    }

    #[test]
    fn matched_beam_reaches_sqrt_n(u in -PI..PI, v in 0.0..PI / 2.0, n_x in 1usize..9, n_y in 1usize..9) {
        let cfg = array(n_x, n_y);
        let n = (n_x * n_y) as f64;
        let ip = upa_beam_vector(u, v, &cfg).unwrap().inner(&upa_steering(u, v, &cfg).unwrap()).unwrap();
        prop_assert!((ip.norm() - n.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn snr_is_monotone(amp in 0.0..1e-3f64, extra in 0.0..1e-3f64, tx in 0.01..10.0f64, noise in 1e-14..1e-9f64) {
        let link = LinkBudget { tx_power: tx, noise_power: noise, ..LinkBudget::default() };
        let base = snr(C64::new(amp, 0.0), &link);
        prop_assert!(snr(C64::new(amp + extra, 0.0), &link) >= base);
        let louder = LinkBudget { tx_power: tx * 2.0, ..link };
        let noisier = LinkBudget { noise_power: noise * 2.0, ..link };
        prop_assert!(snr(C64::new(amp, 0.0), &louder) >= base);
        prop_assert!(snr(C64::new(amp, 0.0), &noisier) <= base);
    }

    #[test]
    fn angles_hold_along_the_ray(
        x in -200.0..200.0f64, y in -200.0..200.0f64, h in 10.0..200.0f64, scale in 0.1..5.0f64,
    ) {
        prop_assume!(x.hypot(y) > 1e-3);
        let uav = Point::new(3.0, -7.0);
        let mu = Point::new(uav.x + x, uav.y + y);
        let far = Point::new(uav.x + scale * x, uav.y + scale * y);
        let (u0, v0) = angles_3d(mu, uav, h).unwrap();
        let (u1, v1) = angles_3d(far, uav, scale * h).unwrap();
        prop_assert!(wrap_angle(u1 - u0).abs() < 1e-9);
        prop_assert!((v1 - v0).abs() < 1e-9);
    }

    #[test]
    fn wrapped_angles_are_half_open(a in -100.0..100.0f64) {
        let w = wrap_angle(a);
        prop_assert!(w > -PI && w <= PI);
        let turns = (a - w) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn model_exact_motion_stays_inside_half_beam(
        theta in 0.01..0.5f64, omega in -3.0..3.0f64, alpha in -10.0..10.0f64,
    ) {
        let cfg = kinematic(TiamConfig { dt_max: 1e6, dt_min: 1e-9, ..TiamConfig::default() });
        let kin = AngularKinematics { omega_u: omega, omega_v: 0.0, alpha_u: alpha, alpha_v: 0.0, last_interval: 0.1 };
        let dt = reconstruction_interval(&kin, &Hpbw { theta_u: theta, theta_v: theta }, &cfg);
        prop_assume!(dt > cfg.dt_min && dt < cfg.dt_max);
        let deviation = (omega * dt + 0.5 * alpha * dt * dt).abs();
        prop_assert!(deviation <= theta / 2.0 + 1e-9, "deviation {deviation} at dt {dt}");
        // the root is tight when both terms push the same way
        if omega * alpha >= 0.0 {
            prop_assert!((deviation - theta / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn interval_shrinks_with_faster_motion(
        theta in 0.01..0.5f64, omega in 0.0..3.0f64, alpha in 0.0..10.0f64, d in 0.0..2.0f64,
    ) {
        let t = axis_interval(theta, omega, alpha, TiamMode::Kinematic, 1.0);
        prop_assert!(axis_interval(theta, omega + d, alpha, TiamMode::Kinematic, 1.0) <= t);
        prop_assert!(axis_interval(theta, -(omega + d), alpha, TiamMode::Kinematic, 1.0) <= t);
        prop_assert!(axis_interval(theta, omega, alpha + d, TiamMode::Kinematic, 1.0) <= t);
        prop_assert!(axis_interval(theta, omega, -(alpha + d), TiamMode::Kinematic, 1.0) <= t);
    }

    #[test]
    fn interval_is_clamped_axis_minimum(
        tu in 0.01..1.0f64, tv in 0.01..1.0f64,
        wu in -5.0..5.0f64, wv in -5.0..5.0f64, au in -50.0..50.0f64, av in -50.0..50.0f64,
        literal in any::<bool>(),
    ) {
        let mode = if literal { TiamMode::Literal } else { TiamMode::Kinematic };
        let cfg = TiamConfig { mode, ..TiamConfig::default() };
        let kin = AngularKinematics { omega_u: wu, omega_v: wv, alpha_u: au, alpha_v: av, last_interval: 0.1 };
        let dt = reconstruction_interval(&kin, &Hpbw { theta_u: tu, theta_v: tv }, &cfg);
        prop_assert!(dt >= cfg.dt_min && dt <= cfg.dt_max);
        let lo = axis_interval(tu, wu, au, mode, cfg.dt_max).min(axis_interval(tv, wv, av, mode, cfg.dt_max));
        prop_assert_eq!(dt, lo.clamp(cfg.dt_min, cfg.dt_max));
    }

    #[test]
    fn posterior_variance_is_non_negative(
        targets in prop::collection::vec(-3.0..3.0f64, 2..25),
        ls in 0.05..3.0f64, noise in 1e-8..1e-1f64, queries in prop::collection::vec(-5.0..10.0f64, 1..20),
    ) {
        let times: Vec<f64> = (0..targets.len()).map(|i| i as f64 * 0.1).collect();
        let m = GprModel::fit(&times, &targets, ls, noise).unwrap();
        for q in queries {
            let p = m.predict(q);
            prop_assert!(p.variance >= 0.0);
            prop_assert!(p.mean.is_finite());
        }
    }

    #[test]
    fn gram_is_symmetric_with_unit_diagonal(times in prop::collection::vec(-10.0..10.0f64, 1..20), ls in 0.05..5.0f64) {
        let k = gram_matrix(&times, ls);
        for i in 0..times.len() {
            prop_assert!((k[(i, i)] - 1.0).abs() < 1e-12);
            for j in 0..times.len() {
                prop_assert!((k[(i, j)] - k[(j, i)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn motion_models_are_deterministic(
        x in -100.0..100.0f64, y in -100.0..100.0f64, heading in -PI..PI,
        speed in 0.0..30.0f64, yaw in -1.0..1.0f64, accel in -2.0..2.0f64,
    ) {
        let s = MotionState { position: Point::new(x, y), heading, speed, yaw_rate: yaw, acceleration: accel };
        let run = |f: fn(&MotionState, f64) -> MotionState| {
            (0..50).fold(s, |st, _| f(&st, 0.1))
        };
        prop_assert_eq!(run(ctrv_step), run(ctrv_step));
        prop_assert_eq!(run(ctra_step), run(ctra_step));
    }

    #[test]
    fn ctrv_integrates_arcs_exactly(
        heading in -PI..PI, speed in 0.0..30.0f64, yaw in -1.0..1.0f64, dt in 0.01..0.5f64,
    ) {
        let s = MotionState { position: Point::new(10.0, -4.0), heading, speed, yaw_rate: yaw, acceleration: 0.0 };
        let coarse = (0..20).fold(s, |st, _| ctrv_step(&st, dt));
        let fine = (0..40).fold(s, |st, _| ctrv_step(&st, dt / 2.0));
        prop_assert!(coarse.position.distance(fine.position) < 1e-9);
    }

    #[test]
    fn codebook_never_beats_matched_beam(u in -1.5..1.5f64, v in 0.0..1.5f64) {
        let cfg = array(4, 4);
        let cb = build_codebook(8, 4, &cfg).unwrap();
        let a = upa_steering(u, v, &cfg).unwrap();
        let s = select_beam(&cb, &a, C64::new(1.0, 0.0)).unwrap();
        prop_assert!(s.gain <= cfg.upa_len() as f64 + 1e-9);
    }

    #[test]
    fn phase_search_respects_budget(u in -1.5..1.5f64, v in 0.0..1.5f64, budget in 1usize..200, seed in 0u64..1000) {
        let cfg = array(3, 3);
        let a = upa_steering(u, v, &cfg).unwrap();
        let r = optimize_beam_vector(&a, budget, &mut rng::stream(seed, rng::BEAMOPT)).unwrap();
        prop_assert!(r.evaluations <= budget);
        let g = beam_gain(&r.beam, &a, C64::new(1.0, 0.0), cfg.upa_len()).unwrap();
        prop_assert!(g <= cfg.upa_len() as f64 + 1e-9);
    }
}
