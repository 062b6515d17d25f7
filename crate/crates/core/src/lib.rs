//! Beam tracking between UAV base stations and a moving ground user.
//!
//! The pipeline has three stages that mirror how the aerial network operates:
//!
//! 1. Position-known UAVs locate a position-unknown UAV from the reference
//!    signals they receive, using a crow search variant with good-point-set
//!    initialization and a decaying awareness probability ([`gdcsa`]).
//! 2. The user's azimuth and elevation histories are fitted with two
//!    Gaussian-process regressors ([`gpr`]).
//! 3. The next beam reconstruction time is chosen from predicted angular
//!    kinematics so the user stays inside half the beamwidth ([`tiam`]).
//!
//! [`simulator`] strings the stages together and runs the comparison
//! trackers from [`baselines`].

pub mod baselines;
pub mod channel;
pub mod error;
pub mod gdcsa;
pub mod geometry;
pub mod gpr;
pub mod phased_array;
pub mod rng;
pub mod simulator;
pub mod tiam;
pub mod trajectory;

pub use error::{Error, Result};
pub use geometry::Point;

/// Complex sample type used throughout.
pub type C64 = num_complex::Complex64;
