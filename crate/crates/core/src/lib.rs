//! Sharp-threshold toolkit: influences on product spaces, Fourier analysis
//! on weighted cubes, a verifier for sharp thresholds of symmetric
//! increasing events, numerical checks of influence inequalities, and a
//! Johnson-Mehl tessellation percolation simulator.
//!
//! The numeric modules are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`, which is what the CLI and the acceptance battery
//! use.

pub mod acceptance;
pub mod boolfn;
pub mod error;
pub mod ineqlab;
pub mod influence;
pub mod jmperc;
pub mod scalar;
pub mod spaces;
pub mod spectrum;
pub mod stats;
pub mod threshold;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type TwoPointSpace = spaces::TwoPointSpace<f64>;
pub type ThreePointSpace = spaces::ThreePointSpace<f64>;
pub type InfluenceReport = influence::InfluenceReport<f64>;
