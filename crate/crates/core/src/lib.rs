//! Perfect sampling for the planar hard-core gas.
//!
//! * [`poisson`]: Poisson point processes and the acceptance/rejection
//!   hard-core sampler.
//! * [`bdchain`]: the spatial birth-death chain with the hard-core blocking
//!   rule.
//! * [`dcftp`]: exact sampling by dominated coupling from the past.
//! * [`cod`]: clan-of-descendants extinction trials and intensity sweeps.
//! * [`theory`]: closed-form constants and numerical checks of the running
//!   time bound.

pub mod bdchain;
pub mod cod;
pub mod dcftp;
pub mod error;
pub mod geometry;
pub mod poisson;
pub mod rng;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
pub use geometry::{Configuration, Point, PointId};
pub use poisson::{ModelParams, Window};
pub use rng::RandomSource;
