//! Rare-event simulation of sums of symmetric heavy-tailed random variables.
//!
//! The crate estimates `P(S_n > x)` for `S_n = X_1 + … + X_n` with i.i.d.
//! symmetric power-law summands, splits the exceedance event by how many
//! coordinates are large, and checks the resulting one-big-jump picture
//! against closed-form and quadrature bounds.
//!
//! - [`dist`]: the two exact power-law families and their samplers.
//! - [`events`]: five-way classification of a sample vector.
//! - [`mc`]: crude, decomposition and conditional estimators.
//! - [`bounds`]: explicit bounds on every decomposition term and a
//!   convolution oracle for `n <= 2`.
//! - [`regime`]: the scaling ratios and default thresholds.
//! - [`cli`]: experiment specification, runner and report writers.

pub mod bounds;
pub mod cli;
pub mod dist;
pub mod error;
pub mod events;
pub mod mc;
pub mod quad;
pub mod regime;
pub mod rng;
pub mod stats;

pub use dist::{TailModel, Variant};
pub use error::{Error, Result};
pub use events::{Class, EventClass, EventParams};
pub use mc::{Estimate, McConfig, Method, Sign};
pub use regime::RegimeRatios;
