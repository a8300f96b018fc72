//! Random point clouds whose norms lie in the Gumbel max-domain of attraction:
//! samplers, exact diameters, normalizing sequences, limit laws and Monte Carlo
//! experiments comparing the two.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod geometry;
pub mod limits;
pub mod models;
pub mod norming;
mod params;
pub mod quad;
pub mod radial;
pub mod rng;
pub mod roots;
pub mod scalar;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{DiameterAlgo, DiameterResult, NormSpec};
pub use limits::LimitLaw;
pub use models::{CloudModel, PointSet};
pub use norming::{norming_sequences, NormingData};
pub use radial::RadialLaw;
pub use scalar::Scalar;
pub use stats::ExperimentReport;

pub type PointSet64 = PointSet<f64>;
pub type PointSet32 = PointSet<f32>;
pub type DiameterResult64 = DiameterResult<f64>;
pub type DiameterResult32 = DiameterResult<f32>;
