//! Norms and exact diameters of point sets.

mod diameter;
mod hull;
mod norm;

pub use diameter::{diameter, diameter_fast, diameter_naive, DiameterAlgo, DiameterResult};
pub use hull::{convex_hull, rotating_calipers};
pub use norm::{max_norm, norm, NormSpec};
