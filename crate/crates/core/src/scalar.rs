//! Floating-point scalar abstraction for point coordinates.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Coordinate type of point sets: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Send + Sync + Debug + Display + LowerExp + Default + 'static
{
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
