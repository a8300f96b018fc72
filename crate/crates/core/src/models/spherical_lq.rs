use serde::Serialize;

use super::sphere::fill_unit_vector;
use super::PointSet;
use crate::error::{invalid, Result};
use crate::radial::RadialLaw;
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

/// `T · W` with `W` uniform on the Euclidean sphere, measured in an `l^q` norm, `q ≠ 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphericalLqModel {
    dim: usize,
    q: f64,
    pub radial: RadialLaw,
}

impl SphericalLqModel {
    pub fn new(dim: usize, q: f64, radial: RadialLaw) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("spherical l^q models need dimension d >= 2"));
        }
        if q == 2.0 {
            return Err(invalid("q = 2 is the spherical elliptical model; use the elliptical family"));
        }
        if q.is_nan() || q < 1.0 {
            return Err(invalid(format!("l^q exponent must satisfy q >= 1, got {q}")));
        }
        Ok(Self { dim, q, radial })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn sample_cloud<S: Scalar>(&self, n: usize, seed: u64) -> Result<PointSet<S>> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let mut rng = rng_from_seed(seed);
        let mut w = vec![0.0; self.dim];
        let mut coords = Vec::with_capacity(n * self.dim);
        for _ in 0..n {
            fill_unit_vector(&mut rng, &mut w);
            let t = self.radial.sample(&mut rng);
            coords.extend(w.iter().map(|&c| S::of(t * c)));
        }
        PointSet::new(self.dim, coords)
    }
}
