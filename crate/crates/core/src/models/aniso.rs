use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::Serialize;

use super::PointSet;
use crate::error::{invalid, Result};
use crate::radial::RadialLaw;
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

/// A bivariate law whose norm is maximal in the directions `±e₁` but behaves like
/// `|V|^{2q}` (not quadratically) near them, giving a slower localization.
///
/// With `U` uniform on `[−π, π)`, let `ε = sgn(cos U)` and fold `U` to
/// `V ∈ [−π/2, π/2]` (`V = U` when `cos U ≥ 0`, `V = U ∓ π` otherwise). Then
/// `X = ε T (a cos|V|^q, sgn(V) sin|V|^q)`, so `(x₁/a)² + x₂² = T²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnisotropicRateModel {
    amplitude: f64,
    exponent: f64,
    pub radial: RadialLaw,
}

impl AnisotropicRateModel {
    pub fn new(amplitude: f64, exponent: f64, radial: RadialLaw) -> Result<Self> {
        if !(amplitude > 1.0) || !amplitude.is_finite() {
            return Err(invalid(format!("amplitude must exceed 1, got {amplitude}")));
        }
        if !(exponent > 0.5 && exponent < 1.0) {
            return Err(invalid(format!("exponent must lie in (1/2, 1), got {exponent}")));
        }
        Ok(Self { amplitude, exponent, radial })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Direction `(a cos|V|^q, sgn(V) sin|V|^q)` up to the side sign, for `U ∈ [−π, π)`.
    pub fn direction(&self, u: f64) -> (f64, f64) {
        let (side, v) = if u.abs() <= FRAC_PI_2 { (1.0, u) } else { (-1.0, u - PI.copysign(u)) };
        let w = v.abs().powf(self.exponent);
        let (s, c) = w.sin_cos();
        (side * self.amplitude * c, side * s.copysign(v))
    }

    pub fn sample_cloud<S: Scalar>(&self, n: usize, seed: u64) -> Result<PointSet<S>> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let mut rng = rng_from_seed(seed);
        let mut coords = Vec::with_capacity(2 * n);
        for _ in 0..n {
            let u = rng.random_range(-PI..PI);
            let t = self.radial.sample(&mut rng);
            let (x, y) = self.direction(u);
            coords.push(S::of(t * x));
            coords.push(S::of(t * y));
        }
        PointSet::new(2, coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_lie_on_scaled_ellipses() {
        let m = AnisotropicRateModel::new(2.0, 0.75, RadialLaw::exponential(1.0).unwrap()).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..10_000 {
            let u = rng.random_range(-PI..PI);
            let t = m.radial.sample(&mut rng);
            let (x, y) = m.direction(u);
            let (x, y) = (t * x, t * y);
            let r2 = (x / 2.0).powi(2) + y * y;
            assert!((r2 - t * t).abs() <= 1e-12 * t * t);
        }
    }

    #[test]
    fn folding_is_symmetric() {
        let m = AnisotropicRateModel::new(3.0, 0.6, RadialLaw::exponential(1.0).unwrap()).unwrap();
        let (a, b) = (m.direction(0.3), m.direction(0.3 - PI));
        assert!((a.0 + b.0).abs() < 1e-12 && (a.1 + b.1).abs() < 1e-12);
        assert_eq!(m.direction(0.0), (3.0, 0.0));
    }

    #[test]
    fn validates_parameters() {
        let r = RadialLaw::exponential(1.0).unwrap();
        assert!(AnisotropicRateModel::new(1.0, 0.75, r).is_err());
        assert!(AnisotropicRateModel::new(2.0, 0.5, r).is_err());
        assert!(AnisotropicRateModel::new(2.0, 1.0, r).is_err());
    }
}
