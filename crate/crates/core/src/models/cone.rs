use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use super::PointSet;
use crate::error::{invalid, Result};
use crate::quad::{adaptive_simpson, simpson};
use crate::radial::RadialLaw;
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

const GRID_POINTS: usize = 1 << 14;

/// Angular densities supported on `[0, θ₀]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeDensity {
    Uniform,
    /// `(6/θ₀³) θ (θ₀ − θ)`.
    PolyQuad,
}

impl ConeDensity {
    pub fn pdf(&self, theta0: f64, t: f64) -> f64 {
        if !(0.0..=theta0).contains(&t) {
            return 0.0;
        }
        match self {
            Self::Uniform => 1.0 / theta0,
            Self::PolyQuad => 6.0 / theta0.powi(3) * t * (theta0 - t),
        }
    }
}

impl std::str::FromStr for ConeDensity {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "polyquad" => Ok(Self::PolyQuad),
            _ => Err(crate::Error::Parse(format!("unknown cone density '{s}' (uniform|polyquad)"))),
        }
    }
}

impl std::fmt::Display for ConeDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Uniform => "uniform",
            Self::PolyQuad => "polyquad",
        })
    }
}

/// `T (cos Θ, sin Θ)` with `Θ` supported on `[0, θ₀]`.
#[derive(Clone, Debug, Serialize)]
pub struct ConeModel {
    theta0: f64,
    density: ConeDensity,
    pub radial: RadialLaw,
    /// `(C₀, γ)` with `P(cos(Θ₁−Θ₂) − cos(θ₀∧π) < ε) ~ C₀ ε^γ`.
    regularity: (f64, f64),
    #[serde(skip)]
    inverse: MonotoneCubic,
}

impl PartialEq for ConeModel {
    fn eq(&self, other: &Self) -> bool {
        self.theta0 == other.theta0 && self.density == other.density && self.radial == other.radial
    }
}

impl ConeModel {
    pub fn new(theta0: f64, density: ConeDensity, radial: RadialLaw) -> Result<Self> {
        if !(theta0 > 0.0 && theta0 <= 2.0 * PI) {
            return Err(invalid(format!("cone aperture must lie in (0, 2π], got {theta0}")));
        }
        let mass = simpson(|t| density.pdf(theta0, t), 0.0, theta0, 4096);
        if (mass - 1.0).abs() > 1e-8 {
            return Err(invalid(format!("angular density integrates to {mass}, not 1")));
        }
        let regularity = regularity(theta0, density);
        let inverse = build_inverse_cdf(theta0, density);
        Ok(Self { theta0, density, radial, regularity, inverse })
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn density(&self) -> ConeDensity {
        self.density
    }

    /// `(C₀, γ)`.
    pub fn regularity(&self) -> (f64, f64) {
        self.regularity
    }

    /// `θ₀ ≤ π/3`: the diameter behaves like the maximum norm.
    pub fn is_trivial_regime(&self) -> bool {
        self.theta0 <= PI / 3.0
    }

    pub fn sample_angle<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.inverse.eval(rng.random::<f64>()).clamp(0.0, self.theta0)
    }

    pub fn sample_cloud<S: Scalar>(&self, n: usize, seed: u64) -> Result<PointSet<S>> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let mut rng = rng_from_seed(seed);
        let mut coords = Vec::with_capacity(2 * n);
        for _ in 0..n {
            let theta = self.sample_angle(&mut rng);
            let t = self.radial.sample(&mut rng);
            let (s, c) = theta.sin_cos();
            coords.push(S::of(t * c));
            coords.push(S::of(t * s));
        }
        PointSet::new(2, coords)
    }
}

fn regularity(theta0: f64, density: ConeDensity) -> (f64, f64) {
    let pi_tol = 1e-12;
    if (theta0 - PI).abs() <= pi_tol {
        match density {
            ConeDensity::Uniform => (2.0 / (PI * PI), 1.0),
            ConeDensity::PolyQuad => (12.0 / PI.powi(4), 2.0),
        }
    } else if theta0 < PI {
        let s = theta0.sin();
        match density {
            ConeDensity::Uniform => (1.0 / (theta0 * s).powi(2), 2.0),
            ConeDensity::PolyQuad => (3.0 / (theta0 * s).powi(4), 4.0),
        }
    } else {
        // Antipodal pairs exist; the overlap integral sets the constant.
        let overlap = adaptive_simpson(
            &|t: f64| density.pdf(theta0, t) * density.pdf(theta0, t - PI),
            PI,
            theta0,
            1e-14,
        );
        (4.0 * 2f64.sqrt() * overlap, 0.5)
    }
}

/// Monotone piecewise-cubic (Fritsch–Carlson) interpolant.
#[derive(Clone, Debug, Default)]
struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let secant: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
        let mut slope = vec![0.0; n];
        slope[0] = secant[0];
        slope[n - 1] = secant[n - 2];
        for i in 1..n - 1 {
            let (a, b) = (secant[i - 1], secant[i]);
            slope[i] = if a * b <= 0.0 {
                0.0
            } else {
                let (w1, w2) = (2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]), (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]));
                (w1 + w2) / (w1 / a + w2 / b)
            };
        }
        Self { x, y, slope }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
            s * (1.0 - s) * (1.0 - s),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }
}

/// Interpolates `θ(F)` from the numerically integrated cdf on a uniform θ grid.
fn build_inverse_cdf(theta0: f64, density: ConeDensity) -> MonotoneCubic {
    let h = theta0 / (GRID_POINTS - 1) as f64;
    let mut cdf = Vec::with_capacity(GRID_POINTS);
    let mut theta = Vec::with_capacity(GRID_POINTS);
    let mut acc = 0.0;
    cdf.push(0.0);
    theta.push(0.0);
    for k in 1..GRID_POINTS {
        let (a, b) = ((k - 1) as f64 * h, k as f64 * h);
        acc += simpson(|t| density.pdf(theta0, t), a, b, 2);
        cdf.push(acc);
        theta.push(b);
    }
    let total = acc;
    cdf.iter_mut().for_each(|c| *c /= total);
    MonotoneCubic::new(cdf, theta)
}
