use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::PointSet;
use crate::error::{invalid, Result};
use crate::radial::RadialLaw;
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

const GRID_CHECK: usize = 10_000;
const GLOBAL_TOL: f64 = 1e-8;

type CurveFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A global maximum `s_i` of `ℓ(s) = √(u² + v²)`, with `m_i = ℓ(s_i)` and
/// `τ_i² = −m_i/ℓ″(s_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveMaximum {
    pub s: f64,
    pub m: f64,
    pub tau_sq: f64,
}

/// `T (u(S), v(S))` with `S` uniform on `[0, 1]` and `(u, v)` a closed simple curve.
#[derive(Clone)]
pub struct CurveModel {
    u: CurveFn,
    v: CurveFn,
    pub radial: RadialLaw,
    maxima: Vec<CurveMaximum>,
    label: String,
}

impl fmt::Debug for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveModel")
            .field("label", &self.label)
            .field("radial", &self.radial)
            .field("maxima", &self.maxima)
            .finish()
    }
}

impl PartialEq for CurveModel {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label && self.radial == other.radial && self.maxima == other.maxima
    }
}

impl CurveModel {
    /// Builds the model from caller-supplied maxima, which are verified: each
    /// must have `ℓ″ < 0` and together they must be global on a fine grid.
    pub fn new(
        u: impl Fn(f64) -> f64 + Send + Sync + 'static,
        v: impl Fn(f64) -> f64 + Send + Sync + 'static,
        maxima_at: &[f64],
        radial: RadialLaw,
        label: impl Into<String>,
    ) -> Result<Self> {
        let (u, v): (CurveFn, CurveFn) = (Arc::new(u), Arc::new(v));
        let ell = |s: f64| u(s).hypot(v(s));
        if maxima_at.is_empty() {
            return Err(invalid("at least one maximum is required"));
        }
        let mut maxima = Vec::with_capacity(maxima_at.len());
        for &s in maxima_at {
            if !(s > 0.0 && s < 1.0) {
                return Err(invalid(format!("maximum location {s} outside (0, 1)")));
            }
            let h = 1e-4;
            let m = ell(s);
            let second = (ell(s + h) - 2.0 * m + ell(s - h)) / (h * h);
            if !(second < 0.0) {
                return Err(invalid(format!("ℓ''({s}) = {second} is not negative")));
            }
            maxima.push(CurveMaximum { s, m, tau_sq: -m / second });
        }
        let top = maxima.iter().map(|c| c.m).fold(f64::NEG_INFINITY, f64::max);
        for k in 0..=GRID_CHECK {
            let s = k as f64 / GRID_CHECK as f64;
            if ell(s) > top + GLOBAL_TOL {
                return Err(invalid(format!("ℓ({s}) = {} exceeds the supplied maxima ({top})", ell(s))));
            }
        }
        Ok(Self { u, v, radial, maxima, label: label.into() })
    }

    /// `u = cos 2πs`, `v = cos(2πs − U₀)` with `cos U₀ = ρ`: the bivariate
    /// elliptical law with correlation `ρ`.
    pub fn ellipse(rho: f64, radial: RadialLaw) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(invalid(format!("correlation must lie in (0, 1), got {rho}")));
        }
        let u0 = rho.acos();
        let s1 = u0 / (4.0 * PI);
        let mut model = Self::new(
            |s| (TAU * s).cos(),
            move |s| (TAU * s - u0).cos(),
            &[s1, s1 + 0.5],
            radial,
            format!("preset=ellipse,rho={rho}"),
        )?;
        // Replace the finite-difference curvature by the closed form −8π²ρ/m.
        for c in &mut model.maxima {
            c.tau_sq = c.m * c.m / (8.0 * PI * PI * rho);
        }
        Ok(model)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn maxima(&self) -> &[CurveMaximum] {
        &self.maxima
    }

    pub fn point(&self, s: f64) -> (f64, f64) {
        ((self.u)(s), (self.v)(s))
    }

    /// `max_i m_i`.
    pub fn top_level(&self) -> f64 {
        self.maxima.iter().map(|c| c.m).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Σ τ_i` over maxima at the top level.
    pub fn tau_total(&self) -> f64 {
        let m = self.top_level();
        self.maxima.iter().filter(|c| c.m >= m - GLOBAL_TOL).map(|c| c.tau_sq.sqrt()).sum()
    }

    /// `γ′(s)` by central differences.
    pub fn tangent(&self, s: f64) -> (f64, f64) {
        let h = 1e-6;
        let (a, b) = (self.point(s + h), self.point(s - h));
        ((a.0 - b.0) / (2.0 * h), (a.1 - b.1) / (2.0 * h))
    }

    /// `v′(s)`.
    pub fn v_prime(&self, s: f64) -> f64 {
        self.tangent(s).1
    }

    /// `ℓ″(s_i) = −m_i/τ_i²`.
    pub fn ell_second(&self, c: &CurveMaximum) -> f64 {
        -c.m / c.tau_sq
    }

    /// Angular spread of large points near maximum `c`, in units of `φ(x)`:
    /// `|γ′(s_i)| τ_i / m_i`.
    pub fn angular_slope(&self, c: &CurveMaximum) -> f64 {
        let (du, dv) = self.tangent(c.s);
        du.hypot(dv) * c.tau_sq.sqrt() / c.m
    }

    /// The pair of maxima with `γ(s_i)` and `γ(s_j)` farthest apart.
    pub fn extreme_pair(&self) -> Result<(CurveMaximum, CurveMaximum)> {
        if self.maxima.len() < 2 {
            return Err(invalid("diameter limit needs two maxima"));
        }
        let mut best = (f64::NEG_INFINITY, 0, 1);
        for i in 0..self.maxima.len() {
            for j in i + 1..self.maxima.len() {
                let (a, b) = (self.point(self.maxima[i].s), self.point(self.maxima[j].s));
                let d = (a.0 - b.0).hypot(a.1 - b.1);
                if d > best.0 {
                    best = (d, i, j);
                }
            }
        }
        Ok((self.maxima[best.1], self.maxima[best.2]))
    }

    pub fn sample_cloud<S: Scalar>(&self, n: usize, seed: u64) -> Result<PointSet<S>> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let mut rng = rng_from_seed(seed);
        let mut coords = Vec::with_capacity(2 * n);
        for _ in 0..n {
            let s = rng.random::<f64>();
            let t = self.radial.sample(&mut rng);
            let (x, y) = self.point(s);
            coords.push(S::of(t * x));
            coords.push(S::of(t * y));
        }
        PointSet::new(2, coords)
    }
}
