//! Positive radial laws in the Gumbel max-domain of attraction.
//!
//! Each law carries its survival function (also in log space), an auxiliary
//! function `ψ` governing the width of its upper tail, a quantile function and
//! a sampler.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, SimRng};
use crate::roots::solve_decreasing_positive;
use crate::special::{ln_gamma, ln_gamma_q, ln_normal_sf, mills_ratio};

/// Relative tolerance for numerically inverted quantiles.
pub const QUANTILE_REL_TOL: f64 = 1e-12;

/// A built-in radial law.
///
/// | law | survival | `ψ(x)` |
/// |-----|----------|--------|
/// | `exponential(r)` | `e^{-r x}` | `1/r` |
/// | `weibull(τ)` | `e^{-x^τ}` | `x^{1-τ}/τ` |
/// | `chi(d)` | `Q(d/2, x²/2)` | exact hazard reciprocal `S(x)/f(x)`, asymptotically `1/x` |
/// | `lognormal(μ,σ)` | `Φ̄((log x - μ)/σ)` | exact hazard reciprocal `σ x R(z)`, `R` the Mills ratio |
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase")]
pub enum RadialLaw {
    Exponential { rate: f64 },
    Weibull { shape: f64 },
    Chi { dof: f64 },
    LogNormal { mu: f64, sigma: f64 },
}

impl RadialLaw {
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::Exponential { rate }.validated()
    }

    pub fn weibull(shape: f64) -> Result<Self> {
        Self::Weibull { shape }.validated()
    }

    pub fn chi(dof: f64) -> Result<Self> {
        Self::Chi { dof }.validated()
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        Self::LogNormal { mu, sigma }.validated()
    }

    fn validated(self) -> Result<Self> {
        let ok = match self {
            Self::Exponential { rate } => rate.is_finite() && rate > 0.0,
            Self::Weibull { shape } => shape.is_finite() && shape > 0.0,
            Self::Chi { dof } => dof.is_finite() && dof > 0.0,
            Self::LogNormal { mu, sigma } => mu.is_finite() && sigma.is_finite() && sigma > 0.0,
        };
        if ok {
            Ok(self)
        } else {
            Err(invalid(format!("radial law parameters out of range: {self}")))
        }
    }

    /// `log P(T > x)`.
    pub fn log_survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            Self::Exponential { rate } => -rate * x,
            Self::Weibull { shape } => -x.powf(shape),
            Self::Chi { dof } => ln_gamma_q(0.5 * dof, 0.5 * x * x),
            Self::LogNormal { mu, sigma } => ln_normal_sf((x.ln() - mu) / sigma),
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        self.log_survival(x).exp()
    }

    /// Log density at `x > 0`.
    pub fn log_density(&self, x: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => rate.ln() - rate * x,
            Self::Weibull { shape } => shape.ln() + (shape - 1.0) * x.ln() - x.powf(shape),
            Self::Chi { dof } => {
                (dof - 1.0) * x.ln() - 0.5 * x * x
                    - (0.5 * dof - 1.0) * std::f64::consts::LN_2
                    - ln_gamma(0.5 * dof)
            }
            Self::LogNormal { mu, sigma } => {
                let z = (x.ln() - mu) / sigma;
                -0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI).ln() - (sigma * x).ln()
            }
        }
    }

    /// The auxiliary function `ψ_T(x)`; see the type-level table for the form used.
    pub fn auxiliary_at(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(invalid(format!("auxiliary function needs x > 0, got {x}")));
        }
        Ok(self.psi(x))
    }

    pub(crate) fn psi(&self, x: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Weibull { shape } => x.powf(1.0 - shape) / shape,
            Self::Chi { .. } => (self.log_survival(x) - self.log_density(x)).exp(),
            Self::LogNormal { mu, sigma } => sigma * x * mills_ratio((x.ln() - mu) / sigma),
        }
    }

    /// Returns `x` with `log P(T > x) = log_target` (`log_target < 0`).
    pub fn inverse_log_survival(&self, log_target: f64) -> Result<f64> {
        if !(log_target < 0.0) {
            return Err(invalid(format!("log survival target must be negative, got {log_target}")));
        }
        let e = -log_target;
        match *self {
            Self::Exponential { rate } => Ok(e / rate),
            Self::Weibull { shape } => Ok(e.powf(1.0 / shape)),
            Self::Chi { dof } => {
                let guess = (2.0 * e + (dof - 2.0).max(0.0) * (1.0 + e).ln()).sqrt().max(1e-3);
                solve_decreasing_positive(|x| self.log_survival(x) - log_target, guess, QUANTILE_REL_TOL)
            }
            Self::LogNormal { mu, sigma } => {
                let guess = (mu + sigma * (2.0 * e).sqrt() - sigma).exp();
                solve_decreasing_positive(|x| self.log_survival(x) - log_target, guess, QUANTILE_REL_TOL)
            }
        }
    }

    /// Quantile of order `p`, the point where `P(T > x) = 1 - p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!("quantile order must lie in (0, 1), got {p}")));
        }
        self.inverse_log_survival((-p).ln_1p())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Exponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                e / rate
            }
            Self::Weibull { shape } => {
                let e: f64 = Exp1.sample(rng);
                e.powf(1.0 / shape)
            }
            Self::Chi { dof } => ChiSquared::new(dof).expect("validated dof").sample(rng).sqrt(),
            Self::LogNormal { mu, sigma } => LogNormal::new(mu, sigma).expect("validated sigma").sample(rng),
        }
    }

    /// `count` i.i.d. draws from a generator seeded with `seed`.
    pub fn sample_radial(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(invalid("count must be at least 1"));
        }
        let mut rng: SimRng = rng_from_seed(seed);
        Ok((0..count).map(|_| self.sample(&mut rng)).collect())
    }

    /// `E[T²]`.
    pub fn second_moment(&self) -> f64 {
        match *self {
            Self::Exponential { rate } => 2.0 / (rate * rate),
            Self::Weibull { shape } => (ln_gamma(1.0 + 2.0 / shape)).exp(),
            Self::Chi { dof } => dof,
            Self::LogNormal { mu, sigma } => (2.0 * mu + 2.0 * sigma * sigma).exp(),
        }
    }
}

impl fmt::Display for RadialLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Exponential { rate } => write!(f, "exponential:{rate}"),
            Self::Weibull { shape } => write!(f, "weibull:{shape}"),
            Self::Chi { dof } => write!(f, "chi:{dof}"),
            Self::LogNormal { mu, sigma } => write!(f, "lognormal:{mu},{sigma}"),
        }
    }
}

fn parse_num(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("{what}: cannot parse '{s}' as a number")))
}

impl FromStr for RadialLaw {
    type Err = Error;

    /// Parses `exponential:RATE`, `weibull:SHAPE`, `chi:D` or `lognormal:MU,SIGMA`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("radial law '{s}' must look like name:params")))?;
        match name.trim().to_ascii_lowercase().as_str() {
            "exponential" | "exp" => Self::exponential(parse_num(args, "exponential rate")?),
            "weibull" => Self::weibull(parse_num(args, "weibull shape")?),
            "chi" => Self::chi(parse_num(args, "chi degrees of freedom")?),
            "lognormal" => {
                let (mu, sigma) = args
                    .split_once(',')
                    .ok_or_else(|| Error::Parse("lognormal needs MU,SIGMA".into()))?;
                Self::lognormal(parse_num(mu, "lognormal mu")?, parse_num(sigma, "lognormal sigma")?)
            }
            other => Err(Error::Parse(format!("unknown radial law '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtins() -> Vec<RadialLaw> {
        vec![
            RadialLaw::exponential(1.0).unwrap(),
            RadialLaw::exponential(2.5).unwrap(),
            RadialLaw::weibull(2.0).unwrap(),
            RadialLaw::weibull(0.7).unwrap(),
            RadialLaw::chi(2.0).unwrap(),
            RadialLaw::chi(5.0).unwrap(),
            RadialLaw::lognormal(0.0, 1.0).unwrap(),
            RadialLaw::lognormal(0.5, 0.4).unwrap(),
        ]
    }

    #[test]
    fn closed_form_quantiles() {
        let q = RadialLaw::exponential(1.0).unwrap().quantile(1.0 - 1e-3).unwrap();
        assert!((q - 1000f64.ln()).abs() < 1e-9);
        assert!((q - 6.907755).abs() < 1e-6);
        let q = RadialLaw::weibull(2.0).unwrap().quantile(1.0 - 1e-2).unwrap();
        assert!((q - 100f64.ln().sqrt()).abs() < 1e-9);
        assert!((q - 2.145966).abs() < 1e-6);
    }

    #[test]
    fn chi3_median_matches_monte_carlo() {
        let law = RadialLaw::chi(3.0).unwrap();
        let median = law.quantile(0.5).unwrap();
        let n = 1_000_000;
        let mut draws = law.sample_radial(n, 11).unwrap();
        draws.sort_by(f64::total_cmp);
        let mc = 0.5 * (draws[n / 2 - 1] + draws[n / 2]);
        // s.e. of a sample median: 1 / (2 f(m) sqrt(n))
        let se = 1.0 / (2.0 * law.log_density(median).exp() * (n as f64).sqrt());
        assert!((median - mc).abs() < 3.0 * se, "{median} vs {mc} (se {se})");
    }

    #[test]
    fn sampler_moments() {
        let n = 1_000_000;
        let exp = RadialLaw::exponential(1.0).unwrap().sample_radial(n, 1).unwrap();
        let mean = exp.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3e-3);

        let wb = RadialLaw::weibull(2.0).unwrap().sample_radial(n, 2).unwrap();
        let frac = wb.iter().filter(|&&t| t > 1.0).count() as f64 / n as f64;
        let p = (-1f64).exp();
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((frac - p).abs() < 3.0 * se);

        let chi = RadialLaw::chi(2.0).unwrap().sample_radial(n, 3).unwrap();
        let m2 = chi.iter().map(|t| t * t).sum::<f64>() / n as f64;
        assert!((m2 / 2.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn auxiliary_examples() {
        assert_eq!(RadialLaw::exponential(1.0).unwrap().auxiliary_at(5.0).unwrap(), 1.0);
        assert!((RadialLaw::weibull(2.0).unwrap().auxiliary_at(2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(RadialLaw::exponential(1.0).unwrap().auxiliary_at(0.0).is_err());
        assert!(RadialLaw::exponential(1.0).unwrap().auxiliary_at(-1.0).is_err());
    }

    #[test]
    fn chi5_auxiliary_matches_numeric_hazard() {
        let law = RadialLaw::chi(5.0).unwrap();
        let x = 10.0;
        let h = 1e-5;
        let hazard = -(law.log_survival(x + h) - law.log_survival(x - h)) / (2.0 * h);
        let psi = law.auxiliary_at(x).unwrap();
        assert!((psi * hazard - 1.0).abs() < 1e-2);
    }

    #[test]
    fn hazard_consistency_at_large_x() {
        for law in builtins() {
            let x = law.inverse_log_survival(-200.0).unwrap();
            let h = 1e-6 * x;
            let hazard = -(law.log_survival(x + h) - law.log_survival(x - h)) / (2.0 * h);
            let psi = law.psi(x);
            assert!((psi * hazard - 1.0).abs() < 1e-3, "{law}: psi*hazard = {}", psi * hazard);
        }
    }

    #[test]
    fn survival_is_monotone_and_bounded() {
        for law in builtins() {
            let mut prev = 1.0;
            for i in 1..400 {
                let s = law.survival(0.05 * i as f64);
                assert!(s <= prev && s > 0.0 && s <= 1.0, "{law} at {}", 0.05 * i as f64);
                prev = s;
            }
        }
    }

    #[test]
    fn psi_over_x_vanishes_in_the_far_tail() {
        // At survival 1e-6 the exponential law still has psi/x = 1/log(1e6), so
        // the ratio is probed where log survival = -6000.
        for law in builtins() {
            let x = law.inverse_log_survival(-6000.0).unwrap();
            assert!(law.psi(x) / x < 0.01, "{law}: {}", law.psi(x) / x);
        }
        let exp = RadialLaw::exponential(1.0).unwrap();
        let x = exp.quantile(1.0 - 1e-6).unwrap();
        assert!((exp.psi(x) / x - 1.0 / 1e6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn von_mises_rescaling() {
        let zs = [-1.0, 0.0, 1.0, 2.0];
        let check = |law: &RadialLaw, log_level: f64| {
            let x = law.inverse_log_survival(log_level).unwrap();
            let psi = law.psi(x);
            for z in zs {
                let ratio = (law.log_survival(x + psi * z) - law.log_survival(x)).exp();
                let target = (-z).exp();
                assert!((ratio / target - 1.0).abs() < 0.05, "{law} z={z}: {ratio} vs {target}");
            }
        };
        // The exponential law is exact at any level.
        check(&RadialLaw::exponential(1.0).unwrap(), (1e-4f64).ln());
        // Weibull-type tails reach the 5 % band only deeper in the tail.
        for law in builtins() {
            check(&law, -2000.0);
        }
    }

    #[test]
    fn quantile_inverts_survival() {
        for law in builtins() {
            for i in 1..=100 {
                let x = 0.08 * i as f64;
                let ls = law.log_survival(x);
                if ls >= -1e-13 {
                    continue;
                }
                let back = law.inverse_log_survival(ls).unwrap();
                assert!((back / x - 1.0).abs() < 1e-9, "{law} at {x}: {back}");
            }
        }
    }

    #[test]
    fn seeded_draws_are_reproducible() {
        for law in builtins() {
            assert_eq!(law.sample_radial(100, 5).unwrap(), law.sample_radial(100, 5).unwrap());
        }
    }

    #[test]
    fn parse_round_trip() {
        for law in builtins() {
            let back: RadialLaw = law.to_string().parse().unwrap();
            assert_eq!(back, law);
        }
        assert!("weibull:-1".parse::<RadialLaw>().is_err());
        assert!("gamma:2".parse::<RadialLaw>().is_err());
        assert!("lognormal:1".parse::<RadialLaw>().is_err());
        assert_eq!("exponential:1".parse::<RadialLaw>().unwrap(), RadialLaw::Exponential { rate: 1.0 });
    }
}
