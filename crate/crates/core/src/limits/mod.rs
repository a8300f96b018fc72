//! Exact samplers and, where available, cdfs of the limiting diameter laws.

mod ppp;
mod zq;

pub use ppp::{ppp_points, DoubleMax, PoissonGumbelStream};
pub use zq::{sample_zq, ZqLaw};

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::models::{CloudModel, CurveModel, EllipticalModel};
use crate::params::Params;
use crate::quad::trapezoid;
use crate::rng::{mix_seed, rng_from_seed, SimRng};
use ppp::{double_max, MarkedStream};

/// Largest dimension for which the `2^{d−1}` diagonals of the `q < 2` law are enumerated.
pub const MAX_DIAGONAL_DIM: usize = 20;

/// Points visited by default in the cdf Monte Carlo fallback.
pub const CDF_MC_DRAWS: usize = 100_000;

/// How the `q < 2` limit is sampled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LqForm {
    /// Marked point processes with the quadratic penalty.
    Penalty,
    /// Only valid for `q = 1`: the largest of `2^{d−1}` sums of two Gumbel variables.
    Direct,
}

/// Which penalty coefficient the curve and anisotropic laws use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyForm {
    /// Coefficient obtained from the second-order expansion of the distance.
    Derived,
    /// The coefficient in its originally displayed form.
    Displayed,
}

/// A limiting law for a normalized diameter or maximum.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum LimitLaw {
    /// `e^{−e^{−z}}`.
    Gumbel,
    /// `Γ⁺₁ + Γ⁻₁` of two processes with mean measure `c e^{−x} dx`.
    GumbelSum { intensity: f64 },
    /// `max_{i,j} Γ⁺_i + Γ⁻_j − ¼ Σ τ_q² (G⁺_{i,q} − G⁻_{j,q})²`, intensity ½.
    DiamK1 { tau_sq: Vec<f64> },
    DiamKge2,
    /// Largest over `d` axes of `Γ⁺₁ + Γ⁻₁`, intensity `1/(2d)`.
    DiamLqGt2 { d: usize },
    /// Largest over `2^{d−1}` diagonals of the penalized double maximum, intensity `2^{−d}`.
    DiamLqLt2 { d: usize, q: f64, form: LqForm },
    DiamCone,
    /// `max m₁Γ⁺_i + m₂Γ⁻_j − m₁m₂/(2(m₁+m₂)) (κ₁G⁺_i − κ₂G⁻_j)²`.
    DiamCurve { levels: [f64; 2], slopes: [f64; 2], intensities: [f64; 2] },
    /// Double maximum with `Z_q` marks, intensity ½.
    DiamAniso { a: f64, q: f64, form: PenaltyForm },
}

impl LimitLaw {
    /// Diameter limit for `model` (derived penalty forms).
    pub fn for_model(model: &CloudModel) -> Result<Self> {
        Ok(match model {
            CloudModel::Elliptical(m) if m.multiplicity() == 1 => Self::diam_k1(m)?,
            CloudModel::Elliptical(_) => Self::DiamKge2,
            CloudModel::SphericalLq(m) if m.q() > 2.0 => Self::DiamLqGt2 { d: m.dim() },
            CloudModel::SphericalLq(m) => Self::diam_lq_lt2(m.dim(), m.q(), LqForm::Penalty)?,
            CloudModel::Cone(m) if m.is_trivial_regime() => Self::Gumbel,
            CloudModel::Cone(_) => Self::DiamCone,
            CloudModel::Curve(m) => Self::diam_curve(m, PenaltyForm::Derived)?,
            CloudModel::Aniso(m) => Self::diam_aniso(m.amplitude(), m.exponent(), PenaltyForm::Derived)?,
        })
    }

    /// `τ_q² = λ_q/(λ₁ − λ_q)` of a model with a simple top eigenvalue.
    pub fn diam_k1(model: &EllipticalModel) -> Result<Self> {
        if model.multiplicity() != 1 {
            return Err(invalid("diam-k1 needs a simple top eigenvalue"));
        }
        Ok(Self::DiamK1 { tau_sq: model.tau_sq() })
    }

    /// Bivariate case: `τ² = (1 − ρ)/(2ρ)`.
    pub fn diam_k1_bivariate(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(invalid(format!("correlation must lie in (0, 1), got {rho}")));
        }
        Ok(Self::DiamK1 { tau_sq: vec![(1.0 - rho) / (2.0 * rho)] })
    }

    pub fn diam_lq_lt2(d: usize, q: f64, form: LqForm) -> Result<Self> {
        if !(2..=MAX_DIAGONAL_DIM).contains(&d) {
            return Err(invalid(format!("diam-lq-lt2 needs 2 <= d <= {MAX_DIAGONAL_DIM}, got {d}")));
        }
        if !(1.0..2.0).contains(&q) {
            return Err(invalid(format!("diam-lq-lt2 needs q in [1, 2), got {q}")));
        }
        if form == LqForm::Direct && q != 1.0 {
            return Err(invalid("the direct construction only applies to q = 1"));
        }
        Ok(Self::DiamLqLt2 { d, q, form })
    }

    /// Uses the farthest pair of maxima, which must both be at the top level.
    pub fn diam_curve(model: &CurveModel, form: PenaltyForm) -> Result<Self> {
        let (p, q) = model.extreme_pair()?;
        let top = model.top_level();
        if (top - p.m).abs() > 1e-8 * top || (top - q.m).abs() > 1e-8 * top {
            return Err(invalid("the farthest maxima must both reach the top level of ℓ"));
        }
        let total = model.tau_total();
        let slopes = match form {
            PenaltyForm::Derived => [model.angular_slope(&p), model.angular_slope(&q)],
            PenaltyForm::Displayed => {
                [model.v_prime(p.s) / model.ell_second(&p), model.v_prime(q.s) / model.ell_second(&q)]
            }
        };
        Ok(Self::DiamCurve {
            levels: [p.m, q.m],
            slopes,
            intensities: [p.tau_sq.sqrt() / total, q.tau_sq.sqrt() / total],
        })
    }

    pub fn diam_aniso(a: f64, q: f64, form: PenaltyForm) -> Result<Self> {
        if !(a > 1.0) {
            return Err(invalid(format!("amplitude must exceed 1, got {a}")));
        }
        ZqLaw::new(q)?;
        Ok(Self::DiamAniso { a, q, form })
    }

    /// One exact draw.
    pub fn sample(&self, seed: u64) -> f64 {
        self.sample_detailed(seed).value
    }

    /// One exact draw with the bounds given by the first pair of points.
    pub fn sample_detailed(&self, seed: u64) -> DoubleMax {
        self.sample_forced(seed, 0)
    }

    /// As [`Self::sample_detailed`] but visits at least `forced` points of each stream.
    pub fn sample_forced(&self, seed: u64, forced: usize) -> DoubleMax {
        let stream = |k: u64| mix_seed(seed, k);
        let plain = |v: f64| DoubleMax { value: v, lower: v, upper: v };
        match self {
            Self::Gumbel | Self::DiamKge2 | Self::DiamCone => {
                plain(ppp_points(1.0, stream(0)).expect("unit intensity").next().unwrap_or(0.0))
            }
            Self::GumbelSum { intensity } => plain(first_sum(*intensity, stream(0), stream(1))),
            Self::DiamK1 { tau_sq } => {
                let dim = tau_sq.len();
                let mut plus = MarkedStream::new(0.5, 1.0, stream(0), dim, gaussian_marks);
                let mut minus = MarkedStream::new(0.5, 1.0, stream(1), dim, gaussian_marks);
                let pen = |a: &[f64], b: &[f64]| {
                    0.25 * tau_sq.iter().zip(a.iter().zip(b)).map(|(t, (x, y))| t * (x - y).powi(2)).sum::<f64>()
                };
                double_max(&mut plus, &mut minus, pen, f64::NEG_INFINITY, forced)
            }
            Self::DiamLqGt2 { d } => {
                let c = 0.5 / *d as f64;
                let v = (0..*d as u64)
                    .map(|j| first_sum(c, stream(2 * j), stream(2 * j + 1)))
                    .fold(f64::NEG_INFINITY, f64::max);
                plain(v)
            }
            Self::DiamLqLt2 { d, q, form: LqForm::Direct } => {
                debug_assert_eq!(*q, 1.0);
                let mut rng = rng_from_seed(stream(0));
                let shift = *d as f64 * LN_2;
                let v = (0..1u64 << (d - 1))
                    .map(|_| standard_gumbel(&mut rng) + standard_gumbel(&mut rng) - 2.0 * shift)
                    .fold(f64::NEG_INFINITY, f64::max);
                plain(v)
            }
            Self::DiamLqLt2 { d, q, form: LqForm::Penalty } => {
                let (d, q) = (*d, *q);
                let c = (-(d as f64) * LN_2).exp();
                let marks = |rng: &mut SimRng, out: &mut [f64]| centered_gaussian(rng, out, q);
                let coef = 0.25 * (q - 1.0);
                let pen = |a: &[f64], b: &[f64]| coef * a.iter().zip(b).map(|(x, y)| (x + y).powi(2)).sum::<f64>();
                let mut best = f64::NEG_INFINITY;
                let mut first = None;
                for j in 0..1u64 << (d - 1) {
                    let mut plus = MarkedStream::new(c, 1.0, stream(2 * j), d, marks);
                    let mut minus = MarkedStream::new(c, 1.0, stream(2 * j + 1), d, marks);
                    let r = double_max(&mut plus, &mut minus, pen, best, forced);
                    best = r.value;
                    first.get_or_insert(r);
                }
                let first = first.expect("at least one diagonal");
                DoubleMax { value: best, ..first }
            }
            Self::DiamCurve { levels, slopes, intensities } => {
                let [m1, m2] = *levels;
                let [k1, k2] = *slopes;
                let mut plus = MarkedStream::new(intensities[0], m1, stream(0), 1, gaussian_marks);
                let mut minus = MarkedStream::new(intensities[1], m2, stream(1), 1, gaussian_marks);
                let coef = m1 * m2 / (2.0 * (m1 + m2));
                let pen = |a: &[f64], b: &[f64]| coef * (k1 * a[0] - k2 * b[0]).powi(2);
                double_max(&mut plus, &mut minus, pen, f64::NEG_INFINITY, forced)
            }
            Self::DiamAniso { a, q, form } => {
                let zq = ZqLaw::new(*q).expect("validated exponent");
                let (coef, power) = match form {
                    PenaltyForm::Derived => (0.25 / (a * a - 1.0), *q),
                    PenaltyForm::Displayed => (a.powf(1.0 - 1.0 / q) / (4.0 * (a * a - 1.0).powf(0.5 / q)), 1.0),
                };
                let marks = |rng: &mut SimRng, out: &mut [f64]| {
                    let z = zq.sample(rng);
                    out[0] = z.abs().powf(power).copysign(z);
                };
                let mut plus = MarkedStream::new(0.5, 1.0, stream(0), 1, marks);
                let mut minus = MarkedStream::new(0.5, 1.0, stream(1), 1, marks);
                let pen = |x: &[f64], y: &[f64]| coef * (x[0] - y[0]).powi(2);
                double_max(&mut plus, &mut minus, pen, f64::NEG_INFINITY, forced)
            }
        }
    }

    /// `count` draws, draw `i` seeded by `mix_seed(seed, i)`; order is deterministic.
    pub fn sample_many(&self, count: usize, seed: u64) -> Vec<f64> {
        (0..count as u64).into_par_iter().map(|i| self.sample(mix_seed(seed, i))).collect()
    }

    /// Closed-form or numerically integrated cdf, when one exists.
    pub fn exact_cdf(&self, z: f64) -> Option<f64> {
        match self {
            Self::Gumbel | Self::DiamKge2 | Self::DiamCone => Some(gumbel_cdf(z)),
            Self::GumbelSum { intensity } => Some(gumbel_sum_cdf(z - 2.0 * intensity.ln())),
            Self::DiamLqGt2 { d } => {
                let d = *d as f64;
                Some(gumbel_sum_cdf(z + 2.0 * (2.0 * d).ln()).powf(d))
            }
            Self::DiamLqLt2 { d, q, .. } if *q == 1.0 => {
                let f = gumbel_sum_cdf(z + 2.0 * *d as f64 * LN_2);
                Some(f.powf((1u64 << (d - 1)) as f64))
            }
            Self::DiamK1 { tau_sq } if tau_sq.iter().all(|&t| t == 0.0) => Some(gumbel_sum_cdf(z + 2.0 * LN_2)),
            _ => None,
        }
    }

    pub fn has_exact_cdf(&self) -> bool {
        self.exact_cdf(0.0).is_some()
    }
}

/// A cdf value; Monte Carlo values carry their draw count and standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CdfValue {
    pub p: f64,
    pub draws: Option<usize>,
    pub std_error: Option<f64>,
}

/// `P(L ≤ z)`, by Monte Carlo with [`CDF_MC_DRAWS`] draws when no exact form exists.
pub fn cdf_limit(law: &LimitLaw, z: f64) -> CdfValue {
    cdf_limit_mc(law, z, CDF_MC_DRAWS, 0)
}

/// As [`cdf_limit`] with an explicit Monte Carlo budget and seed.
pub fn cdf_limit_mc(law: &LimitLaw, z: f64, draws: usize, seed: u64) -> CdfValue {
    if let Some(p) = law.exact_cdf(z) {
        return CdfValue { p, draws: None, std_error: None };
    }
    let hits = law.sample_many(draws, seed).iter().filter(|&&v| v <= z).count();
    let p = hits as f64 / draws as f64;
    CdfValue { p, draws: Some(draws), std_error: Some((p * (1.0 - p) / draws as f64).sqrt()) }
}

pub fn gumbel_cdf(z: f64) -> f64 {
    (-(-z).exp()).exp()
}

/// `P(G₁ + G₂ ≤ s)` for independent standard Gumbel variables:
/// `∫₀^∞ exp(−u − e^{−s}/u) du`, integrated in `t = log u`.
pub fn gumbel_sum_cdf(s: f64) -> f64 {
    let ln_w = -s;
    // Outside [ln w − 4, 4] one of e^t, w e^{−t} exceeds e^4 ≈ 55; below −46, e^t < 1e−20.
    let (lo, hi) = ((ln_w - 4.5).max(-46.0), 4.5f64.max(0.5 * ln_w + 1.0));
    if lo >= hi {
        return 0.0;
    }
    let w = ln_w.exp();
    let f = |t: f64| (t - t.exp() - w * (-t).exp()).exp();
    trapezoid(f, lo, hi, 4096).min(1.0)
}

fn first_sum(intensity: f64, seed_plus: u64, seed_minus: u64) -> f64 {
    let mut p = ppp_points(intensity, seed_plus).expect("positive intensity");
    let mut m = ppp_points(intensity, seed_minus).expect("positive intensity");
    p.next().unwrap_or(0.0) + m.next().unwrap_or(0.0)
}

fn standard_gumbel<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return -(-u.ln()).ln();
        }
    }
}

fn gaussian_marks(rng: &mut SimRng, out: &mut [f64]) {
    for o in out {
        *o = rng.sample(StandardNormal);
    }
}

/// Gaussian vector with covariance `(I − 11ᵀ/d)/(2 − q)`.
fn centered_gaussian(rng: &mut SimRng, out: &mut [f64], q: f64) {
    gaussian_marks(rng, out);
    let mean = out.iter().sum::<f64>() / out.len() as f64;
    let s = (2.0 - q).sqrt().recip();
    for o in out.iter_mut() {
        *o = (*o - mean) * s;
    }
}

/// Covariance of the marks of the `q < 2` law: `(d−1)/(d(2−q))` on the
/// diagonal and `−1/(d(2−q))` elsewhere.
pub fn lq_mark_covariance(d: usize, q: f64) -> Vec<Vec<f64>> {
    let s = 1.0 / (d as f64 * (2.0 - q));
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { (d as f64 - 1.0) * s } else { -s }).collect())
        .collect()
}

/// A Gaussian pair with common variance `variance` and correlation `rho`.
pub fn sample_correlated_pair<R: Rng + ?Sized>(rng: &mut R, rho: f64, variance: f64) -> (f64, f64) {
    let (z1, z2): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
    let s = variance.sqrt();
    (s * z1, s * (rho * z1 + (1.0 - rho * rho).sqrt() * z2))
}

/// One draw of `law`.
pub fn sample_limit(law: &LimitLaw, seed: u64) -> f64 {
    law.sample(seed)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

impl fmt::Display for LimitLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gumbel => write!(f, "gumbel"),
            Self::GumbelSum { intensity } => write!(f, "gumbel-sum:c={intensity}"),
            Self::DiamK1 { tau_sq } => write!(f, "diam-k1:tau2={}", fmt_list(tau_sq)),
            Self::DiamKge2 => write!(f, "diam-kge2"),
            Self::DiamLqGt2 { d } => write!(f, "diam-lq-gt2:d={d}"),
            Self::DiamLqLt2 { d, q, form } => {
                let form = if *form == LqForm::Direct { "direct" } else { "penalty" };
                write!(f, "diam-lq-lt2:d={d},q={q},form={form}")
            }
            Self::DiamCone => write!(f, "diam-cone"),
            Self::DiamCurve { levels, slopes, intensities } => write!(
                f,
                "diam-curve:m1={},m2={},k1={},k2={},p1={},p2={}",
                levels[0], levels[1], slopes[0], slopes[1], intensities[0], intensities[1]
            ),
            Self::DiamAniso { a, q, form } => {
                let form = if *form == PenaltyForm::Derived { "derived" } else { "displayed" };
                write!(f, "diam-aniso:a={a},q={q},form={form}")
            }
        }
    }
}

impl FromStr for LimitLaw {
    type Err = Error;

    /// `gumbel`, `gumbel-sum[:c=C]`, `diam-k1:rho=R` or `diam-k1:tau2=T1;T2`,
    /// `diam-kge2`, `diam-lq-gt2:d=D`, `diam-lq-lt2:d=D,q=Q[,form=penalty|direct]`,
    /// `diam-cone`, `diam-curve:preset=ellipse,rho=R[,form=derived|displayed]` or
    /// `diam-curve:m1=..,m2=..,k1=..,k2=..,p1=..,p2=..`, `diam-aniso:a=A,q=Q[,form=..]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let p = Params::parse(rest)?;
        let penalty_form = |p: &Params| match p.get("form") {
            None | Some("derived") => Ok(PenaltyForm::Derived),
            Some("displayed") => Ok(PenaltyForm::Displayed),
            Some(o) => Err(Error::Parse(format!("unknown form '{o}' (derived|displayed)"))),
        };
        match family {
            "gumbel" => {
                p.only(&[])?;
                Ok(Self::Gumbel)
            }
            "gumbel-sum" => {
                p.only(&["c"])?;
                let c = p.num_or("c", 1.0)?;
                if !(c > 0.0) {
                    return Err(invalid(format!("intensity must be positive, got {c}")));
                }
                Ok(Self::GumbelSum { intensity: c })
            }
            "diam-k1" => {
                p.only(&["rho", "tau2"])?;
                if let Some(list) = p.get("tau2") {
                    let tau_sq = list
                        .split(';')
                        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad tau2 entry '{t}'"))))
                        .collect::<Result<Vec<_>>>()?;
                    if tau_sq.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
                        return Err(invalid("tau2 entries must be finite and nonnegative"));
                    }
                    Ok(Self::DiamK1 { tau_sq })
                } else {
                    Self::diam_k1_bivariate(p.num("rho")?)
                }
            }
            "diam-kge2" => {
                p.only(&[])?;
                Ok(Self::DiamKge2)
            }
            "diam-lq-gt2" => {
                p.only(&["d"])?;
                let d = p.int("d")?;
                if d < 1 {
                    return Err(invalid("d must be at least 1"));
                }
                Ok(Self::DiamLqGt2 { d })
            }
            "diam-lq-lt2" => {
                p.only(&["d", "q", "form"])?;
                let form = match p.get("form") {
                    None | Some("penalty") => LqForm::Penalty,
                    Some("direct") => LqForm::Direct,
                    Some(o) => return Err(Error::Parse(format!("unknown form '{o}' (penalty|direct)"))),
                };
                Self::diam_lq_lt2(p.int("d")?, p.num("q")?, form)
            }
            "diam-cone" => {
                p.only(&[])?;
                Ok(Self::DiamCone)
            }
            "diam-curve" => {
                if p.get("preset").is_some() {
                    p.only(&["preset", "rho", "form"])?;
                    if p.get("preset") != Some("ellipse") {
                        return Err(Error::Parse("the only curve preset is 'ellipse'".into()));
                    }
                    let radial = crate::radial::RadialLaw::exponential(1.0)?;
                    Self::diam_curve(&CurveModel::ellipse(p.num("rho")?, radial)?, penalty_form(&p)?)
                } else {
                    p.only(&["m1", "m2", "k1", "k2", "p1", "p2"])?;
                    let levels = [p.num("m1")?, p.num("m2")?];
                    let slopes = [p.num("k1")?, p.num("k2")?];
                    let intensities = [p.num("p1")?, p.num("p2")?];
                    if levels.iter().chain(&intensities).any(|&v| !(v > 0.0)) {
                        return Err(invalid("curve levels and intensities must be positive"));
                    }
                    Ok(Self::DiamCurve { levels, slopes, intensities })
                }
            }
            "diam-aniso" => {
                p.only(&["a", "q", "form"])?;
                Self::diam_aniso(p.num("a")?, p.num("q")?, penalty_form(&p)?)
            }
            other => Err(Error::Parse(format!(
                "unknown limit law '{other}' (gumbel|gumbel-sum|diam-k1|diam-kge2|diam-lq-gt2|\
                 diam-lq-lt2|diam-cone|diam-curve|diam-aniso)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialLaw;
    use crate::stats::{ks_critical_two_sample, ks_one_sample, ks_two_sample};
    use std::f64::consts::PI;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn gumbel_cdf_at_zero() {
        assert!((cdf_limit(&LimitLaw::Gumbel, 0.0).p - (-1f64).exp()).abs() < 1e-15);
        assert!((gumbel_cdf(0.0) - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn gumbel_sum_cdf_limits_and_mean() {
        assert!(gumbel_sum_cdf(-30.0) < 1e-12);
        assert!((gumbel_sum_cdf(40.0) - 1.0).abs() < 1e-12);
        // Mean 2γ: E[X] = ∫ (1{x>0} − F(x)) dx.
        let mean = trapezoid(|x| 1.0 - gumbel_sum_cdf(x), 0.0, 40.0, 40_000)
            - trapezoid(gumbel_sum_cdf, -20.0, 0.0, 20_000);
        assert!((mean - 2.0 * EULER_GAMMA).abs() < 1e-6, "{mean}");
    }

    fn median(mut v: Vec<f64>) -> f64 {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    }

    #[test]
    fn gumbel_sum_cdf_matches_monte_carlo_at_median() {
        let law = LimitLaw::GumbelSum { intensity: 1.0 };
        let n = 10_000_000;
        let draws = law.sample_many(n, 8);
        let m = median(draws.clone());
        let p = gumbel_sum_cdf(m);
        let mc = draws.iter().filter(|&&v| v <= m).count() as f64 / n as f64;
        let se = (0.25 / n as f64).sqrt();
        assert!((p - mc).abs() < 3.0 * se + 1e-9, "{p} vs {mc}");
        assert!((p - 0.5).abs() < 1e-3);
    }

    #[test]
    fn lq_gt2_with_one_axis_is_the_convolution() {
        let law = LimitLaw::DiamLqGt2 { d: 1 };
        for z in [-2.0, 0.0, 1.5] {
            assert!((law.exact_cdf(z).unwrap() - gumbel_sum_cdf(z + 2.0 * 2f64.ln())).abs() < 1e-15);
        }
    }

    #[test]
    fn k1_without_penalty_is_sum_of_shifted_gumbels() {
        let law = LimitLaw::DiamK1 { tau_sq: vec![0.0, 0.0] };
        let n = 200_000;
        let xs = law.sample_many(n, 1);
        let ks = ks_one_sample(&xs, |z| gumbel_sum_cdf(z + 2.0 * LN_2)).unwrap();
        assert!(ks < 1.628 / (n as f64).sqrt(), "{ks}");
    }

    #[test]
    fn bivariate_penalty_coefficient() {
        match LimitLaw::diam_k1_bivariate(0.2).unwrap() {
            LimitLaw::DiamK1 { tau_sq } => assert!((0.25 * tau_sq[0] - 0.5).abs() < 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn k1_bounds_hold_and_forcing_is_harmless() {
        let law = LimitLaw::diam_k1_bivariate(0.2).unwrap();
        for seed in 0..1000 {
            let r = law.sample_detailed(seed);
            assert!(r.lower <= r.value && r.value <= r.upper);
            assert_eq!(law.sample_forced(seed, 30), r);
        }
        let law = LimitLaw::diam_lq_lt2(3, 1.5, LqForm::Penalty).unwrap();
        for seed in 0..200 {
            assert_eq!(law.sample_forced(seed, 10).value, law.sample(seed));
        }
    }

    #[test]
    fn lq_marks_have_the_stated_covariance() {
        let (d, q) = (4, 1.5);
        let mut rng = rng_from_seed(2);
        let n = 200_000;
        let mut acc = vec![vec![0.0; d]; d];
        let mut g = vec![0.0; d];
        for _ in 0..n {
            centered_gaussian(&mut rng, &mut g, q);
            assert!(g.iter().sum::<f64>().abs() < 1e-12);
            for i in 0..d {
                for j in 0..d {
                    acc[i][j] += g[i] * g[j] / n as f64;
                }
            }
        }
        let sigma = lq_mark_covariance(d, q);
        for i in 0..d {
            assert!((sigma[i].iter().sum::<f64>()).abs() < 1e-15);
            for j in 0..d {
                assert!((acc[i][j] - sigma[i][j]).abs() < 0.01, "{i},{j}");
            }
        }
        assert!((sigma[0][0] - 3.0 / (4.0 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn q1_samplers_agree() {
        let n = 200_000;
        let direct = LimitLaw::diam_lq_lt2(3, 1.0, LqForm::Direct).unwrap().sample_many(n, 5);
        let penalty = LimitLaw::diam_lq_lt2(3, 1.0, LqForm::Penalty).unwrap().sample_many(n, 6);
        let ks = ks_two_sample(&direct, &penalty).unwrap();
        assert!(ks < ks_critical_two_sample(0.01, n, n), "{ks}");
        let exact = LimitLaw::diam_lq_lt2(3, 1.0, LqForm::Penalty).unwrap();
        let ks = ks_one_sample(&direct, |z| exact.exact_cdf(z).unwrap()).unwrap();
        assert!(ks < 1.628 / (n as f64).sqrt(), "{ks}");
    }

    #[test]
    fn ellipse_curve_law_is_scaled_k1_law() {
        let rho = 0.2;
        let curve = CurveModel::ellipse(rho, RadialLaw::exponential(1.0).unwrap()).unwrap();
        let law = LimitLaw::diam_curve(&curve, PenaltyForm::Derived).unwrap();
        let m = (1.0 + rho).sqrt();
        match &law {
            LimitLaw::DiamCurve { levels, slopes, intensities } => {
                for i in 0..2 {
                    assert!((levels[i] - m).abs() < 1e-12);
                    assert!((slopes[i].powi(2) - (1.0 - rho) / (2.0 * rho)).abs() < 1e-6);
                    assert!((intensities[i] - 0.5).abs() < 1e-12);
                }
            }
            _ => unreachable!(),
        }
        let n = 200_000;
        let a: Vec<f64> = law.sample_many(n, 3).iter().map(|v| v / m).collect();
        let b = LimitLaw::diam_k1_bivariate(rho).unwrap().sample_many(n, 4);
        let ks = ks_two_sample(&a, &b).unwrap();
        assert!(ks < ks_critical_two_sample(0.01, n, n), "{ks}");
    }

    #[test]
    fn displayed_curve_coefficients_differ_from_derived() {
        let curve = CurveModel::ellipse(0.2, RadialLaw::exponential(1.0).unwrap()).unwrap();
        let shown = LimitLaw::diam_curve(&curve, PenaltyForm::Displayed).unwrap();
        match shown {
            LimitLaw::DiamCurve { slopes, .. } => assert!((slopes[0].powi(2) - 2.0).abs() > 1.0),
            _ => unreachable!(),
        }
    }

    #[test]
    fn aniso_law_near_q_one_approaches_k1() {
        // At q = 1 the model is an ellipse with λ = (a², 1), τ² = 1/(a² − 1).
        let a = 2.0f64;
        let n = 100_000;
        let near = LimitLaw::diam_aniso(a, 0.999, PenaltyForm::Derived).unwrap().sample_many(n, 9);
        let k1 = LimitLaw::DiamK1 { tau_sq: vec![1.0 / (a * a - 1.0)] }.sample_many(n, 10);
        let ks = ks_two_sample(&near, &k1).unwrap();
        assert!(ks < ks_critical_two_sample(0.01, n, n), "{ks}");
    }

    #[test]
    fn mean_of_first_point() {
        let n = 1_000_000;
        let xs = LimitLaw::Gumbel.sample_many(n, 12);
        let mean = xs.iter().sum::<f64>() / n as f64;
        let se = PI / 6f64.sqrt() / (n as f64).sqrt();
        assert!((mean - EULER_GAMMA).abs() < 3.0 * se);
    }

    #[test]
    fn monte_carlo_cdf_reports_error() {
        let law = LimitLaw::diam_k1_bivariate(0.2).unwrap();
        let c = cdf_limit_mc(&law, 0.0, 20_000, 1);
        assert_eq!(c.draws, Some(20_000));
        assert!(c.std_error.unwrap() > 0.0 && c.p > 0.0 && c.p < 1.0);
        assert!(cdf_limit(&LimitLaw::Gumbel, 1.0).draws.is_none());
    }

    #[test]
    fn correlated_pair_moments() {
        let mut rng = rng_from_seed(4);
        let (rho, var) = (1.0 / 15.0, 1.4);
        let n = 400_000;
        let (mut sxx, mut sxy) = (0.0, 0.0);
        for _ in 0..n {
            let (x, y) = sample_correlated_pair(&mut rng, rho, var);
            sxx += x * x;
            sxy += x * y;
        }
        assert!((sxx / n as f64 - var).abs() < 0.02);
        assert!((sxy / sxx - rho).abs() < 0.01);
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "gumbel",
            "gumbel-sum:c=0.5",
            "diam-k1:tau2=2;0.5",
            "diam-kge2",
            "diam-lq-gt2:d=2",
            "diam-lq-lt2:d=3,q=1,form=direct",
            "diam-cone",
            "diam-curve:m1=1,m2=1,k1=0.5,k2=0.5,p1=0.5,p2=0.5",
            "diam-aniso:a=2,q=0.75,form=displayed",
        ] {
            let law: LimitLaw = s.parse().unwrap();
            assert_eq!(law.to_string().parse::<LimitLaw>().unwrap(), law, "{s}");
        }
        assert!("diam-k1:rho=0.2".parse::<LimitLaw>().is_ok());
        assert!("diam-curve:preset=ellipse,rho=0.2".parse::<LimitLaw>().is_ok());
        for bad in ["nope", "diam-k1", "diam-k1:rho=2", "diam-lq-lt2:d=3,q=1.5,form=direct", "gumbel:x=1", "diam-aniso:a=2,q=0.5"] {
            assert!(bad.parse::<LimitLaw>().is_err(), "{bad}");
        }
    }

    #[test]
    fn draws_are_deterministic() {
        let law = LimitLaw::diam_aniso(2.0, 0.75, PenaltyForm::Derived).unwrap();
        assert_eq!(law.sample_many(100, 3), law.sample_many(100, 3));
        assert_ne!(law.sample(1), law.sample(2));
    }
}
