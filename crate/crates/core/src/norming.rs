//! Normalizing sequences `a_n, b_n, c_n, d_n` and the constants that enter them.
//!
//! Every model's norm has an upper tail of the form
//! `P(‖X‖ > x) ~ K · (ψ_T(y)/y)^e · P(T > y)` with `y = x/s`, for a model-specific
//! scale `s`, exponent `e` and constant `K` ([`TailEquivalent`]). The centering
//! `a_n` is the `1 − 1/n` quantile of that tail, solved numerically (route A) or
//! through the first-order expansion around the radial quantile (route B).

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::models::{CloudModel, EllipticalModel};
use crate::radial::{RadialLaw, QUANTILE_REL_TOL};
use crate::roots::solve_decreasing_positive;
use crate::special::ln_gamma;

/// `log P(T > y)` below this is reported as an underflow of the tail value.
const LN_MIN_POSITIVE: f64 = -708.0;

/// A tail value with its logarithm; `underflow` is set when the value itself is 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailValue {
    pub value: f64,
    pub log_value: f64,
    pub underflow: bool,
}

/// `K · (ψ_T(x/s)/(x/s))^e · P(T > x/s)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailEquivalent {
    pub radial: RadialLaw,
    pub scale: f64,
    pub exponent: f64,
    pub log_constant: f64,
}

impl TailEquivalent {
    pub fn log_tail(&self, x: f64) -> f64 {
        let y = x / self.scale;
        let mut v = self.log_constant + self.radial.log_survival(y);
        if self.exponent != 0.0 {
            v += self.exponent * (self.radial.psi(y) / y).ln();
        }
        v
    }

    pub fn tail(&self, x: f64) -> Result<TailValue> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(invalid(format!("tail needs x > 0, got {x}")));
        }
        let log_value = self.log_tail(x);
        let value = log_value.exp();
        Ok(TailValue { value, log_value, underflow: value == 0.0 || log_value < LN_MIN_POSITIVE })
    }

    /// Auxiliary function of the norm, `s ψ_T(x/s)`.
    pub fn auxiliary(&self, x: f64) -> f64 {
        self.scale * self.radial.psi(x / self.scale)
    }

    /// `√(auxiliary(x)/x)`.
    pub fn localization(&self, x: f64) -> f64 {
        (self.auxiliary(x) / x).sqrt()
    }

    /// The tail is the exact law of the norm.
    pub fn is_exact(&self) -> bool {
        self.exponent == 0.0 && self.log_constant == 0.0
    }

    /// Route A: `x` with `tail(x) = 1/n`.
    pub fn quantile(&self, n: u64) -> Result<f64> {
        let ln_n = check_n(n)?;
        let radial = self.radial.inverse_log_survival(-ln_n)?;
        if self.is_exact() {
            return Ok(self.scale * radial);
        }
        let guess = match self.analytic_quantile(n) {
            Ok((a, _, _)) if a > 0.0 => a,
            _ => self.scale * radial,
        };
        solve_decreasing_positive(|x| self.log_tail(x) + ln_n, guess, QUANTILE_REL_TOL)
    }

    /// Route B: `s a^T − s b^T (e log(a^T/b^T) − log K)`, returned with `(a^T, b^T)`.
    pub fn analytic_quantile(&self, n: u64) -> Result<(f64, f64, f64)> {
        let ln_n = check_n(n)?;
        let at = self.radial.inverse_log_survival(-ln_n)?;
        let bt = self.radial.psi(at);
        let a = self.scale * (at - bt * (self.exponent * (at / bt).ln() - self.log_constant));
        Ok((a, at, bt))
    }
}

fn check_n(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("sample size must be at least 2, got {n}")));
    }
    Ok((n as f64).ln())
}

/// `(ψ_A(x), φ_A(x))` with `ψ_A(x) = √λ₁ ψ_T(x/√λ₁)` and `φ_A = √(ψ_A/x)`.
pub fn psi_phi_a(model: &EllipticalModel, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid(format!("ψ_A needs x > 0, got {x}")));
    }
    let s = model.top_eigenvalue().sqrt();
    let psi = s * model.radial.psi(x / s);
    Ok((psi, (psi / x).sqrt()))
}

/// `ψ_q(x) = d^{1/q−1/2} ψ_T(d^{1/2−1/q} x)`; for `q = 2` this is `ψ_T`.
pub fn lq_auxiliary(radial: &RadialLaw, d: usize, q: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid(format!("ψ_q needs x > 0, got {x}")));
    }
    let s = (d as f64).powf(1.0 / q - 0.5);
    Ok(s * radial.psi(x / s))
}

/// Asymptotic tail `D_k φ_A^{d−k}(x) P(T > x/√λ₁)` of the Euclidean norm.
pub fn elliptical_tail(model: &EllipticalModel, x: f64) -> Result<TailValue> {
    elliptical_equivalent(model).tail(x)
}

fn ln_product(gamma_sq: &[f64]) -> f64 {
    gamma_sq.iter().map(|g| g.ln()).sum()
}

/// `D_k = Γ(d/2)/Γ(k/2) 2^{(d−k)/2} ∏ γ_q`.
pub fn tail_ratio(d: usize, k: usize, gamma_sq: &[f64]) -> f64 {
    ln_tail_ratio(d, k, gamma_sq).exp()
}

fn ln_tail_ratio(d: usize, k: usize, gamma_sq: &[f64]) -> f64 {
    let (d, k) = (d as f64, k as f64);
    ln_gamma(0.5 * d) - ln_gamma(0.5 * k) + 0.5 * (d - k) * LN_2 + 0.5 * ln_product(gamma_sq)
}

/// `C_k = (2d−k−1) 2^{k−4} π^{−1/2} Γ(k/2) ∏ γ_q^{−1}`.
pub fn gumbel_constant(d: usize, k: usize, gamma_sq: &[f64]) -> f64 {
    let (df, kf) = (d as f64, k as f64);
    ((2.0 * df - kf - 1.0).ln() + (kf - 4.0) * LN_2 - 0.5 * PI.ln() + ln_gamma(0.5 * kf)
        - 0.5 * ln_product(gamma_sq))
    .exp()
}

/// `C′_k = 2^{d−3} (2d−k−1) Γ²(d/2) / (Γ(k/2) √π) ∏ γ_q`.
pub fn pair_constant(d: usize, k: usize, gamma_sq: &[f64]) -> f64 {
    let (df, kf) = (d as f64, k as f64);
    ((df - 3.0) * LN_2 + (2.0 * df - kf - 1.0).ln() + 2.0 * ln_gamma(0.5 * df)
        - ln_gamma(0.5 * kf)
        - 0.5 * PI.ln()
        + 0.5 * ln_product(gamma_sq))
    .exp()
}

/// Density at the pole of the projection of a uniform point of `S^{d−1}` onto
/// its last `d − k` coordinates: `Γ(d/2)/(π^{(d−k)/2} Γ(k/2))`.
pub fn pole_density(d: usize, k: usize) -> f64 {
    let (d, k) = (d as f64, k as f64);
    (ln_gamma(0.5 * d) - 0.5 * (d - k) * PI.ln() - ln_gamma(0.5 * k)).exp()
}

/// `κ₀ = √(2(1 − cos(θ₀ ∧ π)))`.
pub fn cone_chord(theta0: f64) -> f64 {
    (2.0 * (1.0 - theta0.min(PI).cos())).sqrt()
}

/// `C₀ κ₀^{−1} 2^γ γ Γ(γ + 1)`.
pub fn cone_constant(c0: f64, gamma: f64, kappa0: f64) -> f64 {
    c0 / kappa0 * 2f64.powf(gamma) * gamma * ln_gamma(gamma + 1.0).exp()
}

/// Tail constant of `‖TW‖_q`: `2^{(d−1)/2} d Γ(d/2)/Γ(1/2)` for `q > 2`,
/// `2^{3(d−1)/2} Γ(d/2)/(Γ(1/2)(2−q)^{(d−1)/2})` for `1 ≤ q < 2`.
pub fn lq_tail_constant(d: usize, q: f64) -> Result<f64> {
    Ok(ln_lq_tail_constant(d, q)?.exp())
}

fn ln_lq_tail_constant(d: usize, q: f64) -> Result<f64> {
    let df = d as f64;
    let common = ln_gamma(0.5 * df) - 0.5 * PI.ln();
    if q > 2.0 {
        Ok(0.5 * (df - 1.0) * LN_2 + df.ln() + common)
    } else if (1.0..2.0).contains(&q) {
        Ok(1.5 * (df - 1.0) * LN_2 + common - 0.5 * (df - 1.0) * (2.0 - q).ln())
    } else {
        Err(invalid(format!("l^q tail constant needs q in [1, 2) or (2, ∞], got {q}")))
    }
}

fn elliptical_equivalent(model: &EllipticalModel) -> TailEquivalent {
    let (d, k) = (model.dim(), model.multiplicity());
    TailEquivalent {
        radial: model.radial,
        scale: model.top_eigenvalue().sqrt(),
        exponent: 0.5 * (d - k) as f64,
        log_constant: ln_tail_ratio(d, k, &model.gamma_sq()),
    }
}

/// `Σ τ_i` over top-level maxima scaled to the constant `√(2π) τ`.
fn curve_log_constant(tau_total: f64) -> f64 {
    0.5 * (2.0 * PI).ln() + tau_total.ln()
}

/// `(1/π) (a²/(a²−1))^{1/(2q)} 2^{1/(2q)} Γ(1/(2q))/q`.
fn aniso_log_constant(a: f64, q: f64) -> f64 {
    let e = 0.5 / q;
    -PI.ln() + e * (a * a / (a * a - 1.0)).ln() + e * LN_2 + ln_gamma(e) - q.ln()
}

/// Tail equivalent of the statistic whose maximum is normalized: `‖X‖` for
/// every family except curves, where it is `‖X‖/m`.
pub fn tail_equivalent(model: &CloudModel) -> Result<TailEquivalent> {
    let radial = model.radial();
    Ok(match model {
        CloudModel::Elliptical(m) => elliptical_equivalent(m),
        CloudModel::SphericalLq(m) => {
            let (d, q) = (m.dim(), m.q());
            let scale = if q > 2.0 { 1.0 } else { (d as f64).powf(1.0 / q - 0.5) };
            TailEquivalent { radial, scale, exponent: 0.5 * (d - 1) as f64, log_constant: ln_lq_tail_constant(d, q)? }
        }
        CloudModel::Cone(_) => TailEquivalent { radial, scale: 1.0, exponent: 0.0, log_constant: 0.0 },
        CloudModel::Curve(m) => {
            TailEquivalent { radial, scale: 1.0, exponent: 0.5, log_constant: curve_log_constant(m.tau_total()) }
        }
        CloudModel::Aniso(m) => {
            let (a, q) = (m.amplitude(), m.exponent());
            TailEquivalent { radial, scale: a, exponent: 0.5 / q, log_constant: aniso_log_constant(a, q) }
        }
    })
}

/// Which limit theorem governs a model's diameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    #[serde(rename = "elliptical-k1")]
    EllipticalSimple,
    #[serde(rename = "elliptical-kge2")]
    EllipticalMultiple,
    #[serde(rename = "lq-gt2")]
    LqAbove2,
    #[serde(rename = "lq-lt2")]
    LqBelow2,
    #[serde(rename = "cone")]
    Cone,
    #[serde(rename = "cone-trivial")]
    ConeTrivial,
    #[serde(rename = "curve")]
    Curve,
    #[serde(rename = "aniso")]
    Aniso,
}

impl Family {
    pub fn of(model: &CloudModel) -> Self {
        match model {
            CloudModel::Elliptical(m) if m.multiplicity() == 1 => Self::EllipticalSimple,
            CloudModel::Elliptical(_) => Self::EllipticalMultiple,
            CloudModel::SphericalLq(m) if m.q() > 2.0 => Self::LqAbove2,
            CloudModel::SphericalLq(_) => Self::LqBelow2,
            CloudModel::Cone(m) if m.is_trivial_regime() => Self::ConeTrivial,
            CloudModel::Cone(_) => Self::Cone,
            CloudModel::Curve(_) => Self::Curve,
            CloudModel::Aniso(_) => Self::Aniso,
        }
    }
}

/// Constants of a model; entries that do not apply to its family are `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Constants {
    #[serde(rename = "D_k")]
    pub tail_ratio: Option<f64>,
    #[serde(rename = "C_k")]
    pub gumbel_constant: Option<f64>,
    #[serde(rename = "Cprime_k")]
    pub pair_constant: Option<f64>,
    #[serde(rename = "kappa0")]
    pub cone_chord: Option<f64>,
    #[serde(rename = "C_gamma")]
    pub cone_constant: Option<f64>,
    /// `K` of the tail equivalent.
    pub tail_constant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole_density: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pair_correlations: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pair_variances: Vec<f64>,
    /// `(C₀, γ)` of a cone model.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cone_regularity: Option<(f64, f64)>,
}

pub fn constants(model: &CloudModel) -> Result<Constants> {
    let tail = tail_equivalent(model)?;
    let mut c = Constants { tail_constant: tail.log_constant.exp(), ..Default::default() };
    match model {
        CloudModel::Elliptical(m) => {
            let (d, k, g) = (m.dim(), m.multiplicity(), m.gamma_sq());
            c.tail_ratio = Some(tail_ratio(d, k, &g));
            c.pole_density = Some(pole_density(d, k));
            if k >= 2 {
                c.gumbel_constant = Some(gumbel_constant(d, k, &g));
                c.pair_constant = Some(pair_constant(d, k, &g));
                c.pair_correlations = m.pair_correlations();
                c.pair_variances = m.pair_variances();
            }
        }
        CloudModel::Cone(m) => {
            let kappa0 = cone_chord(m.theta0());
            c.cone_chord = Some(kappa0);
            if !m.is_trivial_regime() {
                let (c0, gamma) = m.regularity();
                c.cone_regularity = Some((c0, gamma));
                c.cone_constant = Some(cone_constant(c0, gamma, kappa0));
            }
        }
        _ => {}
    }
    Ok(c)
}

/// `(v − center)/scale + shift`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Affine {
    pub center: f64,
    pub scale: f64,
    pub shift: f64,
}

impl Affine {
    pub fn apply(&self, v: f64) -> f64 {
        (v - self.center) / self.scale + self.shift
    }
}

/// Normalizing sequences of one model at one sample size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormingData {
    pub family: Family,
    pub n: u64,
    pub a_n: f64,
    pub b_n: f64,
    pub c_n: f64,
    pub d_n: Option<f64>,
    #[serde(rename = "a_nT")]
    pub radial_quantile: Option<f64>,
    #[serde(rename = "b_nT")]
    pub radial_scale: Option<f64>,
    /// Route B value of `a_n`.
    pub a_n_analytic: f64,
    #[serde(flatten)]
    pub constants: Constants,
    /// Map from a diameter to its normalized value.
    pub diameter: Affine,
    /// Map from a maximum norm to its normalized value.
    pub max_norm: Affine,
}

/// Sequences for `model` at sample size `n`, with `a_n` from route A.
pub fn norming_sequences(model: &CloudModel, n: u64) -> Result<NormingData> {
    let tail = tail_equivalent(model)?;
    let constants = constants(model)?;
    let family = Family::of(model);
    let a_n = tail.quantile(n)?;
    let (a_n_analytic, at, bt) = tail.analytic_quantile(n)?;
    let b_n = tail.auxiliary(a_n);
    let c_n = (b_n / a_n).sqrt();

    let correction = |lead: f64, ln_const: f64| -> Result<f64> {
        let r = a_n / b_n;
        if !(r > 1.0) {
            let min_n = threshold_n(&tail)?;
            return Err(Error::BelowThreshold { n, min_n, what: "log log(a_n/b_n)" });
        }
        Ok(lead * r.ln() - r.ln().ln() - ln_const)
    };
    let (d_n, diameter) = match (family, model) {
        (Family::EllipticalMultiple, CloudModel::Elliptical(m)) => {
            let k = m.multiplicity() as f64;
            let d_n = correction(0.5 * (k - 1.0), constants.gumbel_constant.unwrap_or(1.0).ln())?;
            (Some(d_n), Affine { center: 2.0 * a_n, scale: b_n, shift: d_n })
        }
        (Family::Cone, CloudModel::Cone(m)) => {
            let (_, gamma) = m.regularity();
            let kappa0 = constants.cone_chord.unwrap_or(2.0);
            let d_n = correction(gamma, constants.cone_constant.unwrap_or(1.0).ln())?;
            (Some(d_n), Affine { center: kappa0 * a_n, scale: 2.0 * b_n / kappa0, shift: d_n })
        }
        (Family::ConeTrivial, _) => (None, Affine { center: a_n, scale: b_n, shift: 0.0 }),
        (Family::Curve, CloudModel::Curve(m)) => {
            let (p, q) = m.extreme_pair()?;
            (None, Affine { center: (p.m + q.m) * a_n, scale: b_n, shift: 0.0 })
        }
        _ => (None, Affine { center: 2.0 * a_n, scale: b_n, shift: 0.0 }),
    };
    let max_norm = match model {
        CloudModel::Curve(m) => {
            let top = m.top_level();
            Affine { center: top * a_n, scale: top * b_n, shift: 0.0 }
        }
        _ => Affine { center: a_n, scale: b_n, shift: 0.0 },
    };
    Ok(NormingData {
        family,
        n,
        a_n,
        b_n,
        c_n,
        d_n,
        radial_quantile: Some(at),
        radial_scale: Some(bt),
        a_n_analytic,
        constants,
        diameter,
        max_norm,
    })
}

/// Smallest `n` with `a_n/b_n > 1`.
fn threshold_n(tail: &TailEquivalent) -> Result<u64> {
    let ok = |n: u64| -> Result<bool> {
        let a = tail.quantile(n)?;
        Ok(a / tail.auxiliary(a) > 1.0)
    };
    let mut hi = 2u64;
    while !ok(hi)? {
        if hi > 1 << 62 {
            return Err(invalid("a_n/b_n never exceeds 1"));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    if lo < 2 {
        return Ok(hi);
    }
    // Invariant: ok(hi) and !ok(lo).
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
