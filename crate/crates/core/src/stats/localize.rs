use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::geometry::{diameter_fast, NormSpec};
use crate::models::{fill_unit_vector, EllipticalModel, PointSet};
use crate::norming::{elliptical_tail, psi_phi_a};
use crate::rng::{mix_seed, rng_from_seed};

/// Below this acceptance rate the rejection sampler gives up.
pub const MIN_ACCEPTANCE: f64 = 1e-6;

/// Largest approximate tail probability allowed at the threshold.
pub const MAX_THRESHOLD_TAIL: f64 = 1e-3;

const BATCH: usize = 4096;

/// Conditional behaviour of `Y` given `‖Y‖ > x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalizationReport {
    pub threshold: f64,
    pub accepted: usize,
    pub proposed: u64,
    /// Fraction of proposals `T > x/√λ₁` with `‖Y‖ > x`.
    pub acceptance_rate: f64,
    /// `P(T > x/√λ₁)` times the acceptance rate.
    pub tail_estimate: f64,
    pub psi: f64,
    pub phi: f64,
    /// Empirical variance of `W_q/φ_A(x)` for `q > k`.
    pub component_variances: Vec<f64>,
    /// `λ₁/(λ₁ − λ_q)`.
    pub target_variances: Vec<f64>,
    /// Empirical mean of `(‖Y‖ − x)/ψ_A(x)`.
    pub excess_mean: f64,
    /// Bivariate models only: variance of the angle to the top axis over `φ_A(x)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle_variance: Option<f64>,
    /// `λ₂/(λ₁ − λ₂)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle_target: Option<f64>,
}

/// Norm of an accepted draw and its eigen-coordinates.
type Draw = (f64, Vec<f64>);

fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Rejection sampling of `Y` given `‖Y‖ > x` until `accepted` draws.
///
/// Since `‖Y‖ ≤ √λ₁ T`, proposals draw `T` from its law given `T > x/√λ₁`
/// (by inversion of the survival function) and a uniform direction, and are
/// accepted when `‖Y‖ > x`; accepted draws have exactly the conditional law.
pub fn localization_check(model: &EllipticalModel, x: f64, accepted: usize, seed: u64) -> Result<LocalizationReport> {
    if accepted < 2 {
        return Err(invalid("need at least two accepted draws"));
    }
    let approx = elliptical_tail(model, x)?;
    if !(approx.value <= MAX_THRESHOLD_TAIL) {
        return Err(invalid(format!(
            "threshold x = {x} is below the 1 - {MAX_THRESHOLD_TAIL:e} tail point (approximate tail {:e})",
            approx.value
        )));
    }
    let d = model.dim();
    let k = model.multiplicity();
    let eigs = model.eigenvalues();
    let l1 = eigs[0];
    let t0 = x / l1.sqrt();
    let ln_s0 = model.radial.log_survival(t0);
    let (psi, phi) = psi_phi_a(model, x)?;

    let mut rows: Vec<Draw> = Vec::with_capacity(accepted);
    let mut proposed = 0u64;
    let mut batch = 0u64;
    while rows.len() < accepted {
        let found: Vec<(u64, Vec<Draw>)> = (0..BATCH as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng_from_seed(mix_seed(seed, batch * BATCH as u64 + i));
                let mut w = vec![0.0; d];
                let mut hits = Vec::new();
                let mut tries = 0u64;
                // Each task proposes until one acceptance or a fixed budget.
                while tries < 4096 {
                    tries += 1;
                    let u: f64 = rng.random();
                    let t = model.radial.inverse_log_survival(ln_s0 + (1.0 - u).ln())?;
                    fill_unit_vector(&mut rng, &mut w);
                    let norm = t * w.iter().zip(eigs).map(|(wq, l)| l * wq * wq).sum::<f64>().sqrt();
                    if norm > x {
                        hits.push((norm, w.clone()));
                        break;
                    }
                }
                Ok((tries, hits))
            })
            .collect::<Result<_>>()?;
        for (tries, hits) in found {
            proposed += tries;
            rows.extend(hits);
        }
        batch += 1;
        let rate = rows.len() as f64 / proposed as f64;
        if rate < MIN_ACCEPTANCE && proposed > (10.0 / MIN_ACCEPTANCE) as u64 {
            return Err(Error::AcceptanceTooLow { rate, x });
        }
        if rows.is_empty() && proposed > (100.0 / MIN_ACCEPTANCE) as u64 {
            return Err(Error::AcceptanceTooLow { rate: 0.0, x });
        }
    }
    let acceptance_rate = rows.len() as f64 / proposed as f64;
    rows.truncate(accepted);

    let component_variances = (k..d)
        .map(|q| variance(&rows.iter().map(|(_, w)| w[q] / phi).collect::<Vec<_>>()))
        .collect();
    let target_variances = eigs[k..].iter().map(|l| l1 / (l1 - l)).collect();
    let excess_mean = rows.iter().map(|(r, _)| (r - x) / psi).sum::<f64>() / accepted as f64;
    let (angle_variance, angle_target) = if d == 2 && k == 1 {
        let angles: Vec<f64> = rows
            .iter()
            .map(|(_, w)| {
                let (y1, y2) = (l1.sqrt() * w[0], eigs[1].sqrt() * w[1]);
                // Angle to the nearer end of the top axis.
                (y2 * y1.signum()).atan2(y1.abs()) / phi
            })
            .collect();
        (Some(variance(&angles)), Some(eigs[1] / (l1 - eigs[1])))
    } else {
        (None, None)
    };
    Ok(LocalizationReport {
        threshold: x,
        accepted,
        proposed,
        acceptance_rate,
        tail_estimate: ln_s0.exp() * acceptance_rate,
        psi,
        phi,
        component_variances,
        target_variances,
        excess_mean,
        angle_variance,
        angle_target,
    })
}

/// Orientation of the farthest pair of a cloud with a multiple top eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairLocalizationReport {
    pub n: usize,
    pub replications: usize,
    pub multiplicity: usize,
    /// `c_n^T = √(b_n^T/a_n^T)`.
    pub c_n_t: f64,
    /// Mean of `(1 + ⟨Ũ₁, Ũ₂⟩)/(c_n^T)²` over the farthest pair of each cloud.
    pub cosine_mean: f64,
    /// `k − 1`.
    pub cosine_target: f64,
    /// Correlation of `(W_{1,q}, W_{2,q})` for `q > k`.
    pub pair_correlations: Vec<f64>,
    /// `λ_q/(2λ₁ − λ_q)`.
    pub target_correlations: Vec<f64>,
    /// Variance of `W_{i,q}/c_n^T`, pooled over both points.
    pub pair_variances: Vec<f64>,
    /// `(2λ₁ − λ_q)/(2λ₁ − 2λ_q)`.
    pub target_variances: Vec<f64>,
}

/// For each of `replications` clouds of size `n`, the pair achieving the diameter.
pub fn pair_localization_check(
    model: &EllipticalModel,
    n: usize,
    replications: usize,
    seed: u64,
) -> Result<PairLocalizationReport> {
    let k = model.multiplicity();
    if k < 2 {
        return Err(invalid("pair localization needs a multiple top eigenvalue (k >= 2)"));
    }
    if replications == 0 {
        return Err(invalid("need at least one replication"));
    }
    if n < 2 {
        return Err(Error::TooFewPoints { n, required: 2 });
    }
    let d = model.dim();
    let eigs = model.eigenvalues().to_vec();
    let at = model.radial.inverse_log_survival(-(n as f64).ln())?;
    let bt = model.radial.auxiliary_at(at)?;
    let c = (bt / at).sqrt();

    // Per replication: the cosine statistic and W_{i,q}/c for both points.
    let rows = (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let cloud: PointSet<f64> = model.sample_cloud(n, mix_seed(seed, r))?;
            let best = diameter_fast(&cloud, &NormSpec::euclidean())?;
            let direction = |y: &[f64]| -> Vec<f64> {
                let t = y.iter().zip(&eigs).map(|(v, l)| v * v / l).sum::<f64>().sqrt();
                y.iter().zip(&eigs).map(|(v, l)| v / (t * l.sqrt())).collect()
            };
            let (w1, w2) = (direction(cloud.row(best.i)), direction(cloud.row(best.j)));
            let n1 = w1[..k].iter().map(|v| v * v).sum::<f64>().sqrt();
            let n2 = w2[..k].iter().map(|v| v * v).sum::<f64>().sqrt();
            let dot = w1[..k].iter().zip(&w2[..k]).map(|(a, b)| a * b).sum::<f64>() / (n1 * n2);
            let lower: Vec<(f64, f64)> = (k..d).map(|q| (w1[q] / c, w2[q] / c)).collect();
            Ok(((1.0 + dot) / (c * c), lower))
        })
        .collect::<Result<Vec<_>>>()?;

    let m = replications as f64;
    let cosine_mean = rows.iter().map(|r| r.0).sum::<f64>() / m;
    let mut pair_correlations = Vec::new();
    let mut pair_variances = Vec::new();
    for q in 0..d - k {
        let us: Vec<f64> = rows.iter().map(|r| r.1[q].0).collect();
        let vs: Vec<f64> = rows.iter().map(|r| r.1[q].1).collect();
        let (mu, mv) = (us.iter().sum::<f64>() / m, vs.iter().sum::<f64>() / m);
        let suv: f64 = us.iter().zip(&vs).map(|(u, v)| (u - mu) * (v - mv)).sum();
        let suu: f64 = us.iter().map(|u| (u - mu).powi(2)).sum();
        let svv: f64 = vs.iter().map(|v| (v - mv).powi(2)).sum();
        pair_correlations.push(suv / (suu * svv).sqrt());
        pair_variances.push((suu + svv) / (2.0 * m - 2.0).max(1.0));
    }
    Ok(PairLocalizationReport {
        n,
        replications,
        multiplicity: k,
        c_n_t: c,
        cosine_mean,
        cosine_target: (k - 1) as f64,
        pair_correlations,
        target_correlations: model.pair_correlations(),
        pair_variances,
        target_variances: model.pair_variances(),
    })
}
