use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::ks::{ks_one_sample, ks_two_sample};
use crate::error::{invalid, Error, Result};
use crate::geometry::{diameter_fast, max_norm, NormSpec};
use crate::limits::LimitLaw;
use crate::models::{CloudModel, PointSet};
use crate::norming::{norming_sequences, NormingData};
use crate::rng::mix_seed;

/// Points of the ecdf grid stored in a report.
pub const ECDF_GRID: usize = 512;

/// Smallest reference sample drawn for laws without an exact cdf.
pub const MIN_REFERENCE_DRAWS: usize = 1_000_000;

/// Index reserved for the reference-sample seed, away from replication indices.
const REFERENCE_STREAM: u64 = u64::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    Diameter,
    MaxNorm,
}

/// Empirical cdf on an evenly spaced grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ecdf {
    pub x: Vec<f64>,
    #[serde(rename = "F")]
    pub f: Vec<f64>,
}

impl Ecdf {
    pub fn on_grid(values: &[f64], points: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("values"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
        let step = if points > 1 { (hi - lo) / (points - 1) as f64 } else { 0.0 };
        let x: Vec<f64> = (0..points).map(|i| if i + 1 == points { hi } else { lo + i as f64 * step }).collect();
        let n = sorted.len() as f64;
        let f = x.iter().map(|&t| sorted.partition_point(|&v| v <= t) as f64 / n).collect();
        Ok(Self { x, f })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceKind {
    Cdf,
    Sample,
}

/// The law the normalized values are compared with.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reference {
    pub kind: ReferenceKind,
    /// The law in `--law` syntax.
    pub law: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<LimitLaw>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<usize>,
    /// Largest standard error `1/(2√N)` of the reference ecdf.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

/// Per-replication check of `M⁺ + M⁻ − A ≤ diam ≤ M⁺ + M⁻`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub checked: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub model: String,
    pub statistic: Statistic,
    pub n: usize,
    #[serde(rename = "R")]
    pub replications: usize,
    pub norming: NormingData,
    pub values: Vec<f64>,
    pub ecdf: Ecdf,
    pub reference: Reference,
    pub ks: f64,
    pub seed: u64,
    pub replication_seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundCheck>,
    pub elapsed_ms: u64,
}

impl ExperimentReport {
    /// One row per replication: index, seed and normalized value.
    pub fn write_values_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["replication", "seed", "value"]).map_err(csv_error)?;
        for (r, (s, v)) in self.replication_seeds.iter().zip(&self.values).enumerate() {
            w.write_record([r.to_string(), s.to_string(), format!("{v:e}")]).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the JSON report to `path` and the raw values next to it, with extension `csv`.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json + "\n")?;
        self.write_values_csv(std::fs::File::create(path.with_extension("csv"))?)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Knobs shared by both experiments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExperimentOptions {
    /// Reference sample size when the limit has no exact cdf; `None` uses `max(10⁶, 100 R)`.
    pub reference_draws: Option<usize>,
}

fn check_sizes(n: usize, replications: usize) -> Result<()> {
    if replications < 1 {
        return Err(invalid("need at least one replication"));
    }
    if n < 2 {
        return Err(Error::TooFewPoints { n, required: 2 });
    }
    Ok(())
}

fn compare(values: &[f64], law: &LimitLaw, seed: u64, draws: usize) -> Result<(f64, Reference)> {
    if law.has_exact_cdf() {
        let ks = ks_one_sample(values, |z| law.exact_cdf(z).unwrap_or(f64::NAN))?;
        let reference = Reference {
            kind: ReferenceKind::Cdf,
            law: law.to_string(),
            params: Some(law.clone()),
            sample_size: None,
            std_error: None,
        };
        return Ok((ks, reference));
    }
    let sample = law.sample_many(draws, mix_seed(seed, REFERENCE_STREAM));
    let ks = ks_two_sample(values, &sample)?;
    let reference = Reference {
        kind: ReferenceKind::Sample,
        law: law.to_string(),
        params: Some(law.clone()),
        sample_size: Some(draws),
        std_error: Some(0.5 / (draws as f64).sqrt()),
    };
    Ok((ks, reference))
}

/// Replicated normalized diameters against the limit of `model`.
pub fn run_diameter_experiment(
    model: &CloudModel,
    n: usize,
    replications: usize,
    norm: &NormSpec,
    seed: u64,
) -> Result<ExperimentReport> {
    run_diameter_experiment_with(model, n, replications, norm, seed, ExperimentOptions::default())
}

pub fn run_diameter_experiment_with(
    model: &CloudModel,
    n: usize,
    replications: usize,
    norm: &NormSpec,
    seed: u64,
    options: ExperimentOptions,
) -> Result<ExperimentReport> {
    check_sizes(n, replications)?;
    if norm.q() != model.norm_exponent() {
        return Err(invalid(format!(
            "the normalization of this model is for the l^{} norm, got l^{}",
            model.norm_exponent(),
            norm.q()
        )));
    }
    let start = Instant::now();
    let norming = norming_sequences(model, n as u64)?;
    let law = LimitLaw::for_model(model)?;
    let check_bounds = matches!(model, CloudModel::Elliptical(m) if m.multiplicity() == 1);
    let seeds: Vec<u64> = (0..replications as u64).map(|r| mix_seed(seed, r)).collect();
    let rows = seeds
        .par_iter()
        .map(|&s| {
            let cloud: PointSet<f64> = model.sample_cloud(n, s)?;
            let diam = diameter_fast(&cloud, norm)?.value;
            let ok = if check_bounds { Some(k1_diameter_bounds(&cloud)?.contains(diam)) } else { None };
            Ok((norming.diameter.apply(diam), ok))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let bounds = check_bounds.then(|| BoundCheck {
        checked: rows.len(),
        violations: rows.iter().filter(|r| r.1 == Some(false)).count(),
    });
    let draws = options.reference_draws.unwrap_or(MIN_REFERENCE_DRAWS.max(100 * replications));
    let (ks, reference) = compare(&values, &law, seed, draws)?;
    Ok(ExperimentReport {
        model: model.describe(),
        statistic: Statistic::Diameter,
        n,
        replications,
        norming,
        ecdf: Ecdf::on_grid(&values, ECDF_GRID)?,
        values,
        reference,
        ks,
        seed,
        replication_seeds: seeds,
        bounds,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Replicated normalized maximum norms against the Gumbel law.
pub fn run_maxnorm_experiment(model: &CloudModel, n: usize, replications: usize, seed: u64) -> Result<ExperimentReport> {
    check_sizes(n, replications)?;
    if model.dim() < 2 {
        return Err(invalid("maximum-norm experiments need d >= 2"));
    }
    let start = Instant::now();
    let norming = norming_sequences(model, n as u64)?;
    let norm = NormSpec::new(model.norm_exponent())?;
    let seeds: Vec<u64> = (0..replications as u64).map(|r| mix_seed(seed, r)).collect();
    let values = seeds
        .par_iter()
        .map(|&s| {
            let cloud: PointSet<f64> = model.sample_cloud(n, s)?;
            Ok(norming.max_norm.apply(max_norm(&cloud, &norm)?.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (ks, reference) = compare(&values, &LimitLaw::Gumbel, seed, 0)?;
    Ok(ExperimentReport {
        model: model.describe(),
        statistic: Statistic::MaxNorm,
        n,
        replications,
        norming,
        ecdf: Ecdf::on_grid(&values, ECDF_GRID)?,
        values,
        reference,
        ks,
        seed,
        replication_seeds: seeds,
        bounds: None,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Bounds on the Euclidean diameter from the farthest points on either side of
/// the hyperplane orthogonal to the first coordinate axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiameterBounds {
    pub max_plus: f64,
    pub max_minus: f64,
    /// `M⁺ + M⁻ − ‖y⁺ − y⁻‖ ≥ 0`.
    pub defect: f64,
    pub lower: f64,
    pub upper: f64,
}

impl DiameterBounds {
    pub fn contains(&self, diameter: f64) -> bool {
        self.lower <= diameter && diameter <= self.upper
    }
}

/// `M⁺`, `M⁻` and the defect for a cloud in eigen-coordinates (top direction first).
pub fn k1_diameter_bounds(cloud: &PointSet<f64>) -> Result<DiameterBounds> {
    let spec = NormSpec::euclidean();
    let mut plus: Option<(f64, usize)> = None;
    let mut minus: Option<(f64, usize)> = None;
    for (i, row) in cloud.rows().enumerate() {
        let slot = if row[0] > 0.0 {
            &mut plus
        } else if row[0] < 0.0 {
            &mut minus
        } else {
            continue;
        };
        let key = spec.key(row);
        if slot.is_none_or(|(k, _)| key > k) {
            *slot = Some((key, i));
        }
    }
    let (Some((kp, ip)), Some((km, im))) = (plus, minus) else {
        return Err(invalid("both half-spaces must contain points"));
    };
    let (mp, mm) = (spec.from_key(kp), spec.from_key(km));
    let gap = spec.distance(cloud.row(ip), cloud.row(im));
    let upper = mp + mm;
    Ok(DiameterBounds { max_plus: mp, max_minus: mm, defect: upper - gap, lower: gap, upper })
}
