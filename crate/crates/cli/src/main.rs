use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use cloud_diam::geometry::diameter;
use cloud_diam::limits::cdf_limit;
use cloud_diam::stats::{
    localization_check, pair_localization_check, run_diameter_experiment_with, run_maxnorm_experiment,
    ExperimentOptions,
};
use cloud_diam::{norming_sequences, CloudModel, DiameterAlgo, Error, LimitLaw, NormSpec, PointSet64};

/// Random point-cloud diameters in the Gumbel domain of attraction.
#[derive(Parser)]
#[command(name = "cloud-diam", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Statistic {
    Diameter,
    MaxNorm,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a cloud and write it as CSV.
    Sample {
        /// e.g. `elliptical:d=3,eigs=4;1;0.5,radial=exponential:1`
        #[arg(long)]
        model: CloudModel,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact diameter of a CSV cloud.
    Diameter {
        #[arg(long = "in")]
        input: PathBuf,
        /// Norm exponent in [1, inf].
        #[arg(long, default_value = "2")]
        q: NormSpec,
        #[arg(long, default_value = "fast")]
        algo: DiameterAlgo,
    },
    /// Normalizing sequences and constants as JSON.
    Norming {
        #[arg(long)]
        model: CloudModel,
        #[arg(long)]
        n: u64,
    },
    /// Exact draws of a limit law, written as CSV.
    LimitSim {
        /// e.g. `diam-k1:rho=0.2`, `diam-lq-lt2:d=3,q=1,form=direct`
        #[arg(long)]
        law: LimitLaw,
        #[arg(long)]
        draws: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also report the cdf at these points.
        #[arg(long = "cdf-at", value_delimiter = ',', allow_hyphen_values = true)]
        cdf_at: Vec<f64>,
    },
    /// Replicated experiment; writes a JSON report and a CSV of raw values next to it.
    Experiment {
        #[arg(long)]
        model: CloudModel,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        reps: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "diameter")]
        statistic: Statistic,
        /// Reference sample size for limits without an exact cdf [default: max(1e6, 100 reps)].
        #[arg(long)]
        reference_draws: Option<usize>,
    },
    /// Localization diagnostics of an elliptical model.
    Localize {
        #[arg(long)]
        model: CloudModel,
        /// Threshold on the Euclidean norm.
        #[arg(long, conflicts_with_all = ["tail", "pairs"], required_unless_present_any = ["tail", "pairs"])]
        x: Option<f64>,
        /// Threshold given by its approximate tail probability instead.
        #[arg(long, conflicts_with = "pairs")]
        tail: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        accepted: usize,
        /// Orientation of the farthest pair instead (multiple top eigenvalue).
        #[arg(long, requires_all = ["n", "reps"])]
        pairs: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        seed: u64,
    },
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Error> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn elliptical(model: &CloudModel) -> Result<&cloud_diam::models::EllipticalModel, Error> {
    match model {
        CloudModel::Elliptical(m) => Ok(m),
        _ => Err(Error::InvalidParameter("localize needs an elliptical model".into())),
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Sample { model, n, seed, out } => {
            let cloud: PointSet64 = model.sample_cloud(n, seed)?;
            cloud.save_csv(&out)?;
            print_json(&json!({ "model": model.describe(), "n": n, "seed": seed, "out": out }))
        }
        Command::Diameter { input, q, algo } => {
            let cloud = PointSet64::load_csv(&input)?;
            let start = Instant::now();
            let d = diameter(&cloud, &q, algo)?;
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            print_json(&json!({ "value": d.value, "i": d.i, "j": d.j, "algo": algo, "elapsed_ms": elapsed }))
        }
        Command::Norming { model, n } => print_json(&norming_sequences(&model, n)?),
        Command::LimitSim { law, draws, seed, out, cdf_at } => {
            if draws == 0 {
                return Err(Error::InvalidParameter("need at least one draw".into()));
            }
            let values = law.sample_many(draws, seed);
            let mut text = String::from("value\n");
            for v in &values {
                text.push_str(&format!("{v:e}\n"));
            }
            std::fs::write(&out, text)?;
            let mean = values.iter().sum::<f64>() / draws as f64;
            let cdf: Vec<_> = cdf_at.iter().map(|&z| json!({ "z": z, "cdf": cdf_limit(&law, z) })).collect();
            print_json(&json!({
                "law": law.to_string(),
                "params": law,
                "draws": draws,
                "seed": seed,
                "mean": mean,
                "cdf": cdf,
                "out": out,
            }))
        }
        Command::Experiment { model, n, reps, seed, out, statistic, reference_draws } => {
            let report = match statistic {
                Statistic::Diameter => {
                    let norm = NormSpec::new(model.norm_exponent())?;
                    let options = ExperimentOptions { reference_draws };
                    run_diameter_experiment_with(&model, n, reps, &norm, seed, options)?
                }
                Statistic::MaxNorm => run_maxnorm_experiment(&model, n, reps, seed)?,
            };
            report.save(&out)?;
            print_json(&json!({
                "out": out,
                "values_csv": out.with_extension("csv"),
                "ks": report.ks,
                "reference": report.reference,
                "elapsed_ms": report.elapsed_ms,
            }))
        }
        Command::Localize { model, x, tail, accepted, pairs, n, reps, seed } => {
            let m = elliptical(&model)?;
            if pairs {
                let (n, reps) = (n.unwrap_or_default(), reps.unwrap_or_default());
                return print_json(&pair_localization_check(m, n, reps, seed)?);
            }
            let x = match (x, tail) {
                (Some(x), _) => x,
                (None, Some(p)) => threshold_for_tail(m, p)?,
                (None, None) => unreachable!("clap requires one of --x, --tail"),
            };
            print_json(&localization_check(m, x, accepted, seed)?)
        }
    }
}

/// `x` with approximate tail probability `p`.
fn threshold_for_tail(model: &cloud_diam::models::EllipticalModel, p: f64) -> Result<f64, Error> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("tail probability must lie in (0, 1), got {p}")));
    }
    let f = |x: f64| cloud_diam::norming::elliptical_tail(model, x).map(|t| t.log_value - p.ln());
    if f(1.0)? <= 0.0 {
        return Err(Error::InvalidParameter(format!("tail probability {p} is too large for the tail approximation")));
    }
    let mut hi = 2.0;
    while f(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::InvalidParameter(format!("no threshold with tail {p}")));
        }
    }
    cloud_diam::roots::brent(|x| f(x).unwrap_or(f64::NAN), hi / 2.0, hi, 1e-12)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
