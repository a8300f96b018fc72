//! Replicated Monte Carlo experiments, goodness of fit and localization diagnostics.

mod experiment;
mod ks;
mod localize;

pub use experiment::{
    k1_diameter_bounds, run_diameter_experiment, run_diameter_experiment_with, run_maxnorm_experiment, BoundCheck,
    DiameterBounds, Ecdf, ExperimentOptions, ExperimentReport, Reference, ReferenceKind, Statistic, ECDF_GRID,
    MIN_REFERENCE_DRAWS,
};
pub use ks::{ks_critical_two_sample, ks_one_sample, ks_statistic, ks_two_sample, KsReference};
pub use localize::{
    localization_check, pair_localization_check, LocalizationReport, PairLocalizationReport, MAX_THRESHOLD_TAIL,
    MIN_ACCEPTANCE,
};
