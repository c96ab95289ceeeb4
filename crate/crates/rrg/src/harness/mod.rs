//! Experiments, statistics, acceptance criteria and output formats.

pub mod checks;
pub mod config;
pub mod criteria;
pub mod output;
pub mod parallel;
pub mod stats;
pub mod tracking;

pub use checks::{
    halving_table, run_bd_rate_check, run_cov_check, run_duality_check, run_gaussian_check, run_gff_limit_check,
    run_halving_check, run_poisson_check, run_spectra_identity, run_word_algebra,
};
pub use config::{parse_grid, ConfigError, ExperimentConfig};
pub use criteria::{criterion_config, run_criterion, run_criterion_with, validate, CriterionOutcome, Suite};
pub use output::{validation_summary, write_csv, write_json, Summary};
pub use parallel::{map_replicas, thread_count};
pub use stats::{StatReport, Tolerance};
pub use tracking::{halving_rates, transposition_rates, HalvingTally, TranspositionTally};
