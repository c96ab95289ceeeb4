//! The nine acceptance criteria with pinned parameters and tolerances.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::harness::checks::{
    run_bd_rate_check, run_cov_check, run_duality_check, run_gaussian_check, run_gff_limit_check,
    run_halving_check, run_poisson_check, run_spectra_identity, run_word_algebra,
};
use crate::harness::config::ExperimentConfig;
use crate::harness::stats::{allowed_failures, StatReport};

pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Exact,
    Statistical,
    All,
}

impl Suite {
    pub fn members(self) -> &'static [u8] {
        match self {
            Suite::Exact => &[1, 2, 7],
            Suite::Statistical => &[3, 4, 5, 6, 8, 9],
            Suite::All => &CRITERIA,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Exact => "exact",
            Suite::Statistical => "statistical",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub config: ExperimentConfig,
    pub reports: Vec<StatReport>,
    pub runtime: f64,
}

impl CriterionOutcome {
    pub fn statistical_tests(&self) -> usize {
        self.reports.iter().filter(|r| r.tolerance.is_statistical()).count()
    }

    pub fn statistical_failures(&self) -> usize {
        self.reports.iter().filter(|r| r.tolerance.is_statistical() && !r.pass).count()
    }

    pub fn hard_failures(&self) -> usize {
        self.reports.iter().filter(|r| !r.tolerance.is_statistical() && !r.pass).count()
    }

    pub fn allowed_failures(&self) -> usize {
        allowed_failures(self.statistical_tests())
    }

    pub fn pass(&self) -> bool {
        self.hard_failures() == 0 && self.statistical_failures() <= self.allowed_failures()
    }

    pub fn summary_line(&self) -> String {
        format!(
            "criterion {}: {} [{}] {} reports, {} hard failures, {}/{} sigma failures (allowed {}), {:.1}s",
            self.id,
            if self.pass() { "PASS" } else { "FAIL" },
            self.title,
            self.reports.len(),
            self.hard_failures(),
            self.statistical_failures(),
            self.statistical_tests(),
            self.allowed_failures(),
            self.runtime,
        )
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "word algebra",
        2 => "trace identity",
        3 => "Poisson marginals",
        4 => "transposition birth/death rates",
        5 => "halving chain generator",
        6 => "covariance closed forms",
        7 => "analytic limit chain",
        8 => "halving/doubling duality",
        9 => "Gaussianity at d=20",
        _ => panic!("no criterion {id}"),
    }
}

/// Pinned configuration of criterion `id`; `seed` is mixed with the id.
pub fn criterion_config(id: u8, seed: u64) -> ExperimentConfig {
    let base = ExperimentConfig {
        experiment: format!("criterion-{id}"),
        seed: seed.wrapping_mul(1000).wrapping_add(id as u64),
        ..ExperimentConfig::default()
    };
    match id {
        1 => ExperimentConfig { d: 3, k_max: 8, replicas: 1, ..base },
        2 => ExperimentConfig { k_max: 10, replicas: 50, ..base },
        3 => ExperimentConfig { d: 2, n: 2000, k_max: 4, replicas: 10_000, ..base },
        4 => ExperimentConfig { d: 2, n: 2000, k_max: 3, s0: 200.0, replicas: 16, ..base },
        5 => ExperimentConfig { d: 2, horizon: 8.0, t0: 1.0, k_max: 3, replicas: 10_000, ..base },
        6 => ExperimentConfig { d: 2, horizon: 8.0, t0: 0.5, s0: 0.3, k_max: 3, grid: "2x2".into(), replicas: 20_000, ..base },
        7 => ExperimentConfig { t0: 30.0, replicas: 1, ..base },
        8 => ExperimentConfig { d: 2, k_max: 3, t0: 0.5, replicas: 100_000, ..base },
        9 => ExperimentConfig { d: 20, k_max: 2, t0: 0.5, s0: 0.5, grid: "1x1".into(), replicas: 10_000, ..base },
        _ => panic!("no criterion {id}"),
    }
}

/// Graph shapes `(d, n)` of the trace-identity criterion.
pub const SPECTRA_SHAPES: [(usize, usize); 9] =
    [(1, 50), (2, 50), (3, 50), (1, 200), (2, 200), (3, 200), (1, 500), (2, 500), (3, 500)];

pub fn run_criterion_with(id: u8, cfg: &ExperimentConfig) -> CriterionOutcome {
    let start = Instant::now();
    let reports = match id {
        1 => run_word_algebra(cfg),
        2 => run_spectra_identity(cfg, &SPECTRA_SHAPES),
        3 => run_poisson_check(cfg, 0.03),
        4 => run_bd_rate_check(cfg),
        5 => run_halving_check(cfg),
        6 => run_cov_check(cfg),
        7 => run_gff_limit_check(cfg.t0),
        8 => run_duality_check(cfg),
        9 => run_gaussian_check(cfg, 0.05),
        _ => panic!("no criterion {id}"),
    };
    CriterionOutcome {
        id,
        title: title(id),
        config: cfg.clone(),
        reports,
        runtime: start.elapsed().as_secs_f64(),
    }
}

pub fn run_criterion(id: u8, seed: u64) -> CriterionOutcome {
    run_criterion_with(id, &criterion_config(id, seed))
}

pub fn validate(suite: Suite, seed: u64) -> Vec<CriterionOutcome> {
    suite.members().iter().map(|&id| run_criterion(id, seed)).collect()
}
