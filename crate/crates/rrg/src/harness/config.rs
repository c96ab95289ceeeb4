//! Experiment configuration and its TOML form.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot write config: {0}")]
    Write(#[from] toml::ser::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Every knob an experiment may read. Unused fields are ignored by each check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub d: usize,
    /// Graph size for fixed-`n` experiments.
    pub n: usize,
    /// Horizon `T` of the dimension clock.
    pub horizon: f64,
    pub t0: f64,
    pub s0: f64,
    pub k_max: usize,
    /// Truncation length for the limit field; `None` picks one from the tail bound.
    pub l_max: Option<usize>,
    /// Grid as `"NTxNS"`.
    pub grid: String,
    pub replicas: usize,
    pub seed: u64,
    /// Width of the acceptance band in standard errors.
    pub sigmas: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: "custom".into(),
            d: 2,
            n: 2000,
            horizon: 8.0,
            t0: 1.0,
            s0: 1.0,
            k_max: 3,
            l_max: None,
            grid: "3x3".into(),
            replicas: 1000,
            seed: 1,
            sigmas: 3.0,
        }
    }
}

/// Parse `"NTxNS"`.
pub fn parse_grid(s: &str) -> Result<(usize, usize), ConfigError> {
    let bad = || ConfigError::Invalid(format!("grid {s:?} is not NTxNS"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let nt: usize = a.trim().parse().map_err(|_| bad())?;
    let ns: usize = b.trim().parse().map_err(|_| bad())?;
    if nt == 0 || ns == 0 {
        return Err(bad());
    }
    Ok((nt, ns))
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: &str| Err(ConfigError::Invalid(m.into()));
        if self.d == 0 {
            return fail("d must be positive");
        }
        if self.k_max == 0 {
            return fail("k_max must be positive");
        }
        if self.replicas == 0 {
            return fail("replicas must be positive");
        }
        if !(self.t0 >= 0.0 && self.s0 >= 0.0 && self.horizon >= 0.0) {
            return fail("times must be non-negative");
        }
        if !(self.sigmas > 0.0) {
            return fail("sigmas must be positive");
        }
        if let Some(l) = self.l_max {
            if l < self.k_max {
                return fail("l_max must be at least k_max");
            }
        }
        parse_grid(&self.grid)?;
        Ok(())
    }

    pub fn grid_shape(&self) -> (usize, usize) {
        parse_grid(&self.grid).expect("validated grid")
    }

    pub fn from_toml(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String, ConfigError> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn partial_files_fill_defaults() {
        let cfg = ExperimentConfig::from_toml("d = 3\nreplicas = 10\nl_max = 12\n").unwrap();
        assert_eq!(cfg.d, 3);
        assert_eq!(cfg.l_max, Some(12));
        assert_eq!(cfg.n, ExperimentConfig::default().n);
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
        assert!(ExperimentConfig::from_toml("d = 0").is_err());
        assert!(ExperimentConfig::from_toml("grid = \"3by3\"").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("4x5").unwrap(), (4, 5));
        assert!(parse_grid("0x5").is_err());
        assert!(parse_grid("45").is_err());
    }

    proptest! {
        #[test]
        fn toml_round_trip(d in 1usize..30, n in 1usize..100_000, t0 in 0.0f64..10.0, seed in 0u64..(i64::MAX as u64),
                           l in proptest::option::of(10usize..40), nt in 1usize..9, ns in 1usize..9) {
            let cfg = ExperimentConfig { d, n, t0, seed, l_max: l, grid: format!("{nt}x{ns}"), ..Default::default() };
            let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
