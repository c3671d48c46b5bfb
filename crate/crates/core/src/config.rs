//! Experiment configs as flat key/value text.
//!
//! One `key = value` per line; `#` starts a comment; blank lines are
//! ignored. Matrix values are `k * m` whitespace-separated reals in
//! row-major order (alternative-major), or a single real broadcast to every
//! pair. `inf` is accepted where an uninformative prior variance is meant.
//!
//! ```text
//! # two alternatives, one scenario
//! k = 2
//! m = 1
//! budget = 2000
//! warmup = 10
//! sampling_var = 1
//! true_mean = 0 10
//! ```
//!
//! Required keys: `k`, `m`, `budget`, `warmup`. `true_mean` selects fixed
//! means; otherwise means are drawn from the prior, which then needs a
//! finite `prior_var`. Everything else has defaults; see [`parse_config`].

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::baselines::PolicyKind;
use crate::grid::Grid;
use crate::harness::{ExperimentConfig, MeanSource};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("config line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("config key {key}: {reason}")]
    Value { key: String, reason: String },
    #[error("config is missing required key {key}")]
    Missing { key: &'static str },
}

const KNOWN_KEYS: &[&str] = &[
    "k",
    "m",
    "budget",
    "warmup",
    "reps",
    "seed",
    "policy",
    "prior_mean",
    "prior_var",
    "sampling_var",
    "mean_source",
    "true_mean",
    "checkpoints",
    "checkpoint_every",
    "rocba_resolve_every",
];

struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<RawConfig, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    reason: format!("expected `key = value`, got {content:?}"),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(ConfigError::Syntax { line, reason: format!("unknown key {key:?}") });
            }
            if entries.insert(key.clone(), (line, value)).is_some() {
                return Err(ConfigError::Syntax { line, reason: format!("duplicate key {key:?}") });
            }
        }
        Ok(RawConfig { entries })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(_, value)| value)
    }
}

fn value_err(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.to_string(), reason: reason.into() }
}

fn parse_u64(key: &str, value: &str) -> Result<u64, ConfigError> {
    value.parse().map_err(|_| value_err(key, format!("expected an integer, got {value:?}")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse().map_err(|_| value_err(key, format!("expected a count, got {value:?}")))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse().map_err(|_| value_err(key, format!("expected a real, got {value:?}")))
}

/// Scalar broadcast or k*m row-major values.
fn parse_grid(key: &str, value: &str, k: usize, m: usize) -> Result<Grid, ConfigError> {
    let tokens: Vec<&str> = value.split_whitespace().collect();
    let mut parsed = Vec::with_capacity(tokens.len());
    for t in &tokens {
        parsed.push(parse_f64(key, t)?);
    }
    match parsed.len() {
        1 => Ok(Grid::filled(k, m, parsed[0])),
        n if n == k * m => Ok(Grid::from_rows(k, m, parsed)),
        n => Err(value_err(key, format!("expected 1 or {} values, got {n}", k * m))),
    }
}

fn parse_u64_list(key: &str, value: &str) -> Result<Vec<u64>, ConfigError> {
    value.split_whitespace().map(|t| parse_u64(key, t)).collect()
}

/// Parse a config from text. Defaults: `reps = 100`, `seed = 0`,
/// `policy = raoda`, `prior_mean = 0`, `prior_var = inf`,
/// `sampling_var = 1`, `rocba_resolve_every = 1`, checkpoints every 200
/// steps from warmup end to the budget. The result is not yet validated;
/// callers adjust budget/reps/seed and then run
/// [`ExperimentConfig::validate`].
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut raw = RawConfig::parse(text)?;
    let mut require = |key: &'static str| {
        raw.take(key).ok_or(ConfigError::Missing { key })
    };
    let k = parse_usize("k", &require("k")?)?;
    let m = parse_usize("m", &require("m")?)?;
    let budget = parse_u64("budget", &require("budget")?)?;
    let warmup = parse_u64("warmup", &require("warmup")?)?;

    let reps = match raw.take("reps") {
        Some(v) => parse_u64("reps", &v)?,
        None => 100,
    };
    let seed = match raw.take("seed") {
        Some(v) => parse_u64("seed", &v)?,
        None => 0,
    };
    let policy = match raw.take("policy") {
        Some(v) => v.parse::<PolicyKind>().map_err(|e| value_err("policy", e.to_string()))?,
        None => PolicyKind::Raoda,
    };
    let prior_mean = match raw.take("prior_mean") {
        Some(v) => parse_grid("prior_mean", &v, k, m)?,
        None => Grid::filled(k, m, 0.0),
    };
    let prior_var = match raw.take("prior_var") {
        Some(v) => parse_grid("prior_var", &v, k, m)?,
        None => Grid::filled(k, m, f64::INFINITY),
    };
    let sampling_var = match raw.take("sampling_var") {
        Some(v) => parse_grid("sampling_var", &v, k, m)?,
        None => Grid::filled(k, m, 1.0),
    };
    let true_mean = match raw.take("true_mean") {
        Some(v) => Some(parse_grid("true_mean", &v, k, m)?),
        None => None,
    };
    let mean_source = match raw.take("mean_source").as_deref() {
        Some("fixed") => match true_mean {
            Some(g) => MeanSource::Fixed(g),
            None => return Err(value_err("mean_source", "fixed means require true_mean")),
        },
        Some("prior") => {
            if true_mean.is_some() {
                return Err(value_err("mean_source", "prior-drawn means conflict with true_mean"));
            }
            MeanSource::DrawnFromPrior
        }
        Some(other) => {
            return Err(value_err("mean_source", format!("expected fixed or prior, got {other:?}")))
        }
        None => match true_mean {
            Some(g) => MeanSource::Fixed(g),
            None => MeanSource::DrawnFromPrior,
        },
    };
    let rocba_resolve_every = match raw.take("rocba_resolve_every") {
        Some(v) => {
            let n = parse_u64("rocba_resolve_every", &v)?;
            u32::try_from(n)
                .map_err(|_| value_err("rocba_resolve_every", format!("{n} is out of range")))?
        }
        None => 1,
    };

    let checkpoints_key = raw.take("checkpoints");
    let checkpoint_every = raw.take("checkpoint_every");

    let mut config = ExperimentConfig {
        alternatives: k,
        scenarios: m,
        total_budget: budget,
        warmup,
        macro_reps: reps,
        master_seed: seed,
        policy,
        prior_mean,
        prior_var,
        sampling_var,
        mean_source,
        checkpoints: Vec::new(),
        rocba_resolve_every,
    };
    config.checkpoints = match (checkpoints_key, checkpoint_every) {
        (Some(_), Some(_)) => {
            return Err(value_err("checkpoints", "conflicts with checkpoint_every"))
        }
        (Some(v), None) => parse_u64_list("checkpoints", &v)?,
        (None, Some(v)) => config.checkpoints_every(parse_u64("checkpoint_every", &v)?),
        (None, None) => config.default_checkpoints(),
    };
    debug_assert!(raw.entries.is_empty(), "all known keys are consumed above");
    Ok(config)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::PairIndex;

    const BASIC: &str = "\
        # toy instance\n\
        k = 2\n\
        m = 1\n\
        budget = 2000\n\
        warmup = 10\n\
        sampling_var = 1\n\
        true_mean = 0 10\n";

    #[test]
    fn parses_fixed_mean_instance() {
        let config = parse_config(BASIC).unwrap();
        assert_eq!(config.alternatives, 2);
        assert_eq!(config.scenarios, 1);
        assert_eq!(config.total_budget, 2000);
        assert_eq!(config.warmup, 10);
        assert_eq!(config.macro_reps, 100);
        assert_eq!(config.policy, PolicyKind::Raoda);
        let MeanSource::Fixed(means) = &config.mean_source else {
            panic!("true_mean implies fixed means");
        };
        assert_eq!(means[(1, 0)], 10.0);
        assert!(config.prior_var[(0, 0)].is_infinite());
        assert_eq!(config.checkpoints.first(), Some(&20));
        assert_eq!(config.checkpoints.last(), Some(&2000));
        config.validate().unwrap();
    }

    #[test]
    fn broadcast_and_row_major_grids() {
        let text = "k = 2\nm = 2\nbudget = 100\nwarmup = 2\n\
                    prior_var = 4\nprior_mean = 1 2 3 4\ntrue_mean = 0 0 1 1\n";
        let config = parse_config(text).unwrap();
        assert_eq!(config.prior_var[(1, 1)], 4.0);
        assert_eq!(config.prior_mean[PairIndex::new(0, 1)], 2.0);
        assert_eq!(config.prior_mean[PairIndex::new(1, 0)], 3.0);
    }

    #[test]
    fn prior_source_is_the_default_without_true_mean() {
        let text = "k = 2\nm = 1\nbudget = 100\nwarmup = 2\nprior_var = 1\n";
        let config = parse_config(text).unwrap();
        assert!(matches!(config.mean_source, MeanSource::DrawnFromPrior));
        config.validate().unwrap();
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected_with_line_numbers() {
        let err = parse_config("k = 2\nbanana = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }), "{err}");
        let err = parse_config("k = 2\nk = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }), "{err}");
    }

    #[test]
    fn grid_token_count_is_checked() {
        let text = "k = 2\nm = 2\nbudget = 100\nwarmup = 2\ntrue_mean = 1 2 3\n";
        let err = parse_config(text).unwrap_err();
        assert!(
            matches!(&err, ConfigError::Value { key, .. } if key == "true_mean"),
            "{err}"
        );
    }

    #[test]
    fn missing_required_key_is_named() {
        let err = parse_config("k = 2\nm = 1\nwarmup = 2\n").unwrap_err();
        assert!(matches!(err, ConfigError::Missing { key: "budget" }), "{err}");
    }

    #[test]
    fn explicit_checkpoints_and_strides() {
        let base = "k = 2\nm = 1\nbudget = 100\nwarmup = 2\ntrue_mean = 0 1\n";
        let with_list = format!("{base}checkpoints = 50 100\n");
        let config = parse_config(&with_list).unwrap();
        assert_eq!(config.checkpoints, vec![50, 100]);
        let with_stride = format!("{base}checkpoint_every = 48\n");
        let config = parse_config(&with_stride).unwrap();
        assert_eq!(config.checkpoints, vec![4, 52, 100]);
        let both = format!("{base}checkpoints = 50\ncheckpoint_every = 10\n");
        assert!(parse_config(&both).is_err());
    }

    #[test]
    fn mean_source_mismatches_are_rejected() {
        let text = "k = 2\nm = 1\nbudget = 100\nwarmup = 2\nmean_source = fixed\n";
        assert!(parse_config(text).is_err());
        let text = "k = 2\nm = 1\nbudget = 100\nwarmup = 2\n\
                    mean_source = prior\ntrue_mean = 0 1\n";
        assert!(parse_config(text).is_err());
    }

    #[test]
    fn policy_names_parse_case_insensitively() {
        let text = "k = 2\nm = 1\nbudget = 100\nwarmup = 2\ntrue_mean = 0 1\npolicy = ROCBA\n";
        let config = parse_config(text).unwrap();
        assert_eq!(config.policy, PolicyKind::Rocba);
    }
}
