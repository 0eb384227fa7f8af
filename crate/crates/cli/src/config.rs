use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use netreduce_core::centrality::CriterionCode;
use netreduce_core::evidential::AttributeWeights;
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_BETA: f64 = 0.9;
pub const DEFAULT_K: usize = 10;
pub const DEFAULT_X_MAX: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Settings that can come from flags, environment variables or the config
/// file. `None` means "not given at this layer".
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub case: Option<String>,
    pub criteria: Option<Vec<String>>,
    pub criterion: Option<String>,
    pub k: Option<usize>,
    pub beta: Option<f64>,
    pub weights: Option<Vec<f64>>,
    pub x_max: Option<f64>,
    pub retain_generators: Option<bool>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

impl Layer {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))
            .map_err(CliError::usage_from)?;
        toml::from_str(&text)
            .with_context(|| format!("invalid config file {}", path.display()))
            .map_err(CliError::usage_from)
    }

    /// Fills every unset field of `self` from `lower`.
    pub fn over(self, lower: Layer) -> Layer {
        Layer {
            case: self.case.or(lower.case),
            criteria: self.criteria.or(lower.criteria),
            criterion: self.criterion.or(lower.criterion),
            k: self.k.or(lower.k),
            beta: self.beta.or(lower.beta),
            weights: self.weights.or(lower.weights),
            x_max: self.x_max.or(lower.x_max),
            retain_generators: self.retain_generators.or(lower.retain_generators),
            out: self.out.or(lower.out),
            format: self.format.or(lower.format),
            seed: self.seed.or(lower.seed),
        }
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub case: String,
    pub criteria: Vec<CriterionCode>,
    pub criterion: CriterionCode,
    pub k: usize,
    pub beta: f64,
    /// Weights of C2 and C3 inside the comprehensive criterion.
    pub weights: AttributeWeights,
    pub x_max: f64,
    pub retain_generators: bool,
    pub out: PathBuf,
    pub format: Format,
    pub seed: u64,
}

fn parse_code(s: &str) -> Result<CriterionCode, CliError> {
    s.parse().map_err(|e: netreduce_core::Error| CliError::usage(e.to_string()))
}

impl RunConfig {
    pub fn resolve(layer: Layer) -> Result<Self, CliError> {
        let criteria = match layer.criteria {
            Some(list) => {
                let mut codes = list.iter().map(|s| parse_code(s)).collect::<Result<Vec<_>, _>>()?;
                codes.sort();
                codes.dedup();
                if codes.is_empty() {
                    return Err(CliError::usage("--criteria needs at least one criterion"));
                }
                codes
            }
            None => CriterionCode::ALL.to_vec(),
        };
        let criterion = match layer.criterion {
            Some(s) => parse_code(&s)?,
            None => CriterionCode::C1,
        };
        let k = layer.k.unwrap_or(DEFAULT_K);
        if k == 0 {
            return Err(CliError::usage("--k must be at least 1"));
        }
        let beta = layer.beta.unwrap_or(DEFAULT_BETA);
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(CliError::usage(format!("--beta must lie in (0, 1], got {beta}")));
        }
        let weights = layer.weights.unwrap_or_else(|| vec![0.5, 0.5]);
        if weights.len() != 2 {
            return Err(CliError::usage(format!(
                "--weights takes two values (C2, C3), got {}",
                weights.len()
            )));
        }
        let weights = AttributeWeights::new(weights).map_err(|e| CliError::usage(e.to_string()))?;
        let x_max = layer.x_max.unwrap_or(DEFAULT_X_MAX);
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(CliError::usage(format!("--x-max must be positive, got {x_max}")));
        }
        Ok(Self {
            case: layer.case.unwrap_or_else(|| "ieee30".to_string()),
            criteria,
            criterion,
            k,
            beta,
            weights,
            x_max,
            retain_generators: layer.retain_generators.unwrap_or(true),
            out: layer.out.unwrap_or_else(|| PathBuf::from("out")),
            format: layer.format.unwrap_or(Format::Csv),
            seed: layer.seed.unwrap_or(0),
        })
    }
}
