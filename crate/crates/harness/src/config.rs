//! Flat `key = value` experiment configuration.
//!
//! Lines are UTF-8, `#` starts a comment, lists are comma separated.
//! Unknown and repeated keys are rejected.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use stratolevy::levy::{JumpLaw, LevyModel, ModelKind, DEFAULT_GAMMA_CUTOFF, MAX_CELLS};

use crate::error::HarnessError;
use crate::integrand::Integrand;

const KEYS: &[&str] = &[
    "suite",
    "model",
    "horizon",
    "volatility",
    "drift",
    "intensity",
    "jump_law",
    "jump_size",
    "jump_mean",
    "jump_low",
    "jump_high",
    "compensated",
    "cutoff",
    "n",
    "orders",
    "ladder",
    "replicas",
    "seed",
    "integrand",
    "integrand_value",
    "integrand_rate",
    "integrand_low",
    "integrand_high",
    "integrand_coefficients",
    "statistics",
    "out",
];

/// Statistics computed by the Monte Carlo suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Statistic {
    Diagonal,
    BrownianHuMeyer,
    Covariance,
}

impl Statistic {
    fn parse(s: &str) -> Result<Self, HarnessError> {
        match s {
            "diagonal" => Ok(Statistic::Diagonal),
            "brownian_hu_meyer" => Ok(Statistic::BrownianHuMeyer),
            "covariance" => Ok(Statistic::Covariance),
            _ => Err(HarnessError::Config(format!("unknown statistic `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub suite: String,
    pub model: LevyModel,
    pub n: usize,
    pub orders: Vec<usize>,
    pub ladder: Vec<usize>,
    pub replicas: usize,
    pub seed: u64,
    pub integrand: Integrand,
    /// Empty means every statistic that applies to the model.
    pub statistics: Vec<Statistic>,
    pub out: Option<PathBuf>,
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, HarnessError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(HarnessError::Config(format!("line {}: expected `key = value`", i + 1)));
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(HarnessError::Config(format!("line {}: unknown key `{key}`", i + 1)));
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(HarnessError::Config(format!("line {}: repeated key `{key}`", i + 1)));
        }
    }
    Ok(map)
}

struct Pairs(BTreeMap<String, String>);

impl Pairs {
    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, HarnessError> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| HarnessError::Config(format!("`{key}`: cannot parse `{v}`"))),
        }
    }

    fn str(&self, key: &str, default: &str) -> String {
        self.0.get(key).cloned().unwrap_or_else(|| default.to_string())
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, HarnessError> {
        let Some(v) = self.0.get(key) else { return Ok(None) };
        if v.is_empty() {
            return Ok(Some(Vec::new()));
        }
        v.split(',')
            .map(|s| {
                let s = s.trim();
                s.parse().map_err(|_| HarnessError::Config(format!("`{key}`: cannot parse `{s}`")))
            })
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let p = Pairs(parse_pairs(text)?);
        let horizon: f64 = p.get("horizon", 1.0)?;
        let model_name = p.str("model", "brownian");
        let kind = match model_name.as_str() {
            "brownian" => ModelKind::Brownian { volatility: p.get("volatility", 1.0)?, drift: p.get("drift", 0.0)? },
            "compensated_poisson" => ModelKind::CompensatedPoisson { intensity: p.get("intensity", 1.0)? },
            "compound_poisson" => {
                let law = match p.str("jump_law", "constant").as_str() {
                    "constant" => JumpLaw::Constant(p.get("jump_size", 1.0)?),
                    "exponential" => JumpLaw::Exponential { mean: p.get("jump_mean", 1.0)? },
                    "uniform" => JumpLaw::Uniform { low: p.get("jump_low", 0.0)?, high: p.get("jump_high", 1.0)? },
                    other => return Err(HarnessError::Config(format!("unknown jump law `{other}`"))),
                };
                ModelKind::CompoundPoisson {
                    intensity: p.get("intensity", 1.0)?,
                    law,
                    compensated: p.get("compensated", false)?,
                }
            }
            "gamma" => ModelKind::GammaSubordinator { cutoff: p.get("cutoff", DEFAULT_GAMMA_CUTOFF)? },
            other => return Err(HarnessError::Config(format!("unknown model `{other}`"))),
        };
        let model = LevyModel::new(kind, horizon)?;

        let n: usize = p.get("n", 2)?;
        if n == 0 {
            return Err(HarnessError::Config("`n` must be >= 1".into()));
        }
        let orders = p.list("orders")?.unwrap_or_else(|| vec![1; n]);
        if orders.len() != n || orders.contains(&0) {
            return Err(HarnessError::Config(format!("`orders` must list {n} positive integers")));
        }
        let ladder: Vec<usize> = p.list("ladder")?.unwrap_or_else(|| (6..=12).map(|k| 1usize << k).collect());
        validate_ladder(&ladder)?;
        let replicas: usize = p.get("replicas", 1000)?;
        if replicas == 0 {
            return Err(HarnessError::Config("`replicas` must be >= 1".into()));
        }
        let integrand = Integrand::from_pairs(
            &p.str("integrand", "constant"),
            p.get("integrand_value", 1.0)?,
            p.get("integrand_rate", 1.0)?,
            p.get("integrand_low", 0.0)?,
            p.get("integrand_high", 0.5)?,
            p.list("integrand_coefficients")?.unwrap_or_else(|| vec![1.0, 1.0]),
        )?;
        let mut statistics = Vec::new();
        for s in p.list::<String>("statistics")?.unwrap_or_default() {
            statistics.push(Statistic::parse(&s)?);
        }
        statistics.sort();
        statistics.dedup();
        Ok(Self {
            suite: p.str("suite", "mc"),
            model,
            n,
            orders,
            ladder,
            replicas,
            seed: p.get("seed", 0)?,
            integrand,
            statistics,
            out: p.0.get("out").map(PathBuf::from),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn wants(&self, s: Statistic) -> bool {
        self.statistics.is_empty() || self.statistics.contains(&s)
    }
}

/// Strictly increasing powers of two, nonempty, within the simulator range.
pub fn validate_ladder(ladder: &[usize]) -> Result<(), HarnessError> {
    if ladder.is_empty() {
        return Err(HarnessError::Config("the N ladder is empty".into()));
    }
    if ladder.iter().any(|&n| n == 0 || !n.is_power_of_two() || n > MAX_CELLS) {
        return Err(HarnessError::Config(format!("ladder entries must be powers of two up to {MAX_CELLS}")));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::Config("the N ladder must be strictly increasing".into()));
    }
    Ok(())
}
