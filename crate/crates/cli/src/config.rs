//! Experiment and suite file schemas. Unknown fields are rejected so a
//! typo fails loudly instead of silently falling back to a default.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub game: GameSection,
    pub measure: Option<MeasureSection>,
    pub hedge: Option<HedgeSection>,
    pub ladder: Option<LadderSection>,
    pub strategy: StrategySection,
    pub reality: RealitySection,
    pub doob: Option<DoobSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    /// "single-hedge" | "hedge-set" | "mz"
    pub variant: String,
    pub horizon: u64,
    #[serde(default)]
    pub seed: u64,
    /// Generator name; must match the engine's schema when present.
    pub rng: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSection {
    /// "uniform" | "discrete" | "exponential" | "pareto"
    pub kind: String,
    pub points: Option<Vec<f64>>,
    pub atoms: Option<Vec<[f64; 2]>>,
    pub rate: Option<f64>,
    pub tail_index: Option<f64>,
    pub scale: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HedgeSection {
    /// "power" | "call" | "powered-call" | "abs" | "abs-log-sq" |
    /// "abs-log1p" | "constant" | "table"
    pub kind: String,
    pub exponent: Option<f64>,
    pub strike: Option<f64>,
    pub r: Option<f64>,
    pub level: Option<u64>,
    pub value: Option<f64>,
    pub knots: Option<Vec<[f64; 2]>>,
    /// Explicit price; when absent the hedge is priced under [measure].
    pub nu: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSection {
    /// "call" | "powered-call" | "call-at-powered-strikes"
    pub family: String,
    pub r: Option<f64>,
    pub depth: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySection {
    pub id: String,
    pub epsilon: Option<f64>,
    pub mirror: Option<bool>,
    pub cutoff: Option<f64>,
    pub weight_exp: Option<f64>,
    pub r: Option<f64>,
    pub scale: Option<f64>,
    pub upcross_a: Option<f64>,
    pub upcross_b: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealitySection {
    pub id: String,
    pub value: Option<f64>,
    pub r: Option<f64>,
    pub nu: Option<f64>,
    /// Move file for "replay", resolved against the config's directory.
    pub path: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoobSection {
    pub c: f64,
    pub runs: u64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<String>,
    pub trajectory: Option<bool>,
    pub detectors: Option<bool>,
    pub ladder: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub experiment: Vec<SuiteEntry>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    /// Experiment config path, resolved against the suite file's directory.
    pub config: String,
    pub name: Option<String>,
    /// "pass" (default) | "collateral-violation"
    pub expect: Option<String>,
}

pub fn load_experiment(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg: ExperimentConfig =
        toml::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))?;
    if cfg.schema_version != SCHEMA_VERSION {
        bail!(
            "{}: schema_version {} is not supported (this build reads version {})",
            path.display(),
            cfg.schema_version,
            SCHEMA_VERSION
        );
    }
    if let Some(rng) = &cfg.game.rng {
        if rng != gtpsim_core::RNG_SCHEMA {
            bail!(
                "{}: [game].rng names generator '{}' but this build provides '{}'",
                path.display(),
                rng,
                gtpsim_core::RNG_SCHEMA
            );
        }
    }
    if cfg.game.horizon == 0 {
        bail!("{}: [game].horizon must be at least 1", path.display());
    }
    Ok(cfg)
}

pub fn load_suite(path: &Path) -> Result<SuiteConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read suite {}", path.display()))?;
    let suite: SuiteConfig =
        toml::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))?;
    if suite.schema_version != SCHEMA_VERSION {
        bail!(
            "{}: schema_version {} is not supported (this build reads version {})",
            path.display(),
            suite.schema_version,
            SCHEMA_VERSION
        );
    }
    for e in &suite.experiment {
        if let Some(x) = &e.expect {
            if x != "pass" && x != "collateral-violation" {
                bail!(
                    "{}: entry '{}' expects '{x}', which is neither 'pass' nor 'collateral-violation'",
                    path.display(),
                    e.config
                );
            }
        }
    }
    Ok(suite)
}
