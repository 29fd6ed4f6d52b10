use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use paradot::bounds::Exponent;
use paradot::constructions::{largest_divisor_at_most, ConstructionKind};
use paradot::FieldSpec;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Subgroup order for a construction cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KRule {
    Fixed(u64),
    /// Largest divisor of `p − 1` not exceeding `⌈p^power⌉`.
    Power {
        power: Exponent,
    },
}

impl Default for KRule {
    fn default() -> Self {
        KRule::Power {
            power: Exponent::Ratio(1, 2),
        }
    }
}

impl KRule {
    pub fn resolve(&self, field: &FieldSpec) -> u64 {
        match *self {
            KRule::Fixed(k) => k,
            KRule::Power { power } => largest_divisor_at_most(field, power.ceil_pow(field.p())),
        }
    }

    pub fn label(&self) -> String {
        match self {
            KRule::Fixed(k) => format!("k={k}"),
            KRule::Power { power } => format!("k~p^{power}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum Family {
    /// `⌈p^alpha⌉` uniform points of `P_d`, capped at `|P_d|`.
    Random { alpha: Exponent },
    Construction {
        kind: ConstructionKind,
        #[serde(default)]
        k: KRule,
    },
    /// Slope-`i` lines in the plane; only primes `≡ 1 (mod 4)` succeed.
    Lines { lines: usize, per_line: usize },
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::Random { alpha } => format!("random(alpha={alpha})"),
            Family::Construction { kind, k } => format!("{}({})", kind.label(), k.label()),
            Family::Lines { lines, per_line } => format!("lines({lines}x{per_line})"),
        }
    }

    /// Dimensions this family runs in, given the configured ones.
    pub fn dims(&self, configured: &[usize]) -> Vec<usize> {
        match self {
            Family::Random { .. } => configured.to_vec(),
            Family::Construction { kind, .. } => {
                let class = match kind {
                    ConstructionKind::Even2Mod4 => 2,
                    ConstructionKind::Even0Mod4 => 0,
                    ConstructionKind::Odd3Mod4 => 3,
                    ConstructionKind::Lines => return vec![2],
                };
                configured
                    .iter()
                    .copied()
                    .filter(|d| d % 4 == class && *d >= 2)
                    .collect()
            }
            Family::Lines { .. } => vec![2],
        }
    }
}

fn default_dims() -> Vec<usize> {
    vec![3]
}

fn default_trials() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub primes: Vec<u64>,
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    pub families: Vec<Family>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; `None` uses every core.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Fill `runtime_ms`. Off by default so output bytes do not depend on timing.
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl SweepConfig {
    pub fn parse(text: &str) -> anyhow::Result<SweepConfig> {
        let config: SweepConfig = serde_json::from_str(text).map_err(|e| {
            anyhow::anyhow!(
                "config error at line {}, column {}: {e}",
                e.line(),
                e.column()
            )
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> anyhow::Result<SweepConfig> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        SweepConfig::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.primes.is_empty() || self.families.is_empty() || self.dims.is_empty() {
            bail!("primes, dims and families must be non-empty");
        }
        for &p in &self.primes {
            FieldSpec::new(p).with_context(|| format!("primes: {p}"))?;
        }
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.threads == Some(0) {
            bail!("threads must be at least 1");
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d < 2) {
            bail!("dims: {d} is below 2");
        }
        for family in &self.families {
            if let Family::Random { alpha } = family {
                for &d in &self.dims {
                    let a = alpha.value();
                    if !(a > 0.0 && a <= (d - 1) as f64) {
                        bail!(
                            "families: alpha = {alpha} outside (0, {}] for d = {d}",
                            d - 1
                        );
                    }
                }
            }
        }
        Ok(())
    }
}
