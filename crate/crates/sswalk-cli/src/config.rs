//! Experiment configuration: the resolved, serializable record of exactly
//! what a run computed. CLI flags mirror config-file keys one-to-one and
//! take precedence over them.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Output encoding for result files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Ndjson,
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OutputFormat::Csv => write!(f, "csv"),
            OutputFormat::Ndjson => write!(f, "ndjson"),
        }
    }
}

/// Angle field: accepts a plain number or a "pi"-fraction string such as
/// "pi/4", "-2pi/3", or "3*pi/8" in config files and on the command line.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum AngleValue {
    Number(f64),
    Symbolic(String),
}

/// Parses an angle given in radians or as a pi fraction.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s = text.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let err = || anyhow!("invalid angle '{text}': expected radians or a pi fraction like 'pi/4'");
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, s),
    };
    let lower = rest.to_ascii_lowercase();
    let Some(pi_pos) = lower.find("pi") else {
        return Err(err());
    };
    let coeff_text = lower[..pi_pos].trim_end_matches('*').trim();
    let coeff = if coeff_text.is_empty() {
        1.0
    } else {
        coeff_text.parse::<f64>().map_err(|_| err())?
    };
    let tail = lower[pi_pos + 2..].trim();
    let denom = if tail.is_empty() {
        1.0
    } else if let Some(d) = tail.strip_prefix('/') {
        let d: f64 = d.trim().parse().map_err(|_| err())?;
        if d == 0.0 {
            return Err(err());
        }
        d
    } else {
        return Err(err());
    };
    Ok(sign * coeff * std::f64::consts::PI / denom)
}

fn angle_to_f64(v: &AngleValue) -> Result<f64> {
    match v {
        AngleValue::Number(x) => Ok(*x),
        AngleValue::Symbolic(s) => parse_angle(s),
    }
}

/// Raw config-file document. Every key mirrors a CLI flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub claim: Option<String>,
    theta1: Option<AngleValue>,
    theta2: Option<AngleValue>,
    theta2b: Option<AngleValue>,
    pub n: Option<usize>,
    pub n2: Option<usize>,
    pub steps: Option<usize>,
    pub kgrid: Option<usize>,
    pub tgrid: Option<usize>,
    pub tolerance: Option<f64>,
    pub window: Option<usize>,
    pub boundary: Option<usize>,
    pub smoothing: Option<usize>,
    pub twod: Option<bool>,
    pub format: Option<OutputFormat>,
    pub out: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let cfg: ConfigFile = serde_json::from_str(&text)
            .with_context(|| format!("malformed config file {}", path.display()))?;
        Ok(cfg)
    }

    pub fn theta1(&self) -> Result<Option<f64>> {
        self.theta1.as_ref().map(angle_to_f64).transpose()
    }
    pub fn theta2(&self) -> Result<Option<f64>> {
        self.theta2.as_ref().map(angle_to_f64).transpose()
    }
    pub fn theta2b(&self) -> Result<Option<f64>> {
        self.theta2b.as_ref().map(angle_to_f64).transpose()
    }
}

/// Fully resolved run record; embedded verbatim in every output file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claim: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta2b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n2: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kgrid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tgrid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twod: Option<bool>,
    pub format: OutputFormat,
    /// Output destination; not serialized so a result file's bytes do not
    /// depend on its own name.
    #[serde(skip)]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    /// Wraps every angle back into (-pi, pi] and checks positivity rules.
    pub fn validate(&mut self) -> Result<()> {
        for slot in [&mut self.theta1, &mut self.theta2, &mut self.theta2b] {
            if let Some(v) = slot {
                *v = sswalk::operators::CoinAngle::new(*v).value();
            }
        }
        for (name, value) in [
            ("n", self.n),
            ("n2", self.n2),
            ("steps", self.steps),
            ("kgrid", self.kgrid),
            ("tgrid", self.tgrid),
        ] {
            if value == Some(0) {
                bail!("{name} must be positive");
            }
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                bail!("tolerance must be positive, got {t}");
            }
        }
        Ok(())
    }
}
