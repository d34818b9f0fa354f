//! Sweep configuration and its text format.
//!
//! One `key = value` per line. `#` starts a comment that runs to the end of
//! the line; blank lines are ignored. Keys:
//!
//! ```text
//! n        = 1000
//! alpha    = 0.5,0.25,0.25      # or: q = 3 for uniform colors
//! omega    = -3*llog, 0, 3*llog # reals; k*llog means k * ln ln n
//! trials   = 50
//! seed     = 42
//! suite    = corners | random:10 | explicit:500,250,250;334,333,333
//! checks   = pm,walk,isolated,mcp
//! workers  = 4
//! timings  = false
//! ```

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ColorProfile, ColorSpec};
use crate::oracle::DEFAULT_DP_LIMIT;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error("workers must be at least 1")]
    ZeroWorkers,
    #[error("omega grid is empty")]
    EmptyGrid,
    #[error("omega value {0} is not finite")]
    NonFiniteOmega(f64),
    #[error("cannot expand k*llog at n = {0}: needs n >= 3")]
    LlogDomain(usize),
    #[error("walk check enabled with an empty profile suite")]
    EmptySuite,
    #[error("exact MCP check needs n <= {limit}, got {n}")]
    McpTooLarge { n: usize, limit: usize },
    #[error("profile {profile}: {message}")]
    BadProfile { profile: String, message: String },
    #[error("invalid value: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileSuite {
    Corners,
    /// Corners plus this many profiles drawn uniformly from the simplex.
    RandomK(usize),
    /// Corners plus these profiles.
    Explicit(Vec<ColorProfile>),
}

impl FromStr for ProfileSuite {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let s = s.trim();
        if s == "corners" {
            return Ok(ProfileSuite::Corners);
        }
        if let Some(k) = s.strip_prefix("random:") {
            return k
                .trim()
                .parse()
                .map(ProfileSuite::RandomK)
                .map_err(|_| ConfigError::Invalid(format!("suite {s:?}")));
        }
        if let Some(list) = s.strip_prefix("explicit:") {
            let profiles = list
                .split(';')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(|p| {
                    ColorProfile::parse(p).map_err(|e| ConfigError::BadProfile {
                        profile: p.into(),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<_, _>>()?;
            return Ok(ProfileSuite::Explicit(profiles));
        }
        Err(ConfigError::Invalid(format!(
            "suite {s:?}: expected corners, random:K or explicit:P;P"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub per_color_pm: bool,
    pub walk: bool,
    pub isolated: bool,
    pub mcp_exact: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks {
            per_color_pm: true,
            walk: true,
            isolated: true,
            mcp_exact: false,
        }
    }
}

impl FromStr for Checks {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let mut c = Checks {
            per_color_pm: false,
            walk: false,
            isolated: false,
            mcp_exact: false,
        };
        for name in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match name {
                "pm" => c.per_color_pm = true,
                "walk" => c.walk = true,
                "isolated" => c.isolated = true,
                "mcp" => c.mcp_exact = true,
                other => return Err(ConfigError::Invalid(format!("unknown check {other:?}"))),
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub colors: ColorSpec,
    pub omega_grid: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub profile_suite: ProfileSuite,
    pub checks: Checks,
    pub workers: usize,
    /// Fill the `ms` column. Off by default since timings break byte-identical output.
    pub record_timings: bool,
}

impl ExperimentConfig {
    pub fn new(n: usize, colors: ColorSpec) -> Self {
        ExperimentConfig {
            n,
            colors,
            omega_grid: vec![0.0],
            trials: 1,
            base_seed: 0,
            profile_suite: ProfileSuite::Corners,
            checks: Checks::default(),
            workers: 1,
            record_timings: false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(ConfigError::ZeroTrials);
        }
        if self.workers == 0 {
            return Err(ConfigError::ZeroWorkers);
        }
        if self.n == 0 {
            return Err(ConfigError::Invalid("n must be positive".into()));
        }
        if self.omega_grid.is_empty() {
            return Err(ConfigError::EmptyGrid);
        }
        if let Some(&w) = self.omega_grid.iter().find(|w| !w.is_finite()) {
            return Err(ConfigError::NonFiniteOmega(w));
        }
        if self.checks.walk {
            match &self.profile_suite {
                ProfileSuite::RandomK(0) => return Err(ConfigError::EmptySuite),
                ProfileSuite::Explicit(list) if list.is_empty() => return Err(ConfigError::EmptySuite),
                _ => {}
            }
        }
        if let ProfileSuite::Explicit(list) = &self.profile_suite {
            for p in list {
                if p.q() != self.colors.q() || p.total() != self.n {
                    return Err(ConfigError::BadProfile {
                        profile: p.to_string(),
                        message: format!("expected {} coordinates summing to {}", self.colors.q(), self.n),
                    });
                }
            }
        }
        if self.checks.mcp_exact && (self.n > DEFAULT_DP_LIMIT || self.colors.q() > crate::oracle::MAX_COLORS) {
            return Err(ConfigError::McpTooLarge {
                n: self.n,
                limit: DEFAULT_DP_LIMIT,
            });
        }
        let ln_n = (self.n as f64).ln();
        for &w in &self.omega_grid {
            if w >= ln_n {
                log::warn!("omega = {w} >= ln n = {ln_n:.3}: outside the o(log n) regime");
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut n = None;
        let mut alphas = None;
        let mut q = None;
        let mut omega = None;
        let mut config = ExperimentConfig::new(1, ColorSpec::uniform(1).expect("q = 1 is valid"));
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.split('#').next().unwrap_or("").trim();
            if trimmed.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Parse { line, message };
            let (key, value) = trimmed.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<u64>().map_err(|_| err(format!("{key}: not an integer: {v:?}")));
            match key {
                "n" => n = Some(num(value)? as usize),
                "q" => q = Some(num(value)? as usize),
                "alpha" => alphas = Some(parse_reals(value).map_err(&err)?),
                "omega" => omega = Some(value.to_string()),
                "trials" => config.trials = num(value)? as usize,
                "seed" => config.base_seed = num(value)?,
                "workers" => config.workers = num(value)? as usize,
                "suite" => config.profile_suite = value.parse().map_err(|e: ConfigError| err(e.to_string()))?,
                "checks" => config.checks = value.parse().map_err(|e: ConfigError| err(e.to_string()))?,
                "timings" => {
                    config.record_timings = value
                        .parse()
                        .map_err(|_| err(format!("timings: expected true or false, got {value:?}")))?
                }
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        config.n = n.ok_or_else(|| ConfigError::Invalid("missing key n".into()))?;
        config.colors = match (alphas, q) {
            (Some(a), q) => {
                if q.is_some_and(|q| q != a.len()) {
                    return Err(ConfigError::Invalid("q disagrees with the length of alpha".into()));
                }
                ColorSpec::new(a).map_err(|e| ConfigError::Invalid(e.to_string()))?
            }
            (None, Some(q)) => ColorSpec::uniform(q).map_err(|e| ConfigError::Invalid(e.to_string()))?,
            (None, None) => return Err(ConfigError::Invalid("missing key alpha or q".into())),
        };
        if let Some(text) = omega {
            config.omega_grid = parse_omega_list(&text, config.n)?;
        }
        config.validate()?;
        Ok(config)
    }
}

fn parse_reals(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}")))
        .collect()
}

/// A real, or `k*llog` for `k * ln ln n`.
pub fn parse_omega(text: &str, n: usize) -> Result<f64, ConfigError> {
    let t = text.trim();
    let value = match t.strip_suffix("llog") {
        Some(head) => {
            if n < 3 {
                return Err(ConfigError::LlogDomain(n));
            }
            let k = match head.trim().strip_suffix('*') {
                Some(k) => k.trim().parse::<f64>().map_err(|_| ConfigError::Invalid(format!("omega {t:?}")))?,
                None if head.trim().is_empty() => 1.0,
                None => return Err(ConfigError::Invalid(format!("omega {t:?}"))),
            };
            k * (n as f64).ln().ln()
        }
        None => t.parse::<f64>().map_err(|_| ConfigError::Invalid(format!("omega {t:?}")))?,
    };
    if !value.is_finite() {
        return Err(ConfigError::NonFiniteOmega(value));
    }
    Ok(value)
}

pub fn parse_omega_list(text: &str, n: usize) -> Result<Vec<f64>, ConfigError> {
    text.split(',').map(|t| parse_omega(t, n)).collect()
}
