//! Experiment configuration: flat `key = value` files, overridable by
//! command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use degcrit_core::asymptotics::Variant;
use degcrit_core::degset::DegreeSet;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}:{line}: expected `key = value`, got `{text}`")]
    Syntax { path: String, line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {reason}")]
    Value { key: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (csv or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Which grid the experiment walks: window parameters or raw edge counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Points {
    Mu(Vec<f64>),
    M(Vec<u64>),
}

impl Points {
    pub fn len(&self) -> usize {
        match self {
            Points::Mu(v) => v.len(),
            Points::M(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub degrees: String,
    pub n: usize,
    pub points: Points,
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    #[serde(with = "variant_serde")]
    pub variant: Variant,
    pub q_max: usize,
    pub max_attempts: u64,
}

mod variant_serde {
    use degcrit_core::asymptotics::Variant;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Variant, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Variant, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            degrees: "1,3,5,7".into(),
            n: 1000,
            points: Points::Mu(vec![0.0]),
            trials: 1000,
            seed: 1,
            jobs: 0,
            out: None,
            format: Format::Csv,
            variant: Variant::default(),
            q_max: 20,
            max_attempts: degcrit_core::sampler::DEFAULT_MAX_ATTEMPTS,
        }
    }
}

pub fn parse_list<T: FromStr>(key: &str, text: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| ConfigError::Value { key: key.into(), reason: format!("`{s}`: {e}") }))
        .collect()
}

fn parse_one<T: FromStr>(key: &str, text: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    text.trim().parse().map_err(|e: T::Err| ConfigError::Value { key: key.into(), reason: e.to_string() })
}

impl ExperimentConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "degrees" => self.degrees = value.trim().to_string(),
            "n" => self.n = parse_one(key, value)?,
            "mu" => self.points = Points::Mu(parse_list(key, value)?),
            "m" => self.points = Points::M(parse_list(key, value)?),
            "trials" => self.trials = parse_one(key, value)?,
            "seed" => self.seed = parse_one(key, value)?,
            "jobs" => self.jobs = parse_one(key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "format" => self.format = parse_one(key, value)?,
            "variant" => self.variant = parse_one(key, value)?,
            "qmax" | "q_max" => self.q_max = parse_one(key, value)?,
            "max_attempts" => self.max_attempts = parse_one(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.into())),
        }
        Ok(())
    }

    /// Reads settings from text. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { path: origin.into(), line: i + 1, text: raw.into() });
            };
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        let mut cfg = Self::default();
        cfg.apply_text(&text, &path.display().to_string())?;
        Ok(cfg)
    }

    /// The settings as `key = value` lines, readable by [`apply_text`](Self::apply_text).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("degrees = {}\n", self.degrees));
        s.push_str(&format!("n = {}\n", self.n));
        match &self.points {
            Points::Mu(v) => s.push_str(&format!("mu = {}\n", join(v))),
            Points::M(v) => s.push_str(&format!("m = {}\n", join(v))),
        }
        s.push_str(&format!("trials = {}\nseed = {}\njobs = {}\n", self.trials, self.seed, self.jobs));
        if let Some(out) = &self.out {
            s.push_str(&format!("out = {}\n", out.display()));
        }
        s.push_str(&format!("format = {}\nvariant = {}\nqmax = {}\n", self.format, self.variant, self.q_max));
        s.push_str(&format!("max_attempts = {}\n", self.max_attempts));
        s
    }

    pub fn degree_set(&self) -> Result<DegreeSet, ConfigError> {
        DegreeSet::parse(&self.degrees).map_err(|e| ConfigError::Value { key: "degrees".into(), reason: e.to_string() })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.degree_set()?;
        if self.trials < 1 {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }
        if self.n < 1 {
            return Err(ConfigError::Invalid("n must be at least 1".into()));
        }
        if self.points.is_empty() {
            return Err(ConfigError::Invalid("no mu or m values".into()));
        }
        if self.q_max < 5 {
            return Err(ConfigError::Invalid("qmax must be at least 5".into()));
        }
        if let Points::Mu(v) = &self.points {
            if let Some(x) = v.iter().find(|x| !x.is_finite()) {
                return Err(ConfigError::Invalid(format!("mu = {x}")));
            }
        }
        Ok(())
    }
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text("# comment\ndegrees = 1,3\nn=500\nmu = -1, 0 ,1\ntrials = 7\nvariant = plain\n", "t").unwrap();
        assert_eq!(cfg.points, Points::Mu(vec![-1.0, 0.0, 1.0]));
        assert_eq!(cfg.variant, Variant::PlainExponential);
        let mut again = ExperimentConfig::default();
        again.apply_text(&cfg.to_text(), "t").unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_bad_input() {
        let mut cfg = ExperimentConfig::default();
        assert!(matches!(cfg.apply_text("trials 5", "t"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(cfg.set("colour", "red"), Err(ConfigError::UnknownKey(_))));
        cfg.set("trials", "0").unwrap();
        assert!(cfg.validate().is_err());
        cfg.set("trials", "3").unwrap();
        cfg.set("degrees", "2,4").unwrap();
        assert!(cfg.validate().is_err());
    }
}
