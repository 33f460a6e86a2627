//! Run configuration: defaults, `ZETA_ASYM_PRECISION`, an optional
//! `key = value` file and command-line flags, in increasing priority.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;
use zeta_asym_core::numeric::Precision;

pub const PRECISION_ENV: &str = "ZETA_ASYM_PRECISION";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("{path}:{line}: {message}")]
    File {
        path: String,
        line: usize,
        message: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(ConfigError::Invalid(format!("unknown format {other:?}"))),
        }
    }
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Text => "text",
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub precision: Precision,
    /// Whether the precision was chosen by the user rather than defaulted;
    /// commands with their own default precision only honour explicit ones.
    pub precision_explicit: bool,
    pub order_cap: u32,
    pub truncation: u64,
    pub format: OutputFormat,
    pub rules: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: Precision::DEFAULT,
            precision_explicit: false,
            order_cap: 9,
            truncation: 100_000,
            format: OutputFormat::Text,
            rules: None,
        }
    }
}

/// Values set by one configuration layer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub precision: Option<u32>,
    pub order_cap: Option<u32>,
    pub truncation: Option<u64>,
    pub format: Option<OutputFormat>,
    pub rules: Option<PathBuf>,
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("{key} expects a non-negative integer, got {value:?}"))
}

impl Overrides {
    /// Parses a `key = value` file. Keys mirror the long flags.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::File {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::File {
                path: path.display().to_string(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "precision" => o.precision = Some(parse_num(key, value).map_err(err)?),
                "order-cap" => o.order_cap = Some(parse_num(key, value).map_err(err)?),
                "truncation" => o.truncation = Some(parse_num(key, value).map_err(err)?),
                "format" => {
                    o.format = Some(value.parse().map_err(|e: ConfigError| err(e.to_string()))?)
                }
                "rules" => o.rules = Some(PathBuf::from(value)),
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        Ok(o)
    }
}

impl RunConfig {
    /// Layers `env_precision`, `file` and `flags` over the defaults.
    pub fn resolve(
        env_precision: Option<&str>,
        file: Option<&Overrides>,
        flags: &Overrides,
    ) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut bits = None;
        if let Some(v) = env_precision {
            bits = Some(parse_num::<u32>(PRECISION_ENV, v.trim()).map_err(ConfigError::Invalid)?);
        }
        for layer in file.into_iter().chain(std::iter::once(flags)) {
            if let Some(b) = layer.precision {
                bits = Some(b);
            }
            if let Some(c) = layer.order_cap {
                cfg.order_cap = c;
            }
            if let Some(t) = layer.truncation {
                cfg.truncation = t;
            }
            if let Some(f) = layer.format {
                cfg.format = f;
            }
            if let Some(r) = &layer.rules {
                cfg.rules = Some(r.clone());
            }
        }
        if let Some(b) = bits {
            cfg.precision = Precision::new(b).map_err(|e| ConfigError::Invalid(e.to_string()))?;
            cfg.precision_explicit = true;
        }
        if !(2..=11).contains(&cfg.order_cap) {
            return Err(ConfigError::Invalid(format!(
                "order cap {} outside 2..=11",
                cfg.order_cap
            )));
        }
        if cfg.truncation < 10 {
            return Err(ConfigError::Invalid(format!(
                "truncation {} is below 10",
                cfg.truncation
            )));
        }
        Ok(cfg)
    }

    /// `self.precision` if the user chose it, otherwise `default_bits`.
    pub fn precision_or(&self, default_bits: u32) -> Precision {
        if self.precision_explicit {
            self.precision
        } else {
            Precision::new(default_bits).expect("valid default precision")
        }
    }
}
