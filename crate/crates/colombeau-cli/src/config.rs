//! Layered runtime configuration.
//!
//! Resolution order, later layers overriding earlier ones: built-in
//! defaults, then the config file, then `COLOMBEAU_*` environment
//! variables, then command-line flags. The config file uses the same
//! field names as the flags and the same JSON types as the report echo.

use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use colombeau::{EpsilonGrid, Params};

use crate::error::{CliError, CliResult};

/// Rendering of reports. JSON is the machine interface; text is a
/// line-oriented rendering of the same tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

/// One configuration layer; every field optional so layers can merge.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigOverlay {
    pub grid_base: Option<f64>,
    pub k_min: Option<u32>,
    pub k_max: Option<u32>,
    pub mmax: Option<i32>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
}

impl ConfigOverlay {
    /// Reads one layer from a JSON config file.
    pub fn from_file(path: &Path) -> CliResult<ConfigOverlay> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError(format!("cannot read config file {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError(format!("malformed config file {}: {e}", path.display())))
    }

    /// Reads one layer from `COLOMBEAU_*` environment variables.
    pub fn from_env() -> CliResult<ConfigOverlay> {
        fn get<T: std::str::FromStr>(name: &str) -> CliResult<Option<T>>
        where
            T::Err: std::fmt::Display,
        {
            match std::env::var(name) {
                Ok(raw) => raw
                    .parse::<T>()
                    .map(Some)
                    .map_err(|e| CliError(format!("invalid {name}={raw}: {e}"))),
                Err(_) => Ok(None),
            }
        }
        let format = match std::env::var("COLOMBEAU_FORMAT") {
            Ok(raw) => Some(
                Format::from_str(&raw, true)
                    .map_err(|e| CliError(format!("invalid COLOMBEAU_FORMAT={raw}: {e}")))?,
            ),
            Err(_) => None,
        };
        Ok(ConfigOverlay {
            grid_base: get("COLOMBEAU_GRID_BASE")?,
            k_min: get("COLOMBEAU_K_MIN")?,
            k_max: get("COLOMBEAU_K_MAX")?,
            mmax: get("COLOMBEAU_MMAX")?,
            seed: get("COLOMBEAU_SEED")?,
            format,
        })
    }

    /// Merges `over` onto `self`; fields present in `over` win.
    pub fn merge(mut self, over: ConfigOverlay) -> ConfigOverlay {
        if over.grid_base.is_some() {
            self.grid_base = over.grid_base;
        }
        if over.k_min.is_some() {
            self.k_min = over.k_min;
        }
        if over.k_max.is_some() {
            self.k_max = over.k_max;
        }
        if over.mmax.is_some() {
            self.mmax = over.mmax;
        }
        if over.seed.is_some() {
            self.seed = over.seed;
        }
        if over.format.is_some() {
            self.format = over.format;
        }
        self
    }

    /// Validates the merged layers and builds the runtime configuration.
    pub fn resolve(self) -> CliResult<Config> {
        let defaults = Params::default();
        let base = self.grid_base.unwrap_or_else(|| defaults.grid.base());
        let k_min = self.k_min.unwrap_or_else(|| defaults.grid.k_min());
        let k_max = self.k_max.unwrap_or_else(|| defaults.grid.k_max());
        let mmax = self.mmax.unwrap_or(defaults.m_max);
        if !(1..=64).contains(&mmax) {
            return Err(CliError(format!("mmax must lie in 1..=64, got {mmax}")));
        }
        let grid = EpsilonGrid::new(base, k_min, k_max).map_err(|e| CliError(e.to_string()))?;
        let mut params = Params { grid, m_max: mmax, ..defaults };
        if let Some(seed) = self.seed {
            params.seed = seed;
        }
        Ok(Config { params, format: self.format.unwrap_or(Format::Json) })
    }
}

/// Fully resolved runtime configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub params: Params,
    pub format: Format,
}

impl Config {
    /// The configuration echo embedded in every report, so identical
    /// inputs are checkable against identical settings.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::json!({
            "grid_base": self.params.grid.base(),
            "k_min": self.params.grid.k_min(),
            "k_max": self.params.grid.k_max(),
            "mmax": self.params.m_max,
            "seed": self.params.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn later_layers_override_earlier_ones() {
        let file = ConfigOverlay { k_max: Some(30), seed: Some(7), ..Default::default() };
        let flags = ConfigOverlay { k_max: Some(25), ..Default::default() };
        let cfg = file.merge(flags).resolve().unwrap();
        assert_eq!(cfg.params.grid.k_max(), 25);
        assert_eq!(cfg.params.seed, 7);
    }

    #[test]
    fn defaults_fill_missing_fields() {
        let cfg = ConfigOverlay::default().resolve().unwrap();
        assert_eq!(cfg.params.grid.k_min(), 4);
        assert_eq!(cfg.params.grid.k_max(), 48);
        assert_eq!(cfg.format, Format::Json);
    }

    #[test]
    fn bad_ranges_are_rejected() {
        let bad = ConfigOverlay { mmax: Some(0), ..Default::default() };
        assert!(bad.resolve().is_err());
        let bad = ConfigOverlay { grid_base: Some(1.0), ..Default::default() };
        assert!(bad.resolve().is_err());
    }
}
