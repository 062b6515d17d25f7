//! TOML scenario files.
//!
//! A file is a scenario config with every field optional. Omitted fields take
//! the values of the base preset, which is `default` unless the top-level
//! `preset` key names another. An optional `[localization]` table configures
//! the `localize` experiment.

use crate::{CliError, CliResult};
use beamtrack_core::simulator::{check, presets, LocalizationConfig, ScenarioConfig};
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;
use toml::{Table, Value};

const PRESET_KEY: &str = "preset";
const LOCALIZATION_KEY: &str = "localization";

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub scenario: ScenarioConfig,
    pub localization: LocalizationConfig,
}

impl CliConfig {
    pub fn preset(name: &str) -> CliResult<Self> {
        Ok(Self {
            scenario: presets::by_name(name).map_err(CliError::invalid)?,
            localization: LocalizationConfig::default(),
        })
    }

    /// The resolved config as a complete TOML document.
    pub fn to_toml(&self) -> String {
        let mut doc = to_table(&self.scenario);
        doc.insert(LOCALIZATION_KEY.into(), Value::Table(to_table(&self.localization)));
        toml::to_string(&doc).expect("configs serialize to TOML")
    }

    /// SHA-256 of the scenario part, which alone determines a run.
    pub fn digest(&self) -> String {
        let text = toml::to_string(&self.scenario).expect("configs serialize to TOML");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn to_table<T: Serialize>(value: &T) -> Table {
    Table::try_from(value).expect("configs serialize to a TOML table")
}

/// Overlays `top` onto `base`, recursing into tables present in both.
fn merge(base: &mut Table, top: Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn overlay<T: Serialize + DeserializeOwned>(base: &T, top: Table, prefix: &str) -> CliResult<T> {
    let mut merged = to_table(base);
    merge(&mut merged, top);
    serde_path_to_error::deserialize(Value::Table(merged)).map_err(|e| {
        let path = e.path().to_string();
        let field = if prefix.is_empty() { path } else { format!("{prefix}.{path}") };
        CliError::Validation(format!("invalid config `{field}`: {}", e.into_inner()))
    })
}

/// Parses and validates config text. `origin` names the source in errors.
pub fn parse_config_str(text: &str, origin: &str) -> CliResult<CliConfig> {
    parse_with_base(text, origin, "default")
}

fn parse_with_base(text: &str, origin: &str, fallback: &str) -> CliResult<CliConfig> {
    let mut table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Validation(format!("{origin}: {}", e.message())))?;
    let base = match table.remove(PRESET_KEY) {
        None => CliConfig::preset(fallback)?,
        Some(Value::String(name)) => CliConfig::preset(&name)?,
        Some(_) => return Err(CliError::Validation(format!("invalid config `{PRESET_KEY}`: expected a string"))),
    };
    let localization = match table.remove(LOCALIZATION_KEY) {
        None => base.localization.clone(),
        Some(Value::Table(t)) => overlay(&base.localization, t, LOCALIZATION_KEY)?,
        Some(_) => {
            return Err(CliError::Validation(format!(
                "invalid config `{LOCALIZATION_KEY}`: expected a table"
            )))
        }
    };
    let scenario = overlay(&base.scenario, table, "")?;
    check(&scenario).map_err(CliError::invalid)?;
    localization.validate().map_err(CliError::invalid)?;
    Ok(CliConfig { scenario, localization })
}

pub fn parse_config(path: &Path) -> CliResult<CliConfig> {
    parse_file(path, "default")
}

fn parse_file(path: &Path, fallback: &str) -> CliResult<CliConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    parse_with_base(&text, &path.display().to_string(), fallback)
}

/// Config from an optional file, an optional preset, and an optional seed
/// override. A preset given here is the base the file is read against unless
/// the file names its own.
pub fn resolve(path: Option<&Path>, preset: Option<&str>, seed: Option<u64>) -> CliResult<CliConfig> {
    let mut cfg = match path {
        Some(p) => parse_file(p, preset.unwrap_or("default"))?,
        None => CliConfig::preset(preset.unwrap_or("default"))?,
    };
    if let Some(s) = seed {
        cfg.scenario.seed = s;
    }
    check(&cfg.scenario).map_err(CliError::invalid)?;
    Ok(cfg)
}
