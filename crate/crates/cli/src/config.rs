//! Flag and config-file merging.
//!
//! Every subcommand keeps its options in a struct of `Option`s. The TOML
//! file supplies values for keys that are not given on the command line.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// Reads a TOML file into a JSON object. A `[<section>]` table, when
/// present, is merged over the top-level keys.
pub fn load(path: &Path, section: &str) -> Result<Map<String, Value>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let table: toml::Table = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    let Value::Object(mut root) = serde_json::to_value(table)? else {
        bail!("config {} is not a table", path.display());
    };
    let nested = root.remove(section);
    // Tables for other subcommands do not apply here.
    root.retain(|_, v| !v.is_object());
    if let Some(v) = nested {
        let Value::Object(sub) = v else {
            bail!("config section [{section}] is not a table");
        };
        root.extend(sub);
    }
    Ok(root)
}

/// `flags` over `file`, keys normalized from `snake_case` and `kebab-case`.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Map<String, Value>) -> Result<T> {
    let Value::Object(given) = serde_json::to_value(flags)? else {
        bail!("options do not serialize to an object");
    };
    let mut merged: Map<String, Value> = file.into_iter().map(|(k, v)| (k.replace('-', "_"), v)).collect();
    merged.extend(given.into_iter().filter(|(_, v)| !v.is_null()));
    serde_json::from_value(Value::Object(merged)).context("invalid config value")
}
