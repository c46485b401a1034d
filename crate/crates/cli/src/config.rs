//! Flag/config-file merging. Every argument struct keeps its fields as
//! `Option`s; a value given on the command line wins over the file.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<&Path>) -> Result<T> {
    let Some(path) = file else {
        return Ok(serde_json::from_value(serde_json::to_value(flags)?)?);
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut base: Value = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    let Value::Object(base_map) = &mut base else {
        bail!("config file must hold a JSON object");
    };
    let Value::Object(flag_map) = serde_json::to_value(flags)? else {
        unreachable!("argument structs serialize to objects");
    };
    for (k, v) in flag_map {
        if !v.is_null() {
            base_map.insert(k, v);
        }
    }
    serde_json::from_value(base).context("config file does not match the subcommand's options")
}
