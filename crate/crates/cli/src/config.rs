//! Config files and the flag-over-file merge.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const CONFIG_PREFIX: &str = "# config: ";

/// Reads a TOML or JSON file, or recovers the echoed config from a previous
/// output (CSV header line or the `meta.config` field of a JSON output).
pub fn load(path: &Path, subcommand: &str) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage("config", format!("cannot read {}: {e}", path.display())))?;
    let bad = |msg: String| CliError::usage("config", format!("{}: {msg}", path.display()));
    let value: Value = if let Some(line) = text.lines().find_map(|l| l.strip_prefix(CONFIG_PREFIX)) {
        serde_json::from_str(line).map_err(|e| bad(e.to_string()))?
    } else if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        match v.pointer("/meta/config") {
            Some(c) => c.clone(),
            None => v,
        }
    } else {
        let t: toml::Table = toml::from_str(&text).map_err(|e| bad(e.to_string()))?;
        serde_json::to_value(t).map_err(|e| bad(e.to_string()))?
    };
    let Value::Object(mut map) = value else {
        return Err(bad("expected a table of key/value pairs".into()));
    };
    if let Some(name) = map.remove("subcommand") {
        if name != Value::String(subcommand.into()) {
            return Err(bad(format!("written for subcommand {name}, not `{subcommand}`")));
        }
    }
    Ok(map)
}

/// File values overlaid by every flag given on the command line.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<Map<String, Value>>) -> Result<T, CliError> {
    let mut merged = match file {
        Some(map) => {
            // Strict parse of the file alone so unknown keys are named.
            serde_json::from_value::<T>(Value::Object(map.clone())).map_err(config_error)?;
            map
        }
        None => Map::new(),
    };
    let Value::Object(given) = serde_json::to_value(flags).map_err(config_error)? else {
        unreachable!("argument structs serialize to objects");
    };
    for (k, v) in given {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(config_error)
}

fn config_error(e: serde_json::Error) -> CliError {
    let msg = e.to_string();
    // serde reports "unknown field `x`, expected ..." / "invalid type ... for key `x`"
    let flag = msg.split('`').nth(1).filter(|_| msg.contains("field")).unwrap_or("config").to_string();
    CliError::usage(&flag, msg)
}

/// Canonical JSON (sorted keys) of the resolved config and its SHA-256.
pub fn echo(subcommand: &str, params: &impl Serialize) -> (String, String) {
    let mut v = serde_json::to_value(params).expect("params serialize");
    if let Value::Object(m) = &mut v {
        m.insert("subcommand".into(), Value::String(subcommand.into()));
        m.retain(|_, v| !v.is_null());
    }
    let text = serde_json::to_string(&v).expect("json");
    let hash = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    (text, hash)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize, Deserialize, Default)]
    #[serde(deny_unknown_fields, rename_all = "kebab-case")]
    struct Demo {
        temp_k: Option<f64>,
        vc: Option<f64>,
    }

    #[test]
    fn flags_override_file() {
        let mut file = Map::new();
        file.insert("temp-k".into(), Value::from(300.0));
        file.insert("vc".into(), Value::from(2.0));
        let flags = Demo { temp_k: Some(320.0), vc: None };
        let merged = merge(&flags, Some(file)).unwrap();
        assert_eq!(merged.temp_k, Some(320.0));
        assert_eq!(merged.vc, Some(2.0));
    }

    #[test]
    fn echo_is_canonical() {
        let (a, ha) = echo("demo", &Demo { temp_k: Some(1.0), vc: None });
        let (b, hb) = echo("demo", &Demo { temp_k: Some(1.0), vc: None });
        assert_eq!((a.as_str(), ha.as_str()), (b.as_str(), hb.as_str()));
        assert_eq!(a, r#"{"subcommand":"demo","temp-k":1.0}"#);
        assert_eq!(ha.len(), 64);
    }
}
