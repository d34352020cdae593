//! Config files are TOML with one table per command. Each key is the long
//! name of a flag of that command (`_` and `-` are interchangeable), and the
//! table is turned into `--key=value` arguments placed ahead of the real
//! ones so that explicit flags win.

use std::fs;
use std::path::Path;

use toml::{Table, Value};

use crate::args::Command;
use crate::error::CliError;

pub fn flags_for(path: &Path, command: &str) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    flags_from_str(&text, command).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn flags_from_str(text: &str, command: &str) -> Result<Vec<String>, CliError> {
    let doc: Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    for (name, value) in &doc {
        if !value.is_table() || !Command::NAMES.contains(&name.as_str()) {
            return Err(CliError::Config(format!(
                "unexpected top-level entry `{name}`; expected sections {}",
                Command::NAMES.join(", ")
            )));
        }
    }
    let Some(Value::Table(section)) = doc.get(command) else {
        return Ok(Vec::new());
    };
    section
        .iter()
        .map(|(key, value)| {
            let key = key.replace('_', "-");
            if key == "config" {
                return Err(CliError::Config(
                    "`config` cannot be set from a config file".into(),
                ));
            }
            Ok(format!("--{key}={}", scalar(&key, value)?))
        })
        .collect()
}

fn scalar(key: &str, value: &Value) -> Result<String, CliError> {
    match value {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(x) => Ok(x.to_string()),
        Value::Boolean(b) => Ok(b.to_string()),
        Value::Array(items) => Ok(items
            .iter()
            .map(|v| scalar(key, v))
            .collect::<Result<Vec<_>, _>>()?
            .join(",")),
        _ => Err(CliError::Config(format!("unsupported value for `{key}`"))),
    }
}
