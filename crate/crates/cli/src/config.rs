//! `--config` files: a JSON object whose entries are spliced into argv as
//! flags, ahead of the flags typed on the command line so those win.

use std::ffi::OsString;
use std::path::Path;

use serde_json::Value;

use crate::run::CliError;

pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut iter = argv.into_iter();
    while let Some(arg) = iter.next() {
        let text = arg.to_string_lossy();
        if text == "--config" {
            let value = iter.next().ok_or_else(|| CliError::Usage("--config needs a path".into()))?;
            path = Some(value);
        } else if let Some(value) = text.strip_prefix("--config=") {
            path = Some(OsString::from(value));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let flags = config_flags(Path::new(&path))?;
    // subcommand path: the leading tokens after the binary name that are not flags
    let at = 1 + rest.iter().skip(1).take_while(|a| !a.to_string_lossy().starts_with('-')).count();
    rest.splice(at.min(rest.len())..at.min(rest.len()), flags);
    Ok(rest)
}

fn config_flags(path: &Path) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return Err(CliError::Usage("config must be a JSON object".into()));
    };
    let mut out = Vec::new();
    for (key, value) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        let text = match value {
            Value::Null | Value::Bool(false) => continue,
            Value::Bool(true) => {
                out.push(flag.into());
                continue;
            }
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            Value::Array(items) => items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?.join(","),
            Value::Object(_) => return Err(CliError::Usage(format!("config key {key:?} holds an object"))),
        };
        out.push(flag.into());
        out.push(text.into());
    }
    Ok(out)
}

fn scalar(v: &Value) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(CliError::Usage(format!("unsupported config list item {other}"))),
    }
}
