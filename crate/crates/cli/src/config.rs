use std::ffi::OsString;
use std::path::Path;

use toml::Value;

use crate::CliError;

const SUBCOMMANDS: [&str; 7] = [
    "simulate", "diagnose", "moments", "lclt", "vague", "donsker", "partition",
];

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn flag_present(argv: &[OsString], flag: &str) -> bool {
    argv.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&format!("{flag}="))
    })
}

fn scalar(v: &Value, key: &str) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(f) => Ok(f.to_string()),
        other => Err(CliError::Usage(format!(
            "config key `{key}` has unsupported value {other}"
        ))),
    }
}

/// Expands `--config FILE` by inserting the file's keys as flags not already on the command line.
pub fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| {
        CliError::Usage(format!("cannot read config {}: {e}", path.to_string_lossy()))
    })?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
    let mut argv = argv;
    let has_sub = argv
        .get(1)
        .is_some_and(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in &table {
        if key == "subcommand" {
            if !has_sub {
                argv.insert(1.min(argv.len()), scalar(value, key)?.into());
            }
            continue;
        }
        if key == "config" {
            return Err(CliError::Usage("config files cannot include other configs".into()));
        }
        let flag = if key == "K" || key == "N" {
            format!("--{key}")
        } else {
            format!("--{}", key.replace('_', "-"))
        };
        if flag_present(&argv, &flag) {
            continue;
        }
        match value {
            Value::Boolean(true) => extra.push(flag.into()),
            Value::Boolean(false) => {}
            Value::Array(items) => {
                let parts = items
                    .iter()
                    .map(|v| scalar(v, key))
                    .collect::<Result<Vec<_>, _>>()?;
                extra.push(flag.into());
                extra.push(parts.join(",").into());
            }
            v => {
                extra.push(flag.into());
                extra.push(scalar(v, key)?.into());
            }
        }
    }
    if argv.len() < 2 {
        return Err(CliError::Usage("no subcommand given".into()));
    }
    let tail = argv.split_off(2);
    argv.extend(extra);
    argv.extend(tail);
    Ok(argv)
}
