//! Config files: `key = value` lines or a JSON document previously written
//! by this tool. Both are turned into command-line flags placed ahead of the
//! user's own flags, so later (user) occurrences win.

use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::cli::Command;
use crate::CliError;

const GLOBAL_KEYS: [&str; 3] = ["seed", "format", "output"];

#[derive(Debug, Default, PartialEq)]
struct ConfigArgs {
    command: Option<String>,
    globals: Vec<String>,
    params: Vec<String>,
}

fn flag(key: &str) -> String {
    format!("--{}", key.trim().replace('_', "-"))
}

fn push_value(out: &mut Vec<String>, key: &str, value: &Value) -> Result<(), CliError> {
    match value {
        Value::Null | Value::Bool(false) => {}
        Value::Bool(true) => out.push(flag(key)),
        Value::Number(n) => {
            out.push(flag(key));
            out.push(n.to_string());
        }
        Value::String(s) => {
            out.push(flag(key));
            out.push(s.clone());
        }
        Value::Array(items) => {
            for item in items {
                push_value(out, key, item)?;
            }
        }
        Value::Object(_) => {
            return Err(CliError::Config(format!("config key `{key}` holds an object")));
        }
    }
    Ok(())
}

fn parse_key_value(text: &str) -> Result<ConfigArgs, CliError> {
    let mut cfg = ConfigArgs::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected `key = value`", i + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(CliError::Config(format!("config line {}: empty key", i + 1)));
        }
        if key == "command" {
            cfg.command = Some(value.to_string());
            continue;
        }
        let target = if GLOBAL_KEYS.contains(&key) { &mut cfg.globals } else { &mut cfg.params };
        match value {
            "true" => target.push(flag(key)),
            "false" => {}
            _ => {
                target.push(flag(key));
                target.push(value.to_string());
            }
        }
    }
    Ok(cfg)
}

fn parse_json(text: &str) -> Result<ConfigArgs, CliError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("config JSON: {e}")))?;
    let meta = doc
        .get("meta")
        .ok_or_else(|| CliError::Config("config JSON has no `meta` object".into()))?;
    let mut cfg = ConfigArgs {
        command: meta.get("command").and_then(Value::as_str).map(str::to_string),
        ..ConfigArgs::default()
    };
    if meta.get("seed_source").and_then(Value::as_str) != Some("default") {
        if let Some(seed) = meta.get("seed") {
            push_value(&mut cfg.globals, "seed", seed)?;
        }
    }
    match meta.get("parameters") {
        Some(Value::Object(map)) => {
            for (k, v) in map {
                push_value(&mut cfg.params, k, v)?;
            }
        }
        None | Some(Value::Null) => {}
        Some(_) => return Err(CliError::Config("`meta.parameters` must be an object".into())),
    }
    Ok(cfg)
}

fn load(path: &Path) -> Result<ConfigArgs, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading config {}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        parse_json(&text)
    } else {
        parse_key_value(&text)
    }
}

/// Removes `--config FILE` from `argv` and splices the file's settings in.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or_else(|| CliError::Config("`--config` needs a file".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let cfg = load(Path::new(&path))?;
    splice(rest, cfg)
}

fn splice(argv: Vec<String>, cfg: ConfigArgs) -> Result<Vec<String>, CliError> {
    let position = argv.iter().skip(1).position(|a| Command::NAMES.contains(&a.as_str())).map(|p| p + 1);
    let mut out = vec![argv.first().cloned().unwrap_or_else(|| "wealthstat".into())];
    out.extend(cfg.globals);
    match position {
        Some(p) => {
            out.extend(argv[1..p].iter().cloned());
            out.push(argv[p].clone());
            match &cfg.command {
                Some(c) if *c != argv[p] => {
                    eprintln!("warning: ignoring parameters of config command `{c}` for `{}`", argv[p]);
                }
                _ => out.extend(cfg.params),
            }
            out.extend(argv[p + 1..].iter().cloned());
        }
        None => {
            let command = cfg
                .command
                .ok_or_else(|| CliError::Config("no command given on the command line or in the config".into()))?;
            out.extend(argv[1..].iter().cloned());
            out.push(command);
            out.extend(cfg.params);
        }
    }
    Ok(out)
}
