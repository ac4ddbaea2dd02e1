//! Run configuration: layered key=value parameters.
//!
//! Resolution order is defaults, then a named preset, then a config
//! file of `key=value` lines, then inline overrides; later layers win.
//! Commands drain the keys they understand and reject leftovers, so a
//! typo never silently falls back to a default.  Every successful run
//! echoes the fully resolved map into a `*.run.json` manifest next to
//! its primary output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use surfmem::{Error, Result};

#[derive(Default, Clone, Debug)]
pub struct KeyValues {
    map: BTreeMap<String, String>,
    /// Everything ever resolved, kept for the run manifest even after
    /// commands drain `map`.
    resolved: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn set(&mut self, key: &str, value: &str) {
        self.map.insert(key.to_string(), value.to_string());
        self.resolved.insert(key.to_string(), value.to_string());
    }

    pub fn apply_pairs(&mut self, pairs: &[(&str, &str)]) {
        for (k, v) in pairs {
            self.set(k, v);
        }
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = split_pair(line).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.set(k, v);
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<()> {
        for item in overrides {
            let (k, v) = split_pair(item).ok_or_else(|| {
                Error::InvalidArgument(format!("override {item:?} is not key=value"))
            })?;
            self.set(k, v);
        }
        Ok(())
    }

    /// Remove and parse one key; `None` if absent.
    pub fn take<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(text) => text.parse().map(Some).map_err(|_| {
                Error::InvalidArgument(format!(
                    "key {key:?}: cannot parse {text:?} as {}",
                    std::any::type_name::<T>()
                ))
            }),
        }
    }

    /// Remove and parse one key, or fail naming it.
    pub fn require<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        self.take(key)?
            .ok_or_else(|| Error::InvalidArgument(format!("missing required key {key:?}")))
    }

    /// Remove and parse one key, falling back to a default.
    pub fn take_or<T: std::str::FromStr + ToString>(&mut self, key: &str, default: T) -> Result<T> {
        match self.take(key)? {
            Some(v) => Ok(v),
            None => {
                self.resolved.insert(key.to_string(), default.to_string());
                Ok(default)
            }
        }
    }

    /// Fail if any unrecognized keys remain.
    pub fn finish(self) -> Result<BTreeMap<String, String>> {
        if self.map.is_empty() {
            return Ok(self.resolved);
        }
        let stray: Vec<&str> = self.map.keys().map(String::as_str).collect();
        Err(Error::InvalidArgument(format!(
            "unknown keys: {}",
            stray.join(", ")
        )))
    }
}

fn split_pair(s: &str) -> Option<(&str, &str)> {
    let (k, v) = s.split_once('=')?;
    let k = k.trim();
    if k.is_empty() {
        return None;
    }
    Some((k, v.trim()))
}

/// Layer defaults, preset, file, and overrides into one map.
pub fn layer(
    defaults: &[(&str, &str)],
    preset: Option<&str>,
    presets: fn(&str) -> Result<&'static [(&'static str, &'static str)]>,
    file: Option<&Path>,
    overrides: &[String],
) -> Result<KeyValues> {
    let mut kv = KeyValues::default();
    kv.apply_pairs(defaults);
    if let Some(name) = preset {
        kv.apply_pairs(presets(name)?);
    }
    if let Some(path) = file {
        kv.apply_file(path)?;
    }
    kv.apply_overrides(overrides)?;
    Ok(kv)
}

/// Echo the resolved configuration and output paths next to the
/// primary output as `<stem>.run.json`.
pub fn write_run_manifest(
    primary_out: &Path,
    command: &str,
    resolved: &BTreeMap<String, String>,
    outputs: &[&Path],
) -> Result<PathBuf> {
    let path = primary_out.with_extension("run.json");
    let body = serde_json::json!({
        "command": command,
        "config": resolved,
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&body)
        .map_err(|e| Error::Numeric(format!("serialize run manifest: {e}")))?;
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
