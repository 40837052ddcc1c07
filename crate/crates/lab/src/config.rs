//! `key = value` configuration with optional `[section]` headers.
//!
//! Keys inside a section are stored as `section.key`. Blank lines and lines
//! starting with `#` are ignored; a later assignment replaces an earlier
//! one.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Built-in parameter sets: figure captions and the `A_{k,D}` convention.
pub const DEFAULTS: &str = include_str!("../config/qmf.conf");

/// Calibrated thresholds for the distributional acceptance checks.
pub const KS_FIXTURE: &str = include_str!("../fixtures/ks_thresholds.conf");

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| ConfigError { line: i + 1, message: message.to_string() };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| err("unterminated section header"))?.trim();
                if name.is_empty() {
                    return Err(err("empty section name"));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value"))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(err("empty key"));
            }
            let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
            entries.insert(full, value.trim().to_string());
        }
        Ok(Config { entries })
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// The built-in [`DEFAULTS`].
    pub fn defaults() -> Self {
        Self::parse(DEFAULTS).expect("built-in configuration parses")
    }

    /// Entries of `other` replace those of `self`.
    pub fn merged(mut self, other: Config) -> Self {
        self.entries.extend(other.entries);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn parse_value<T: FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| format!("bad value for {key}: {v:?}")),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, String> {
        self.parse_value(key)?.ok_or_else(|| format!("missing configuration key {key}"))
    }

    /// `(key, value)` pairs of one section, keys without the prefix.
    pub fn section(&self, name: &str) -> Vec<(&str, &str)> {
        let prefix = format!("{name}.");
        self.entries
            .iter()
            .filter_map(|(k, v)| k.strip_prefix(&prefix).map(|k| (k, v.as_str())))
            .collect()
    }

    /// Section names starting with `prefix`, sorted.
    pub fn sections_with_prefix(&self, prefix: &str) -> Vec<String> {
        let mut names: Vec<String> = self
            .entries
            .keys()
            .filter_map(|k| k.rsplit_once('.').map(|(s, _)| s))
            .filter(|s| s.starts_with(prefix))
            .map(str::to_string)
            .collect();
        names.dedup();
        names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_overrides() {
        let c = Config::parse("top = 1\n# note\n[fig4:a]\na = -0.5+0.51i\nq = 24001\n[fig4:b]\nq=7\n").unwrap();
        assert_eq!(c.get("top"), Some("1"));
        assert_eq!(c.get("fig4:a.a"), Some("-0.5+0.51i"));
        assert_eq!(c.require::<u64>("fig4:b.q").unwrap(), 7);
        assert_eq!(c.sections_with_prefix("fig4:"), vec!["fig4:a", "fig4:b"]);
        assert_eq!(c.section("fig4:a"), vec![("a", "-0.5+0.51i"), ("q", "24001")]);
        let c = c.merged(Config::parse("[fig4:b]\nq = 9").unwrap());
        assert_eq!(c.get("fig4:b.q"), Some("9"));
        assert!(c.require::<u64>("fig4:a.a").is_err());
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(Config::parse("a = 1\nnonsense").unwrap_err().line, 2);
        assert!(Config::parse("[open").is_err());
        assert!(Config::parse("= 3").is_err());
    }

    #[test]
    fn builtins_parse() {
        let d = Config::defaults();
        assert_eq!(d.sections_with_prefix("fig4:").len(), 8);
        Config::parse(KS_FIXTURE).unwrap();
    }
}
