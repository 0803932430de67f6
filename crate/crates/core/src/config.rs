//! Flat `key = value` text files.
//!
//! One assignment per line; blank lines and lines starting with `#` are
//! ignored. Keys may repeat only if the caller tolerates it: the last value
//! wins. Values are kept as strings and parsed by the consumer.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid(format!("line {}: expected `key = value`, got {raw:?}", lineno + 1))
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::invalid(format!("line {}: empty key", lineno + 1)));
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Parses the value stored under `key`, if present.
    pub fn parse_value<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::invalid(format!("cannot parse `{key}` value {v:?}"))),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parse_value(key)?
            .ok_or_else(|| Error::invalid(format!("missing key `{key}`")))
    }

    /// Renders entries in key order, one `key = value` per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

/// Comma-separated list of reals, e.g. `0.84,0.835`.
pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::invalid(format!("not a real number: {s:?}")))
        })
        .collect()
}

/// Formats a list of reals so that [`parse_real_list`] reads it back exactly.
pub fn format_real_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_whitespace() {
        let kv = KeyValues::parse("# header\n\n  eps = 0.8 \nseed=7\n").unwrap();
        assert_eq!(kv.get("eps"), Some("0.8"));
        assert_eq!(kv.require::<u64>("seed").unwrap(), 7);
        assert!(kv.get("missing").is_none());
    }

    #[test]
    fn rejects_lines_without_equals() {
        assert!(KeyValues::parse("eps 0.8").is_err());
        assert!(KeyValues::parse(" = 3").is_err());
    }

    #[test]
    fn render_round_trips() {
        let mut kv = KeyValues::new();
        kv.set("b", 0.1_f64);
        kv.set("a", "x");
        let again = KeyValues::parse(&kv.render()).unwrap();
        assert_eq!(kv, again);
    }

    #[test]
    fn real_lists() {
        let v = vec![0.1, 1.0 / 3.0, 2.5e-9];
        assert_eq!(parse_real_list(&format_real_list(&v)).unwrap(), v);
        assert!(parse_real_list("0.1,abc").is_err());
    }
}
