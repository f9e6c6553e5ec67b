//! Plain-text `key = value` configuration.
//!
//! Lines are `key = value`; `#` starts a comment; blank lines are ignored.
//! Keys are case-sensitive and may not repeat. Parse errors and type errors
//! carry the line number of the offending entry.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Window;
use crate::solver::Grid;

#[derive(Clone, Debug, Default)]
pub struct Config {
    entries: BTreeMap<String, (String, usize)>,
}

impl Config {
    pub fn empty() -> Config {
        Config::default()
    }

    pub fn parse(text: &str) -> Result<Config> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::Config {
                line: line_no,
                msg: format!("expected `key = value`, got {line:?}"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(Error::Config { line: line_no, msg: "empty key".into() });
            }
            if entries.insert(key.to_string(), (value.to_string(), line_no)).is_some() {
                return Err(Error::Config {
                    line: line_no,
                    msg: format!("duplicate key {key:?}"),
                });
            }
        }
        Ok(Config { entries })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Config> {
        Config::parse(&std::fs::read_to_string(path)?)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn typed<T>(&self, key: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => parse(v).map(Some).ok_or(Error::Config {
                line: *line,
                msg: format!("key {key:?}: expected {what}, got {v:?}"),
            }),
        }
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.typed(key, "a number", |v| v.parse().ok())
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.typed(key, "a nonnegative integer", |v| v.parse().ok())
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.typed(key, "a nonnegative integer", |v| v.parse().ok())
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.typed(key, "true or false", |v| v.parse().ok())
    }

    /// Comma-separated pair, e.g. `0.1, -0.3`.
    pub fn get_pair(&self, key: &str) -> Result<Option<(f64, f64)>> {
        self.typed(key, "two comma-separated numbers", parse_pair)
    }

    /// Comma-separated window `x1min, x1max, x2min, x2max`.
    pub fn get_window(&self, key: &str) -> Result<Option<Window>> {
        self.typed(key, "four comma-separated numbers", parse_window_opt)
    }

    /// Grid shape `n1xn2`.
    pub fn get_grid(&self, key: &str) -> Result<Option<(usize, usize)>> {
        self.typed(key, "a shape like 65x65", |v| Grid::parse_shape(v).ok())
    }
}

fn parse_pair(s: &str) -> Option<(f64, f64)> {
    let parts: Vec<f64> = s.split(',').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
    (parts.len() == 2).then(|| (parts[0], parts[1]))
}

fn parse_window_opt(s: &str) -> Option<Window> {
    let parts: Vec<f64> = s.split(',').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
    (parts.len() == 4).then(|| (parts[0], parts[1], parts[2], parts[3]))
}

/// Parse a CLI-style window argument `x1min,x1max,x2min,x2max`.
pub fn parse_window(s: &str) -> Result<Window> {
    parse_window_opt(s).ok_or_else(|| {
        Error::InvalidInput(format!("window must be four comma-separated numbers, got {s:?}"))
    })
}
