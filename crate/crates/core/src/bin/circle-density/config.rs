use std::path::Path;

use circle_density::{Error, Result};
use toml::{Table, Value};

/// Every key a config file may set; each mirrors a long flag.
const KNOWN_KEYS: &[&str] = &[
    "sequence",
    "n",
    "out",
    "format",
    "precision",
    "suite",
    "stock",
    "witnesses",
    "restarts",
    "seed",
    "iterations",
    "step",
    "decay",
    "floor-n",
    "ns",
];

/// Flat `key = value` settings sitting underneath explicit flags.
#[derive(Debug, Default)]
pub struct FileConfig {
    table: Table,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::InvalidConfig(e.message().to_owned()))?;
        if let Some(bad) = table.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(Error::InvalidConfig(format!("unknown key `{bad}`")));
        }
        Ok(Self { table })
    }

    fn wrong_type(key: &str, want: &str) -> Error {
        Error::InvalidConfig(format!("`{key}` must be {want}"))
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(_) => Err(Self::wrong_type(key, "a non-negative integer")),
        }
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(_) => Err(Self::wrong_type(key, "a number")),
        }
    }

    pub fn string(&self, key: &str) -> Result<Option<String>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(Self::wrong_type(key, "a string")),
        }
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(_) => Err(Self::wrong_type(key, "true or false")),
        }
    }

    /// A string or an array of strings.
    pub fn strings(&self, key: &str) -> Result<Option<Vec<String>>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(vec![s.clone()])),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_str()
                        .map(str::to_owned)
                        .ok_or_else(|| Self::wrong_type(key, "strings"))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(_) => Err(Self::wrong_type(key, "a string or array of strings")),
        }
    }

    /// An integer or an array of integers.
    pub fn u64s(&self, key: &str) -> Result<Option<Vec<u64>>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(vec![*i as u64])),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| match v {
                    Value::Integer(i) if *i >= 0 => Ok(*i as u64),
                    _ => Err(Self::wrong_type(key, "non-negative integers")),
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(_) => Err(Self::wrong_type(key, "an integer or array of integers")),
        }
    }
}
