//! `key = value` run configuration files.
//!
//! Keys use the long flag names with `_` or `-` as separator. Blank lines and
//! lines starting with `#` are ignored. A flag given on the command line wins
//! over the same key in the file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "input",
    "format",
    "edges",
    "dates",
    "strip_prefix",
    "output",
    "out_dir",
    "bundles",
    "degree_mode",
    "dt",
    "start",
    "stride",
    "end",
    "c0",
    "k0",
    "min_class_size",
    "tail_trim",
    "n",
    "m",
    "extra_mean",
    "kernel",
    "alpha",
    "beta",
    "offset",
    "seed",
    "refresh_every",
    "no_timestamp",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    // key -> (value, line number)
    values: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("line {}: expected `key = value`", i + 1)));
            };
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("line {}: unknown option `{key}`", i + 1)));
            }
            if values.insert(key.clone(), (value.trim().to_string(), i + 1)).is_some() {
                return Err(CliError::Usage(format!("line {}: `{key}` given twice", i + 1)));
            }
        }
        Ok(ConfigFile { values })
    }

    /// The flag value if present, else the parsed file value.
    pub fn pick<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some((raw, line)) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("invalid value for `{key}` (config line {line}): {e}"))),
        }
    }

    pub fn pick_or<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick(key, flag)?.unwrap_or(default))
    }

    pub fn require<T>(&self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.pick(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("missing required option `{}`", key.replace('_', "-"))))
    }

    /// A comma-separated list.
    pub fn pick_list<T>(&self, key: &str, flag: Vec<T>) -> Result<Option<Vec<T>>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if !flag.is_empty() {
            return Ok(Some(flag));
        }
        let Some((raw, line)) = self.values.get(key) else {
            return Ok(None);
        };
        raw.split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|e| CliError::Usage(format!("invalid value for `{key}` (config line {line}): {e}")))
            })
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
    }

    pub fn flag(&self, key: &str, flag: bool) -> Result<bool, CliError> {
        Ok(flag || self.pick::<bool>(key, None)?.unwrap_or(false))
    }
}
