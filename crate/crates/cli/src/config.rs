//! Run configuration: a flat `key = value` file with `[section]` headers,
//! overridden by command-line flags.
//!
//! Every value actually used by a command is recorded, so the effective
//! configuration can be echoed into the header of each output file.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;
use thiserror::Error;

/// Keys accepted in each section of a config file.
pub const KNOWN_KEYS: &[(&str, &[&str])] = &[
    ("params", &["M0", "Lambda", "a", "m_field"]),
    ("run", &["out", "workers", "seed"]),
    ("angular", &["omega", "k", "l_max", "n"]),
    ("radial", &["omega", "lambda", "k"]),
    ("qnm", &["k", "l", "n", "tol", "box", "ks", "ls", "grid", "n_contour"]),
    ("greens", &["omega", "k", "l_max", "n_r", "n_mu", "support", "source"]),
    ("tdwave", &["l", "dx", "t_final", "dt_out", "cfl", "probes", "u", "v", "window"]),
];

/// A malformed config file, flag or value. Reported with exit status 2.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum UsageError {
    #[error("{path}:{line}: {message}")]
    Syntax { path: String, line: usize, message: String },

    #[error("{path}:{line}: unknown key `{key}` in section [{section}]")]
    UnknownKey { path: String, line: usize, section: String, key: String },

    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },

    #[error("invalid value for {flag}: `{value}` ({message})")]
    BadValue { flag: String, value: String, message: String },
}

/// Parsed config file contents, keyed by `(section, key)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub entries: BTreeMap<(String, String), String>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: &str) -> Result<Self, UsageError> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax =
                |message: &str| UsageError::Syntax { path: path.into(), line: line_no, message: message.into() };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| syntax("unterminated section header"))?.trim();
                if !KNOWN_KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(syntax(&format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| syntax("expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let sec = section.clone().ok_or_else(|| syntax("key outside of any [section]"))?;
            let known = KNOWN_KEYS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
            if !known.contains(&key) {
                return Err(UsageError::UnknownKey { path: path.into(), line: line_no, section: sec, key: key.into() });
            }
            if entries.insert((sec, key.to_string()), value.to_string()).is_some() {
                return Err(syntax(&format!("duplicate key `{key}`")));
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &str) -> Result<Self, UsageError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| UsageError::Io { path: path.into(), message: e.to_string() })?;
        Self::parse(&text, path)
    }
}

/// Text form of a configuration value as echoed into output headers.
pub trait Echo {
    fn echo(&self) -> String;
}

impl Echo for f64 {
    /// Round-trip representation.
    fn echo(&self) -> String {
        format!("{self:?}")
    }
}

macro_rules! echo_display {
    ($($t:ty),*) => {
        $(impl Echo for $t {
            fn echo(&self) -> String {
                self.to_string()
            }
        })*
    };
}

echo_display!(i32, u64, usize, String);

/// Resolves values from flags, then the config file, then defaults, and
/// records what was used.
#[derive(Debug, Default)]
pub struct Settings {
    file: ConfigFile,
    used: RefCell<BTreeMap<String, String>>,
}

impl Settings {
    pub fn new(file: ConfigFile) -> Self {
        Settings { file, used: RefCell::new(BTreeMap::new()) }
    }

    /// Value of `section.key`: the flag if given, else the file, else
    /// `default`. Parse failures name the flag.
    pub fn get<T>(&self, section: &str, key: &str, flag: Option<T>, default: T) -> Result<T, UsageError>
    where
        T: FromStr + Echo,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => v,
            None => match self.file.entries.get(&(section.to_string(), key.to_string())) {
                Some(text) => text.parse().map_err(|e: T::Err| UsageError::BadValue {
                    flag: format!("{section}.{key}"),
                    value: text.clone(),
                    message: e.to_string(),
                })?,
                None => default,
            },
        };
        self.used.borrow_mut().insert(format!("{section}.{key}"), value.echo());
        Ok(value)
    }

    /// Effective values in key order.
    pub fn echo(&self) -> Vec<(String, String)> {
        self.used.borrow().iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}
