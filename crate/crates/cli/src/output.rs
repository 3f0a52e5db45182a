//! CSV tables and line-delimited JSON records, each headed by the
//! effective configuration.

use serde_json::{json, Map, Value};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// Where a command's result goes: a file under `--out`, or standard output.
#[derive(Debug, Clone)]
pub struct Sink {
    dir: Option<PathBuf>,
    echo: Vec<(String, String)>,
    command: String,
}

impl Sink {
    pub fn new(dir: Option<&Path>, command: &str, echo: Vec<(String, String)>) -> Self {
        Sink { dir: dir.map(Path::to_path_buf), echo, command: command.to_string() }
    }

    fn emit(&self, name: &str, body: &str) -> io::Result<Option<PathBuf>> {
        match &self.dir {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let path = dir.join(name);
                fs::write(&path, body)?;
                Ok(Some(path))
            }
            None => {
                io::stdout().write_all(body.as_bytes())?;
                Ok(None)
            }
        }
    }

    /// CSV with `#` comment lines carrying the configuration.
    pub fn csv(&self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> io::Result<Option<PathBuf>> {
        let mut body = format!("# kdsqnm {} {}\n", env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.echo {
            body.push_str(&format!("# {k} = {v}\n"));
        }
        body.push_str(&columns.join(","));
        body.push('\n');
        for row in rows {
            body.push_str(&row.join(","));
            body.push('\n');
        }
        self.emit(name, &body)
    }

    /// One JSON object per line; the first carries the configuration.
    pub fn jsonl(&self, name: &str, records: &[Value]) -> io::Result<Option<PathBuf>> {
        let config: Map<String, Value> = self.echo.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let head = json!({ "kind": "config", "command": self.command, "version": env!("CARGO_PKG_VERSION"), "config": config });
        let mut body = format!("{head}\n");
        for r in records {
            body.push_str(&format!("{r}\n"));
        }
        self.emit(name, &body)
    }
}

/// Shortest round-trip representation.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
