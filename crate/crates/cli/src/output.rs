use std::io::Write;
use std::path::Path;

use segal_core::numeric::fmt12;

use crate::{input, CliError, Global};

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Main output to `--output` or stdout.
pub fn emit(g: &Global, text: &str) -> Result<(), CliError> {
    match &g.output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(input)?;
            out.flush().map_err(input)
        }
    }
}

/// Ordered `key = value` lines.
#[derive(Debug, Default)]
pub struct Kv(Vec<(String, String)>);

impl Kv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn s(&mut self, k: &str, v: impl Into<String>) -> &mut Self {
        self.0.push((k.to_string(), v.into()));
        self
    }

    pub fn f(&mut self, k: &str, v: f64) -> &mut Self {
        self.s(k, fmt12(v))
    }

    pub fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// As density-file comment lines.
    pub fn render_comment(&self) -> String {
        self.0.iter().map(|(k, v)| format!("# {k} = {v}\n")).collect()
    }

    /// A two-line CSV with the keys as header.
    pub fn render_csv(&self) -> String {
        let keys: Vec<&str> = self.0.iter().map(|p| p.0.as_str()).collect();
        let vals: Vec<&str> = self.0.iter().map(|p| p.1.as_str()).collect();
        format!("{}\n{}\n", keys.join(","), vals.join(","))
    }
}

/// Comma-separated list of finite numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    s.split(',')
        .map(|x| {
            let x = x.trim();
            x.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("invalid number `{x}`"))
        })
        .collect::<Result<_, _>>()
        .map(Grid)
}
