//! Self-describing CSV artifacts.
//!
//! Layout: `# key = value` comment lines (format version, experiment, unit,
//! then the resolved configuration and any per-run results), one header row,
//! data rows. Floats use the shortest round-trip representation, so reruns
//! with the same configuration are byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;
use crate::plot::Plot;

pub const FORMAT_VERSION: &str = "owisac-csv/1";

/// Entropy unit at serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Units {
    pub bits: bool,
}

impl Units {
    pub fn name(&self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }

    /// Converts a value in nats.
    pub fn convert(&self, v: f64) -> f64 {
        if self.bits {
            v / std::f64::consts::LN_2
        } else {
            v
        }
    }

    /// `name_nats` or `name_bits`.
    pub fn column(&self, name: &str) -> String {
        format!("{name}_{}", self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Cell::Num(v)
        } else {
            Cell::Empty
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::from)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Num(v) if *v != 0.0 && !(1e-4..1e15).contains(&v.abs()) => write!(f, "{v:e}"),
            Cell::Num(v) => write!(f, "{v}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `# key = value` lines after the configuration.
    pub results: Vec<(String, String)>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            results: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self, experiment: &str, units: Units, config_toml: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# format = {FORMAT_VERSION}");
        let _ = writeln!(out, "# experiment = {experiment}");
        let _ = writeln!(out, "# unit = {}", units.name());
        for line in config_toml.lines().filter(|l| !l.trim().is_empty()) {
            let _ = writeln!(out, "# {line}");
        }
        for (k, v) in &self.results {
            let _ = writeln!(out, "# result.{k} = {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// One output file (plus optional plot) of an experiment.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub stem: String,
    pub table: Table,
    /// `(stem, plot)` pairs written only with `--plot`.
    pub plots: Vec<(String, Plot)>,
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_header_then_rows() {
        let mut t = Table::new(["x", "label", "y"]);
        t.push(vec![0.5.into(), "a".into(), f64::NAN.into()]);
        t.results.push(("gap".into(), "1".into()));
        let s = t.render("demo", Units { bits: true }, "[run]\nseed = 1\n");
        assert_eq!(
            s,
            "# format = owisac-csv/1\n# experiment = demo\n# unit = bits\n# [run]\n# seed = 1\n# result.gap = 1\nx,label,y\n0.5,a,\n"
        );
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0, -2.5e-13, 3e20, 1.3949631447615327e-13, 12345.678] {
            let s = Cell::from(v).to_string();
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(Cell::from(1.5e-7).to_string(), "1.5e-7");
    }

    #[test]
    fn bits_conversion() {
        let u = Units { bits: true };
        assert!((u.convert(2f64.ln()) - 1.0).abs() < 1e-15);
        assert_eq!(u.column("lower"), "lower_bits");
        assert_eq!(Units { bits: false }.convert(0.3), 0.3);
    }
}
