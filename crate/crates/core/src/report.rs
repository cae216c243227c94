//! Command reports and their text, JSON and CSV renderings.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit string of dimensionless results.
pub const DIMENSIONLESS: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::config("format", format!("unknown format `{other}`; use text, json or csv"))),
        }
    }
}

/// One named result with its unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub key: String,
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Num(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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

/// Tabular payload; the only part of a report that can be written as CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        w.flush().map_err(|e| Error::io("CSV output", e))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: Option<u64>,
    pub rng: Option<String>,
}

impl Default for Provenance {
    fn default() -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: None,
            rng: None,
        }
    }
}

/// Self-contained output of one command: the resolved inputs, results with
/// units, and enough provenance to rerun it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    /// Scenario with every default filled in, plus command options.
    pub inputs: serde_json::Value,
    pub results: Vec<Quantity>,
    /// Boolean conditions raised by the computation (clamping, regime, ...).
    pub flags: Vec<String>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
    pub table: Option<Table>,
    pub provenance: Provenance,
    /// Seconds since the Unix epoch; the only field that varies between
    /// otherwise identical runs.
    pub generated_at: u64,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs: serde_json::Value) -> Self {
        Report {
            command: command.into(),
            inputs,
            results: Vec::new(),
            flags: Vec::new(),
            notes: Vec::new(),
            warnings: Vec::new(),
            table: None,
            provenance: Provenance::default(),
            generated_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// Adds a result. Non-finite values cannot be represented in JSON, so
    /// they are turned into a flag instead.
    pub fn push(&mut self, key: &str, value: f64, unit: &str) {
        assert!(!unit.is_empty(), "result `{key}` needs a unit");
        if value.is_finite() {
            self.results.push(Quantity {
                key: key.to_string(),
                value,
                unit: unit.to_string(),
            });
        } else {
            self.flags.push(format!("{key} is not finite ({value})"));
        }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.results.iter().find(|q| q.key == key).map(|q| q.value)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::config("report", e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} — {} {}", self.command, self.provenance.tool, self.provenance.version);
        if let Some(seed) = self.provenance.seed {
            let _ = writeln!(s, "seed {seed} ({})", self.provenance.rng.as_deref().unwrap_or("unknown rng"));
        }
        let width = self.results.iter().map(|q| q.key.len()).max().unwrap_or(0);
        for q in &self.results {
            let _ = writeln!(s, "  {:<width$}  {} [{}]", q.key, format_number(q.value), q.unit);
        }
        for (title, lines) in [("flags", &self.flags), ("notes", &self.notes), ("warnings", &self.warnings)] {
            if !lines.is_empty() {
                let _ = writeln!(s, "{title}:");
                for l in lines {
                    let _ = writeln!(s, "  - {l}");
                }
            }
        }
        if let Some(t) = &self.table {
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
            let widths: Vec<usize> = t
                .columns
                .iter()
                .enumerate()
                .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
                .collect();
            let _ = writeln!(s);
            let line = |row: &[String]| {
                row.iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            let _ = writeln!(s, "{}", line(&t.columns));
            for r in &cells {
                let _ = writeln!(s, "{}", line(r));
            }
        }
        s
    }

    /// Renders the report in `format` and writes it to `out`, or to stdout.
    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let mut buf = Vec::new();
        match format {
            Format::Text => buf.extend_from_slice(self.to_text().as_bytes()),
            Format::Json => {
                buf.extend_from_slice(self.to_json()?.as_bytes());
                buf.push(b'\n');
            }
            Format::Csv => match &self.table {
                Some(t) => t.write_csv(&mut buf)?,
                None => {
                    return Err(Error::config(
                        "format",
                        format!("`{}` has no tabular output; use text or json", self.command),
                    ))
                }
            },
        }
        match out {
            Some(path) => std::fs::write(path, &buf).map_err(|e| Error::io(path, e)),
            None => std::io::stdout().write_all(&buf).map_err(|e| Error::io("stdout", e)),
        }
    }
}

/// Integers verbatim, otherwise four significant digits with fixed notation
/// for moderate magnitudes.
fn format_number(v: f64) -> String {
    let a = v.abs();
    if v.fract() == 0.0 && a < 1e15 {
        format!("{v:.0}")
    } else if (1e-3..1e6).contains(&a) {
        let decimals = (3 - a.log10().floor() as i32).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.3e}")
    }
}
