//! Plot-ready output: numeric tables as CSV or JSON, and suite reports.
//! Floats are written in shortest round-trip form; non-finite values as
//! `inf`, `-inf` or `NaN` (strings in JSON).

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::harness::SuiteReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Csv,
    #[default]
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown format {other:?}; expected csv or json"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// Named numeric columns, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidArgument(format!(
                "row has {} entries, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| x.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut table = Self::new(r.headers()?.iter().map(str::to_string));
        for rec in r.records() {
            let row = rec?
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| Error::InvalidArgument(format!("{s:?}: {e}"))))
                .collect::<Result<_>>()?;
            table.push(row)?;
        }
        Ok(table)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(|x| number(*x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = || Error::InvalidArgument("malformed table JSON".into());
        let columns = v["columns"]
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|c| c.as_str().map(str::to_string).ok_or_else(bad))
            .collect::<Result<Vec<_>>>()?;
        let mut table = Self::new(columns);
        for row in v["rows"].as_array().ok_or_else(bad)? {
            let row = row.as_array().ok_or_else(bad)?.iter().map(|x| from_number(x).ok_or_else(bad)).collect::<Result<_>>()?;
            table.push(row)?;
        }
        Ok(table)
    }
}

/// A finite float as a JSON number, otherwise as its string form.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(x.to_string())
    }
}

fn from_number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// Result of one analysis command.
#[derive(Debug, Clone)]
pub struct Output {
    pub command: String,
    pub table: Table,
    pub summary: Value,
    /// False when an asserted inequality failed.
    pub pass: bool,
}

impl Output {
    pub fn to_json(&self) -> Value {
        json!({"command": self.command, "pass": self.pass, "summary": self.summary, "table": self.table.to_json()})
    }

    /// Writes `<command>.json`, or `<command>.csv` with the summary in
    /// `<command>.summary.json`. Returns the files written.
    pub fn write_to_dir(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        match format {
            Format::Json => {
                let path = dir.join(format!("{}.json", self.command));
                fs::write(&path, serde_json::to_string_pretty(&self.to_json())?)?;
                Ok(vec![path])
            }
            Format::Csv => {
                let path = dir.join(format!("{}.csv", self.command));
                self.table.write_csv(fs::File::create(&path)?)?;
                let summary = dir.join(format!("{}.summary.json", self.command));
                fs::write(&summary, serde_json::to_string_pretty(&json!({"pass": self.pass, "summary": self.summary}))?)?;
                Ok(vec![path, summary])
            }
        }
    }

    /// CSV prints the table alone; JSON prints everything.
    pub fn write_to<W: Write>(&self, mut out: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.table.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json())?;
                writeln!(out)?;
                Ok(())
            }
        }
    }
}

/// One row per check: `check, kind, pass, fitted_constant, witness, params`.
pub fn write_report_csv<W: Write>(report: &SuiteReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check", "kind", "pass", "fitted_constant", "witness", "params"])?;
    for c in &report.checks {
        let kind = serde_json::to_value(c.kind)?;
        w.write_record([
            c.check.clone(),
            kind.as_str().unwrap_or_default().to_string(),
            c.pass.to_string(),
            c.fitted_constant.map(|x| x.to_string()).unwrap_or_default(),
            c.witness.clone().unwrap_or_default(),
            c.params.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `verify-<suite>.<ext>` into `dir` and returns its path.
pub fn write_report(report: &SuiteReport, dir: &Path, format: Format) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("verify-{}.{}", report.suite, format.extension()));
    match format {
        Format::Json => fs::write(&path, serde_json::to_string_pretty(report)?)?,
        Format::Csv => write_report_csv(report, fs::File::create(&path)?)?,
    }
    Ok(path)
}
