//! Tabular sweep output and its CSV / JSON encodings.
//!
//! CSV: `# key = value` metadata lines, one header line of column names,
//! then rows of `{:.16e}` numbers (17 significant digits, lossless for f64).
//! JSON: `{"schema_version": 1, "meta": [[key, value], ...], "columns": [...],
//! "rows": [[...], ...]}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct JsonSweep {
    schema_version: u32,
    meta: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn clean(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

impl SweepResult {
    pub fn new(columns: &[&str]) -> Self {
        SweepResult {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Metadata keys must not contain `=`; newlines in either part become spaces.
    pub fn push_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((clean(key).replace('=', "_").trim().to_string(), clean(&value.to_string()).trim().to_string()));
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column_values(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn encode(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        // Writes into a Vec cannot fail.
        w.write_record(&self.columns).expect("in-memory CSV write");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}"))).expect("in-memory CSV write");
        }
        let body = w.into_inner().expect("in-memory CSV flush");
        out.push_str(std::str::from_utf8(&body).expect("CSV of UTF-8 fields"));
        out
    }

    pub fn to_json(&self) -> Result<String> {
        if self.rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Decode("JSON output cannot carry non-finite values".into()));
        }
        let doc = JsonSweep {
            schema_version: SCHEMA_VERSION,
            meta: self.meta.clone(),
            columns: self.columns.clone(),
            rows: self.rows.clone(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Decode(e.to_string()))
    }

    fn check_shape(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(Error::Decode("no columns".into()));
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.len() != self.columns.len() {
                return Err(Error::Decode(format!(
                    "row {i} has {} values for {} columns",
                    r.len(),
                    self.columns.len()
                )));
            }
        }
        Ok(())
    }
}

pub fn decode_sweep_csv(text: &str) -> Result<SweepResult> {
    let mut out = SweepResult::default();
    let mut body_start = text.len();
    let mut offset = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        let Some(rest) = line.strip_prefix('#') else {
            body_start = offset;
            break;
        };
        let (k, v) = rest
            .split_once(" = ")
            .ok_or_else(|| Error::Decode(format!("line {}: expected `# key = value`", i + 1)))?;
        out.meta.push((k.trim().to_string(), v.trim().to_string()));
        offset += line.len();
    }
    let meta_lines = out.meta.len();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(&text.as_bytes()[body_start..]);
    let line_of = |pos: Option<&csv::Position>| pos.map_or(0, |p| p.line() as usize + meta_lines);
    let header = reader.headers().map_err(|e| Error::Decode(format!("header: {e}")))?;
    if header.is_empty() {
        return Err(Error::Decode("missing header line".into()));
    }
    out.columns = header.iter().map(str::to_string).collect();
    if out.columns.iter().any(|c| c.is_empty() || c.starts_with('#')) {
        return Err(Error::Decode(format!("line {}: bad column name", meta_lines + 1)));
    }
    for record in reader.records() {
        let record = record.map_err(|e| Error::Decode(format!("line {}: {e}", line_of(e.position()))))?;
        let line = line_of(record.position());
        if record.get(0).is_some_and(|c| c.starts_with('#')) {
            return Err(Error::Decode(format!("line {line}: metadata after header")));
        }
        let row = record
            .iter()
            .map(|c| c.parse::<f64>().map_err(|_| Error::Decode(format!("line {line}: `{c}` is not a number"))))
            .collect::<Result<Vec<f64>>>()?;
        out.rows.push(row);
    }
    out.check_shape()?;
    Ok(out)
}

pub fn decode_sweep_json(text: &str) -> Result<SweepResult> {
    let doc: JsonSweep = serde_json::from_str(text).map_err(|e| Error::Decode(e.to_string()))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::Decode(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    let out = SweepResult {
        meta: doc.meta,
        columns: doc.columns,
        rows: doc.rows,
    };
    out.check_shape()?;
    Ok(out)
}

pub fn decode_sweep(text: &str, format: Format) -> Result<SweepResult> {
    match format {
        Format::Csv => decode_sweep_csv(text),
        Format::Json => decode_sweep_json(text),
    }
}
