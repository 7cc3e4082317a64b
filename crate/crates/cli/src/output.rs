use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => num_value(*x),
            Cell::Int(x) => json!(x),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Twelve significant digits, trailing zeros trimmed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        // Rounding can carry into a new digit (9.99... -> 10.0); re-check length.
        if s.trim_start_matches('-').trim_start_matches("0.").trim_start_matches('0').replace('.', "").len() <= 12 {
            return s;
        }
    }
    let s = format!("{x:.11e}");
    let (mantissa, exponent) = s.split_once('e').expect("scientific format");
    let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
    format!("{mantissa}e{exponent}")
}

fn num_value(x: f64) -> Value {
    if x.is_finite() {
        fmt_num(x).parse::<f64>().map(|v| json!(v)).unwrap_or(Value::Null)
    } else {
        json!(fmt_num(x))
    }
}

/// Rounds every float in a JSON tree to twelve significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num_value(n.as_f64().expect("f64 number")),
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

/// A command's result: a table plus named summary values.
#[derive(Debug, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(&'static str, Cell)>,
    /// Extra structured detail for JSON output.
    pub detail: Option<Value>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Default::default()
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn note(&mut self, key: &'static str, value: impl Into<Cell>) {
        self.summary.push((key, value.into()));
    }

    pub fn render(&self, command: &str, config: &Value, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => {
                let mut out = Vec::new();
                writeln!(out, "# sharpthresh {command}")?;
                writeln!(out, "# config: {}", serde_json::to_string(config).expect("config serializes"))?;
                {
                    let mut w = csv::Writer::from_writer(&mut out);
                    w.write_record(&self.columns).map_err(csv_error)?;
                    for row in &self.rows {
                        w.write_record(row.iter().map(Cell::text)).map_err(csv_error)?;
                    }
                    w.flush()?;
                }
                for (k, v) in &self.summary {
                    writeln!(out, "# {k}: {}", v.text())?;
                }
                Ok(out)
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        Value::Object(
                            self.columns
                                .iter()
                                .zip(r)
                                .map(|(c, v)| (c.to_string(), v.json()))
                                .collect::<Map<_, _>>(),
                        )
                    })
                    .collect();
                let summary: Map<String, Value> =
                    self.summary.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
                let mut doc = json!({
                    "command": command,
                    "config": config,
                    "rows": rows,
                    "summary": summary,
                });
                if let Some(detail) = &self.detail {
                    doc["detail"] = round_json(detail.clone());
                }
                let mut out = serde_json::to_vec_pretty(&doc).expect("report serializes");
                out.push(b'\n');
                Ok(out)
            }
        }
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::io(format!("csv: {e}"))
}

/// Writes `bytes` to `path` atomically, or to stdout when `path` is absent.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    match path {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| CliError::from(e.error))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0 / 3.0 * 1e-7), "6.66666666667e-8");
        assert_eq!(fmt_num(123456.0), "123456");
        assert_eq!(fmt_num(-1.5e20), "-1.5e20");
        assert_eq!(fmt_num(9.9999999999999), "10");
        assert_eq!(fmt_num(0.0), "0");
    }
}
