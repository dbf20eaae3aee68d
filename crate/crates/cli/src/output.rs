//! Tabular outputs written as CSV or as JSON arrays of row objects keyed by
//! the CSV header. Numbers are rounded to 12 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// JSON value for a float: a rounded number, or a string for non-finite values.
pub fn num(x: f64) -> Value {
    let x = round12(x);
    match Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None if x == f64::NEG_INFINITY => Value::String("-inf".into()),
        None if x == f64::INFINITY => Value::String("inf".into()),
        None => Value::String("nan".into()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    Int(i64),
    Num(f64),
    Empty,
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => match num(*x) {
                Value::String(s) => s,
                v => v.to_string(),
            },
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Str(s) => Value::String(s.clone()),
            Cell::Int(i) => Value::Number((*i).into()),
            Cell::Num(x) => num(*x),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Str(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Str(s)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<u8> for Cell {
    fn from(i: u8) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<u32>> for Cell {
    fn from(i: Option<u32>) -> Self {
        i.map_or(Cell::Empty, |i| Cell::Int(i as i64))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::to_json))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(pretty(&self.to_json())),
        }
    }

    /// Writes `<dir>/<stem>.<ext>` and returns the file name.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> anyhow::Result<String> {
        let name = format!("{stem}.{}", format.extension());
        write_file(&dir.join(&name), &self.render(format)?)?;
        Ok(name)
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn write_file(path: &PathBuf, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(round12(0.1234567890123456), 0.123456789012);
        assert_eq!(round12(-12345.678901234567), -12345.6789012);
        assert_eq!(round12(0.0), 0.0);
        assert_eq!(num(f64::NEG_INFINITY), Value::String("-inf".into()));
        assert_eq!(num(1.0).to_string(), "1.0");
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(["name", "value", "id"]);
        t.push(vec!["a,b".into(), 0.5.into(), Cell::Empty]);
        t.push(vec!["c".into(), (1.0 / 3.0).into(), Some(3).into()]);
        assert_eq!(t.to_csv().unwrap(), "name,value,id\n\"a,b\",0.5,\nc,0.333333333333,3\n");
        let j = t.to_json();
        assert_eq!(j[1]["value"], serde_json::json!(0.333333333333));
        assert_eq!(j[0]["id"], Value::Null);
    }
}
