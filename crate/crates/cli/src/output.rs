//! Record emission in plain, CSV and newline-delimited JSON form.

use std::io::{self, Write};

use clap::ValueEnum;
use qcalc_core::scalar::format_f64;
use qcalc_core::Scalar;
use serde_json::{Map, Number, Value as Json};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub enum Field {
    Scalar(Scalar),
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Field {
    fn text(&self) -> String {
        match self {
            Field::Scalar(s) => s.to_string(),
            Field::Float(x) => format_f64(*x),
            Field::Int(i) => i.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Text(t) => t.clone(),
        }
    }

    fn json(&self) -> Json {
        let float = |x: f64| {
            if x.is_finite() {
                Json::Number(format_f64(x).parse::<Number>().expect("decimal literal"))
            } else {
                Json::String(x.to_string())
            }
        };
        match self {
            Field::Scalar(Scalar::Real(x)) | Field::Float(x) => float(*x),
            Field::Int(i) => Json::Number((*i).into()),
            Field::Bool(b) => Json::Bool(*b),
            other => Json::String(other.text()),
        }
    }
}

impl From<Scalar> for Field {
    fn from(s: Scalar) -> Self {
        Field::Scalar(s)
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Float(x)
    }
}

impl From<usize> for Field {
    fn from(i: usize) -> Self {
        Field::Int(i as i64)
    }
}

impl From<bool> for Field {
    fn from(b: bool) -> Self {
        Field::Bool(b)
    }
}

impl From<&str> for Field {
    fn from(t: &str) -> Self {
        Field::Text(t.to_string())
    }
}

impl From<String> for Field {
    fn from(t: String) -> Self {
        Field::Text(t)
    }
}

/// A table whose rows share one column list.
#[derive(Clone, Debug)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Field>>,
    /// In plain mode a one-cell table prints just the value.
    bare_value: bool,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
            bare_value: false,
        }
    }

    pub fn single(column: &'static str, value: impl Into<Field>) -> Self {
        let mut table = Table::new(&[column]);
        table.push(vec![value.into()]);
        table.bare_value = true;
        table
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Plain => self.write_plain(out),
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_plain(&self, out: &mut dyn Write) -> io::Result<()> {
        if self.bare_value {
            return writeln!(out, "{}", self.rows[0][0].text());
        }
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Field::text).collect())
            .collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
            .collect();
        let line = |items: Vec<&str>| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        writeln!(out, "{}", line(self.columns.clone()))?;
        for row in &cells {
            writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Field::text))?;
        }
        writer.flush()
    }

    fn write_json(&self, out: &mut dyn Write) -> io::Result<()> {
        for row in &self.rows {
            let object: Map<String, Json> = self
                .columns
                .iter()
                .zip(row)
                .map(|(c, f)| (c.to_string(), f.json()))
                .collect();
            writeln!(out, "{}", Json::Object(object))?;
        }
        Ok(())
    }
}
