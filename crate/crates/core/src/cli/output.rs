// SPDX-License-Identifier: Apache-2.0

//! Tabular output in CSV or JSON with fixed significant digits.

use std::io::Write;

use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// A named table; column names carry their units, e.g. `G [V_N]`.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Free-form key/value annotations (units, kernel, distance mode).
    pub meta: Vec<(String, String)>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Formats `x` with `digits` significant digits; exponent form outside [1e-4, 1e9).
pub fn format_number(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let s = if !(-4..9).contains(&mag) {
        format!("{:.*e}", digits - 1, x)
    } else {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        "0".into()
    } else {
        s
    }
}

fn cell_text(c: &Cell, digits: usize) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => format_number(*v, digits),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

fn cell_json(c: &Cell, digits: usize) -> Value {
    match c {
        Cell::Int(v) => json!(v),
        Cell::Num(v) => format_number(*v, digits)
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map_or(Value::Null, |x| json!(x)),
        Cell::Text(s) => json!(s),
        Cell::Bool(b) => json!(b),
    }
}

/// CSV: `# key: value` annotation lines, then a header row and the data.
pub fn write_csv(table: &Table, digits: usize, out: &mut dyn Write) -> Result<()> {
    for (k, v) in &table.meta {
        writeln!(out, "# {k}: {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|c| cell_text(c, digits))).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn table_json(table: &Table, digits: usize) -> Value {
    let meta: serde_json::Map<String, Value> = table.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    json!({
        "table": table.name,
        "meta": meta,
        "columns": table.columns,
        "rows": table.rows.iter().map(|r| r.iter().map(|c| cell_json(c, digits)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn write_table(table: &Table, format: Format, digits: usize, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => write_csv(table, digits, out),
        Format::Json => {
            let text = serde_json::to_string_pretty(&table_json(table, digits))
                .map_err(|e| Error::Io(std::io::Error::other(e)))?;
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_number(5.930624, 4), "5.931");
        assert_eq!(format_number(2.0, 6), "2");
        assert_eq!(format_number(-0.0000001, 3), "-1.00e-7");
        assert_eq!(format_number(123456.789, 6), "123457");
        assert_eq!(format_number(-1e-20, 6), "-1.00000e-20");
        assert_eq!(format_number(-0.0, 6), "0");
        assert_eq!(format_number(0.06938, 2), "0.069");
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new("demo", &["N", "G [V_N]", "label"]).meta("units", "V_N");
        t.push(vec![4usize.into(), 2.35412345.into(), "v4.1".into()]);
        let mut csv_out = Vec::new();
        write_table(&t, Format::Csv, 6, &mut csv_out).unwrap();
        let text = String::from_utf8(csv_out).unwrap();
        assert!(text.starts_with("# units: V_N\nN,G [V_N],label\n4,2.35412,v4.1"));
        let j = table_json(&t, 6);
        assert_eq!(j["rows"][0][1].as_f64().unwrap(), 2.35412);
    }
}
