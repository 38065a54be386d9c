//! Tabular reports rendered as CSV or JSON.

use std::io::Write;

use anyhow::Result;
use serde_json::{Map, Number, Value};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    /// An exact integer of arbitrary size, kept as its decimal string.
    Big(String),
    Int(i64),
    /// A float already rounded to 12 significant digits.
    Num(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn big(v: &impl ToString) -> Cell {
        Cell::Big(v.to_string())
    }

    pub fn int(v: impl TryInto<i64>) -> Cell {
        match v.try_into() {
            Ok(v) => Cell::Int(v),
            Err(_) => Cell::Empty,
        }
    }

    /// Rounds to 12 significant digits; non-finite values become empty.
    pub fn num(x: f64) -> Cell {
        if x.is_finite() {
            Cell::Num(format!("{x:.11e}"))
        } else {
            Cell::Empty
        }
    }

    pub fn opt_num(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::num)
    }

    fn csv_field(&self) -> String {
        match self {
            Cell::Text(s) | Cell::Big(s) | Cell::Num(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            Cell::Text(s) | Cell::Big(s) => Value::String(s.clone()),
            Cell::Int(v) => Value::from(*v),
            Cell::Num(s) => s
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A table with fixed columns.
#[derive(Debug, Clone)]
pub struct Report {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Report {
        Report {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    /// Appends a row given as `(column, cell)` pairs; unnamed columns stay empty.
    pub fn push(&mut self, cells: Vec<(&'static str, Cell)>) {
        let mut row = vec![Cell::Empty; self.columns.len()];
        for (name, cell) in cells {
            let idx = self
                .columns
                .iter()
                .position(|c| *c == name)
                .unwrap_or_else(|| panic!("unknown column {name}"));
            row[idx] = cell;
        }
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field))?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, out: &mut impl Write) -> Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json_value()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("rows".into(), Value::Array(rows));
        serde_json::to_writer(&mut *out, &Value::Object(top))?;
        writeln!(out)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(r: &Report, f: Format) -> String {
        let mut buf = Vec::new();
        r.write(f, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(
            Cell::num(std::f64::consts::PI),
            Cell::Num("3.14159265359e0".into())
        );
        assert_eq!(
            Cell::num(-0.000123456789012345),
            Cell::Num("-1.23456789012e-4".into())
        );
        assert_eq!(Cell::num(f64::NAN), Cell::Empty);
    }

    #[test]
    fn csv_and_json_layouts() {
        let mut r = Report::new(&["name", "count", "x"]);
        r.push(vec![
            ("name", Cell::text("a,b")),
            ("count", Cell::Big("12345678901234567890123".into())),
        ]);
        r.push(vec![("x", Cell::num(0.5))]);
        assert_eq!(
            render(&r, Format::Csv),
            "name,count,x\n\"a,b\",12345678901234567890123,\n,,5.00000000000e-1\n"
        );
        assert_eq!(
            render(&r, Format::Json),
            "{\"rows\":[{\"count\":\"12345678901234567890123\",\"name\":\"a,b\",\"x\":null},{\"count\":null,\"name\":null,\"x\":0.5}]}\n"
        );
    }
}
