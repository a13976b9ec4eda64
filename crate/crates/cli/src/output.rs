//! Writers for JSON (one value per line) and CSV output, and readers that
//! parse them back.

use std::io::{self, Write};

use luce::io::{fmt_num, round_json};
use serde_json::{Map, Value};

use crate::args::Format;

pub enum Sink<'a> {
    Json(Box<dyn Write + 'a>),
    Csv { writer: Box<csv::Writer<Box<dyn Write + 'a>>>, header_done: bool },
}

impl<'a> Sink<'a> {
    pub fn new(format: Format, out: Box<dyn Write + 'a>) -> Self {
        match format {
            Format::Json => Sink::Json(out),
            Format::Csv => Sink::Csv { writer: Box::new(csv::Writer::from_writer(out)), header_done: false },
        }
    }

    /// A single record. CSV gets a header of the keys and one row.
    pub fn object(&mut self, v: Value) -> io::Result<()> {
        let Value::Object(map) = v else {
            return self.json_line(v);
        };
        let (keys, cells): (Vec<String>, Vec<Value>) = map.into_iter().unzip();
        let keys: Vec<&str> = keys.iter().map(String::as_str).collect();
        self.row(&keys, cells)
    }

    /// One table row. The header is written before the first row only, so a
    /// table without rows produces no output at all.
    pub fn row(&mut self, header: &[&str], cells: Vec<Value>) -> io::Result<()> {
        match self {
            Sink::Json(_) => {
                let map: Map<String, Value> = header.iter().map(|h| h.to_string()).zip(cells).collect();
                self.json_line(Value::Object(map))
            }
            Sink::Csv { writer, header_done } => {
                if !*header_done {
                    writer.write_record(header)?;
                    *header_done = true;
                }
                writer.write_record(cells.iter().map(csv_cell))?;
                Ok(())
            }
        }
    }

    fn json_line(&mut self, v: Value) -> io::Result<()> {
        match self {
            Sink::Json(out) => {
                serde_json::to_writer(&mut *out, &round_json(v))?;
                out.write_all(b"\n")
            }
            Sink::Csv { writer, .. } => {
                writer.write_record([round_json(v).to_string()])?;
                Ok(())
            }
        }
    }

    pub fn finish(self) -> io::Result<()> {
        match self {
            Sink::Json(mut out) => out.flush(),
            Sink::Csv { mut writer, .. } => writer.flush(),
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => fmt_num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(csv_cell).collect::<Vec<_>>().join(" "),
        Value::Object(_) => round_json(v.clone()).to_string(),
    }
}

/// A parsed CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j].as_str()).collect())
    }

    /// A numeric column; `inf`/`nan` are accepted.
    pub fn numbers(&self, name: &str) -> Option<Result<Vec<f64>, std::num::ParseFloatError>> {
        self.column(name).map(|c| c.iter().map(|s| s.parse::<f64>()).collect())
    }
}

pub fn read_csv(text: &str) -> Result<Table, csv::Error> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()?;
    Ok(Table { header, rows })
}

pub fn read_json_lines(text: &str) -> Result<Vec<Value>, serde_json::Error> {
    text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn render(format: Format, f: impl FnOnce(&mut Sink<'_>)) -> String {
        let mut buf = Vec::new();
        {
            let mut sink = Sink::new(format, Box::new(&mut buf));
            f(&mut sink);
            sink.finish().unwrap();
        }
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn table_round_trip() {
        let rows = |s: &mut Sink<'_>| {
            s.row(&["label", "probability"], vec![json!(1), json!(0.5160943234)]).unwrap();
            s.row(&["label", "probability"], vec![json!(2), json!(1.0 / 3.0)]).unwrap();
        };
        let csv = render(Format::Csv, rows);
        assert_eq!(csv, "label,probability\n1,0.516094323\n2,0.333333333\n");
        let t = read_csv(&csv).unwrap();
        assert_eq!(t.numbers("probability").unwrap().unwrap(), vec![0.516094323, 0.333333333]);
        let js = render(Format::Json, rows);
        let v = read_json_lines(&js).unwrap();
        assert_eq!(v[1]["probability"], json!(0.333333333));
    }

    #[test]
    fn empty_table_is_empty() {
        assert_eq!(render(Format::Csv, |_| {}), "");
        assert_eq!(render(Format::Json, |_| {}), "");
    }

    #[test]
    fn object_as_csv() {
        let csv = render(Format::Csv, |s| s.object(json!({"pmf": 0.25, "sigma": [3, 2, 1]})).unwrap());
        assert_eq!(csv, "pmf,sigma\n0.25,3 2 1\n");
    }
}
