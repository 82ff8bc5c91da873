//! Record serialization. JSON and CSV share one float encoding, 17
//! significant digits in scientific notation, so every number survives a
//! round trip through either format.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{Map, Value};

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// A flat record: field order is preserved and every value is a scalar.
pub type Record = Map<String, Value>;

pub fn record<T: Serialize>(value: &T) -> Record {
    match serde_json::to_value(value).expect("records serialize") {
        Value::Object(m) => m,
        other => panic!("record is not an object: {other}"),
    }
}

fn json_line(r: &Record) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    r.serialize(&mut ser).expect("in-memory write");
    String::from_utf8(buf).expect("json is utf-8")
}

/// A JSON array with one record per line.
pub fn to_json(records: &[Record]) -> String {
    if records.is_empty() {
        return "[]\n".into();
    }
    let lines: Vec<String> = records.iter().map(json_line).collect();
    format!("[\n{}\n]\n", lines.join(",\n"))
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.to_string(),
            (None, Some(i)) => i.to_string(),
            _ => fmt_float(n.as_f64().expect("finite number")),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Header from the first record's keys, then one row per record.
pub fn to_csv(records: &[Record]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = records.first() {
        w.write_record(first.keys()).expect("in-memory write");
        for r in records {
            w.write_record(first.keys().map(|k| r.get(k).map(cell).unwrap_or_default())).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
