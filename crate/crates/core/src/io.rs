//! CSV data files and JSON mechanism configs.
//!
//! Data files have a header `x1,...,xd,y` and one row per agent. Floats are
//! written in their shortest round-trip decimal form, so writing and reading
//! back is bit-exact.

use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::audit::MechanismSpec;
use crate::error::{Error, Result};
use crate::model::DataSet;

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

pub fn read_csv<R: Read>(reader: R) -> Result<DataSet> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    let cols = header.len();
    if cols == 0 || &header[cols - 1] != "y" {
        return Err(Error::InvalidInput("csv header must end with `y`".into()));
    }
    for (j, name) in header.iter().take(cols - 1).enumerate() {
        if name != format!("x{}", j + 1) {
            return Err(Error::InvalidInput(format!("csv column {} must be named `x{}`, found `{name}`", j + 1, j + 1)));
        }
    }
    let d = cols - 1;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::InvalidInput(format!("row {}: `{field}` is not a number", row + 1)))?;
            if j < d {
                xs.push(v);
            } else {
                ys.push(v);
            }
        }
    }
    if ys.is_empty() {
        return Err(Error::InvalidInput("csv has no data rows".into()));
    }
    DataSet::from_flat(d, xs, ys)
}

pub fn read_csv_path(path: &Path) -> Result<DataSet> {
    let f = std::fs::File::open(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    read_csv(f)
}

pub fn write_csv<W: Write>(data: &DataSet, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=data.dim()).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..data.n() {
        let row: Vec<String> = data.x(i).iter().chain(std::iter::once(&data.y(i))).map(|v| v.to_string()).collect();
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::InvalidInput(e.to_string()))
}

/// Parses a mechanism config. `kind`, when given, fills in or must match the
/// config's own `"kind"`; a CRM config without index sets uses all agents
/// for both.
pub fn parse_mechanism(kind: Option<&str>, config: Option<&str>, n: usize) -> Result<MechanismSpec> {
    let mut obj = match config {
        Some(text) => match serde_json::from_str::<Value>(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))? {
            Value::Object(m) => m,
            _ => return Err(Error::InvalidInput("config must be a JSON object".into())),
        },
        None => serde_json::Map::new(),
    };
    match (kind, obj.get("kind").and_then(Value::as_str)) {
        (Some(k), Some(c)) if k != c => {
            return Err(Error::InvalidInput(format!("--mechanism {k} conflicts with config kind `{c}`")));
        }
        (Some(k), None) => {
            obj.insert("kind".into(), Value::String(k.into()));
        }
        (None, None) => return Err(Error::InvalidInput("no mechanism given".into())),
        _ => {}
    }
    if obj.get("kind").and_then(Value::as_str) == Some("crm") && !obj.contains_key("S") && !obj.contains_key("s") {
        let all: Vec<usize> = (0..n).collect();
        obj.insert("s".into(), serde_json::json!(all));
        obj.insert("s_prime".into(), serde_json::json!(all));
    }
    serde_json::from_value(Value::Object(obj)).map_err(|e| Error::InvalidInput(format!("config: {e}")))
}

/// Pretty JSON with object keys in sorted order.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    // serde_json's Value map is a BTreeMap, so a round trip sorts the keys.
    let v = serde_json::to_value(value).expect("serializable");
    serde_json::to_string_pretty(&v).expect("serializable")
}
