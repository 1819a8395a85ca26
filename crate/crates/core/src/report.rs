//! Shared output schema helpers: versioned JSON envelopes and CSV cells
//! that round-trip `f64` exactly.

use crate::error::Result;
use serde::Serialize;
use std::io::Write;

/// Version tag carried by every JSON document this crate emits.
pub const SCHEMA_VERSION: u32 = 1;

/// Envelope adding the schema version to any serializable payload.
#[derive(Debug, Clone, Serialize)]
pub struct Versioned<T: Serialize> {
    pub schema_version: u32,
    #[serde(flatten)]
    pub payload: T,
}

impl<T: Serialize> Versioned<T> {
    pub fn new(payload: T) -> Self {
        Versioned {
            schema_version: SCHEMA_VERSION,
            payload,
        }
    }
}

/// Serialize a payload as pretty JSON with the schema version field.
pub fn to_json<T: Serialize>(payload: &T) -> Result<String> {
    let v = serde_json::json!({ "schema_version": SCHEMA_VERSION });
    let mut doc = serde_json::to_value(payload)
        .map_err(|e| crate::Error::Parse(format!("json serialization: {e}")))?;
    if let (serde_json::Value::Object(doc), serde_json::Value::Object(head)) = (&mut doc, v) {
        for (k, val) in head {
            doc.insert(k, val);
        }
    }
    serde_json::to_string_pretty(&doc).map_err(|e| crate::Error::Parse(format!("json: {e}")))
}

/// Format an `f64` CSV cell with 17 significant digits (lossless
/// round-trip through `str::parse::<f64>()`).
pub fn csv_cell(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a CSV table: header row, then rows of exact cells.
pub fn write_csv<W: Write>(w: &mut W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| csv_cell(x)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}
