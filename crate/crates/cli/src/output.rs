//! Rendering of command results.
//!
//! JSON is pretty-printed with fields in declaration order, so equal inputs
//! give byte-identical output. CSV flattens one record (or a list of records)
//! into a header line and one line per record.

use std::io::Write;

use ecdim::tables::TableResult;
use serde::Serialize;
use serde_json::Value;

use crate::{CliError, Format};

pub fn emit<T: Serialize, W: Write>(value: &T, format: Format, out: &mut W) -> Result<(), CliError> {
    let json = serde_json::to_value(value).expect("command records serialize");
    match format {
        Format::Json => write_json(&json, out),
        Format::Csv => write_csv(&json, out),
    }
}

fn write_json<W: Write>(json: &Value, out: &mut W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, json).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn write_csv<W: Write>(json: &Value, out: &mut W) -> Result<(), CliError> {
    let rows: Vec<&serde_json::Map<String, Value>> = match json {
        Value::Object(map) => vec![map],
        Value::Array(items) => items.iter().filter_map(Value::as_object).collect(),
        other => {
            writeln!(out, "{}", csv_field(other))?;
            return Ok(());
        }
    };
    let Some(first) = rows.first() else {
        return Ok(());
    };
    let header: Vec<&str> = first.keys().map(String::as_str).collect();
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = header
            .iter()
            .map(|k| row.get(*k).map(csv_field).unwrap_or_default())
            .collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

fn csv_field(v: &Value) -> String {
    let raw = match v {
        Value::Null => return String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => return n.to_string(),
        Value::Bool(b) => return b.to_string(),
        nested => nested.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

/// Column layout of the table CSV.
pub const TABLE_CSV_HEADER: &str = "E_over_hbar_omega,capacity,epsilon_fraction,m,published_m,rel_err";

/// Tables get a fixed CSV layout with dimensions at three significant digits.
pub fn emit_table<W: Write>(table: &TableResult, format: Format, out: &mut W) -> Result<(), CliError> {
    match format {
        Format::Json => emit(table, format, out),
        Format::Csv => {
            writeln!(out, "{TABLE_CSV_HEADER}")?;
            for c in &table.cells {
                writeln!(
                    out,
                    "{},{},{},{:.2e},{:.1e},{:.4}",
                    c.e_over_hbar_omega,
                    c.capacity.name(),
                    c.epsilon_fraction,
                    c.m as f64,
                    c.published_m,
                    c.rel_err
                )?;
            }
            Ok(())
        }
    }
}
