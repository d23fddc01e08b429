use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self { name: name.into(), unit: unit.into() }
    }

    pub fn header(&self) -> String {
        format!("{} ({})", self.name, self.unit)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub command: Vec<String>,
    pub version: String,
    pub wall_time_s: f64,
    pub columns: Vec<Column>,
}

/// Everything a run emits, in the shape of the JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub meta: Meta,
    pub params: serde_json::Value,
    pub rows: Vec<Vec<f64>>,
}

/// Column layout plus rows, before run metadata is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<Column>, rows: Vec<Vec<f64>>) -> Result<Self, CliError> {
        for (i, row) in rows.iter().enumerate() {
            debug_assert_eq!(row.len(), columns.len());
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(CliError::NonFinite { column: columns[j].name.clone(), row: i });
            }
        }
        Ok(Self { columns, rows })
    }
}

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl RunReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header: Vec<String> = self.meta.columns.iter().map(|c| csv_field(&c.header())).collect();
        write!(w, "{}\r\n", header.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
            write!(w, "{}\r\n", line.join(","))?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }
}
