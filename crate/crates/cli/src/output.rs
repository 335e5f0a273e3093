//! Tables and their CSV / JSON serialization with a provenance header.

use std::fmt::Write as _;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    /// Not computed for this row (for instance an exact value above the size limit).
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Missing, Into::into)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }
}

/// Everything recorded above the data section.
#[derive(Debug, Clone)]
pub struct Header {
    pub command: String,
    pub config_sha256: String,
    /// (file name, sha256) of each data file.
    pub data_files: Vec<(String, String)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format!("{x:.8e}"),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
        Cell::Missing => String::new(),
    }
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Num(x) if x.is_finite() => json!(x),
        Cell::Num(_) | Cell::Missing => Value::Null,
        Cell::Int(i) => json!(i),
        Cell::Text(s) => json!(s),
    }
}

pub fn render(header: &Header, table: &Table, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::new();
            writeln!(
                out,
                "# rydcat {} {}",
                env!("CARGO_PKG_VERSION"),
                header.command
            )
            .unwrap();
            writeln!(out, "# config-sha256 {}", header.config_sha256).unwrap();
            for (name, sum) in &header.data_files {
                writeln!(out, "# data {name} sha256 {sum}").unwrap();
            }
            writeln!(out, "{}", table.columns.join(",")).unwrap();
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                writeln!(out, "{}", cells.join(",")).unwrap();
            }
            out
        }
        Format::Json => {
            let data: Vec<Value> = table
                .rows
                .iter()
                .map(|r| Value::Array(r.iter().map(json_cell).collect()))
                .collect();
            let files: serde_json::Map<String, Value> = header
                .data_files
                .iter()
                .map(|(n, s)| (n.clone(), json!(s)))
                .collect();
            let doc = json!({
                "header": {
                    "program": format!("rydcat {}", env!("CARGO_PKG_VERSION")),
                    "command": header.command,
                    "config_sha256": header.config_sha256,
                    "data_sha256": files,
                },
                "columns": table.columns,
                "rows": data,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("json");
            s.push('\n');
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Header, Table) {
        let mut t = Table::new(&["N", "w", "label", "exact"]);
        t.push(vec![
            20u64.into(),
            0.123456789012.into(),
            "a,b".into(),
            Cell::Missing,
        ]);
        let h = Header {
            command: "fnl-scan".into(),
            config_sha256: sha256_hex(b"{}"),
            data_files: vec![("c6.dat".into(), sha256_hex(b"x"))],
        };
        (h, t)
    }

    #[test]
    fn csv_layout() {
        let (h, t) = sample();
        let s = render(&h, &t, Format::Csv);
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# rydcat"));
        assert!(lines[1].starts_with("# config-sha256 44136fa3"));
        assert!(lines[2].starts_with("# data c6.dat sha256 2d711642"));
        assert_eq!(lines[3], "N,w,label,exact");
        assert_eq!(lines[4], "20,1.23456789e-1,\"a,b\",");
    }

    #[test]
    fn json_layout() {
        let (h, t) = sample();
        let v: Value = serde_json::from_str(&render(&h, &t, Format::Json)).unwrap();
        assert_eq!(v["columns"][1], "w");
        assert_eq!(v["rows"][0][0], 20);
        assert!(v["rows"][0][3].is_null());
        assert_eq!(v["header"]["command"], "fnl-scan");
    }
}
