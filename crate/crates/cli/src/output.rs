//! Tables rendered as CSV with `#` metadata lines, or as JSON.

use std::str::FromStr;

use serde_json::{json, Value};

use ratdyn_core::Exact;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Config(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Bool(bool),
    Str(String),
    Empty,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // i128 is outside serde_json's default number range
            Cell::Int(v) => i64::try_from(*v).map_or_else(|_| Value::String(v.to_string()), Value::from),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Str(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
int_cell!(u8, u32, u64, usize, i8, i32, i64, i128);

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Str(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Str(v.into())
    }
}

impl From<&Exact> for Cell {
    fn from(v: &Exact) -> Self {
        Cell::Str(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `key: value` lines after the standard header block.
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.into(), value.to_string()));
    }
}

/// `cells![a, b, c]` converts each entry into a [`Cell`].
#[macro_export]
macro_rules! cells {
    ($($e:expr),* $(,)?) => { vec![$($crate::output::Cell::from($e)),*] };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub experiment: String,
    pub seed: u64,
}

pub fn render(meta: &Meta, table: &Table, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => csv_bytes(meta, table),
        Format::Json => json_bytes(meta, table),
    }
}

fn csv_bytes(meta: &Meta, table: &Table) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    let mut header = vec![
        ("tool".to_string(), format!("{} {}", meta.tool, meta.version)),
        ("config_sha256".to_string(), meta.config_sha256.clone()),
        ("experiment".to_string(), meta.experiment.clone()),
        ("seed".to_string(), meta.seed.to_string()),
    ];
    header.extend(table.notes.iter().cloned());
    for (k, v) in header {
        out.extend_from_slice(format!("# {k}: {}\n", v.replace('\n', " ")).as_bytes());
    }
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(&table.columns).map_err(err)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::text)).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Output(e.to_string()))
}

fn json_bytes(meta: &Meta, table: &Table) -> Result<Vec<u8>, CliError> {
    let notes: serde_json::Map<String, Value> =
        table.notes.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    let rows: Vec<Value> = table.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
    let doc = json!({
        "meta": {
            "tool": meta.tool,
            "version": meta.version,
            "config_sha256": meta.config_sha256,
            "experiment": meta.experiment,
            "seed": meta.seed,
        },
        "notes": notes,
        "columns": table.columns,
        "rows": rows,
    });
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Output(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Meta {
        Meta {
            tool: "ratdyn".into(),
            version: "0.0.0".into(),
            config_sha256: "ab".into(),
            experiment: "density.x".into(),
            seed: 7,
        }
    }

    #[test]
    fn csv_has_comment_header_then_records() {
        let mut t = Table::new(&["a", "b"]);
        t.push(cells![1u64, 0.5]);
        t.push(cells!["x,y", None::<f64>]);
        t.note("flag", true);
        let s = String::from_utf8(render(&meta(), &t, Format::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# tool: ratdyn 0.0.0");
        assert_eq!(lines[4], "# flag: true");
        assert_eq!(&lines[5..], ["a,b", "1,0.5", "\"x,y\","]);
    }

    #[test]
    fn json_mirrors_rows() {
        let mut t = Table::new(&["v"]);
        t.push(cells![f64::NAN]);
        t.push(cells![i128::MAX]);
        let v: Value = serde_json::from_slice(&render(&meta(), &t, Format::Json).unwrap()).unwrap();
        assert_eq!(v["meta"]["seed"], 7);
        assert_eq!(v["rows"][0][0], Value::Null);
        assert_eq!(v["rows"][1][0], Value::String(i128::MAX.to_string()));
    }
}
