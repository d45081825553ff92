//! Self-describing output: a parameter echo, optional summary values, then named rows.

use std::io::Write;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Missing,
}

impl Value {
    fn cell(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Float(v) => v.to_string(),
            Value::Text(v) => v.clone(),
            Value::Bool(v) => v.to_string(),
            Value::Missing => String::new(),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_owned())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultRecord {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub params: Vec<(String, Value)>,
    pub summary: Vec<(String, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// Only in JSON; CSV stays byte-identical across runs.
    pub wall_time_s: Option<f64>,
}

impl ResultRecord {
    pub fn new(subcommand: &'static str, columns: &[&'static str]) -> Self {
        Self {
            tool: "rcf",
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            params: Vec::new(),
            summary: Vec::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            wall_time_s: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.push((key.to_owned(), value.into()));
        self
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.summary.push((key.to_owned(), value.into()));
        self
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# {} {}", self.tool, self.version)?;
        writeln!(out, "# subcommand: {}", self.subcommand)?;
        for (k, v) in &self.params {
            writeln!(out, "# param {k}={}", v.cell())?;
        }
        for (k, v) in &self.summary {
            writeln!(out, "# summary {k}={}", v.cell())?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Value::cell))?;
        }
        w.flush()
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let obj = |pairs: &[(String, Value)]| {
            pairs
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::to_value(v).unwrap_or(serde_json::Value::Null)))
                .collect::<serde_json::Map<_, _>>()
        };
        let doc = serde_json::json!({
            "tool": self.tool,
            "version": self.version,
            "subcommand": self.subcommand,
            "params": obj(&self.params),
            "summary": obj(&self.summary),
            "wall_time_s": self.wall_time_s,
            "columns": self.columns,
            "rows": self.rows,
        });
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)
    }
}
