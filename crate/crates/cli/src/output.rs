use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use gw_core::Weight;
use serde_json::Value;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(gw_core::Error),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(gw_core::Error::CapExceeded { .. }) => 3,
            CliError::Core(gw_core::Error::NotGeneric(_)) => 4,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A command result: the JSON document, its CSV table, and whether every
/// check passed.
pub struct Output {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub pass: bool,
}

impl Output {
    pub fn weight(w: &Weight) -> Self {
        Self::weights(&[(None, w)], serde_json::to_value(w.to_json()).expect("weight json"))
    }

    /// One CSV row per flag; `tag` becomes a leading column when present.
    pub fn weights(ws: &[(Option<String>, &Weight)], json: Value) -> Self {
        let tagged = ws.iter().any(|(t, _)| t.is_some());
        let mut header = vec!["flag".to_string(), "value".to_string()];
        if tagged {
            header.insert(0, "k".to_string());
        }
        let mut rows = Vec::new();
        for (tag, w) in ws {
            for (f, v) in w.flags().iter().zip(w.values()) {
                let mut row = vec![serde_json::to_string(&f.to_json()).expect("flag json"), v.to_string()];
                if tagged {
                    row.insert(0, tag.clone().unwrap_or_default());
                }
                rows.push(row);
            }
        }
        Self { json, header, rows, pass: true }
    }

    /// Top-level fields as `field,value` rows; nested values stay JSON.
    pub fn report(json: Value, pass: bool) -> Self {
        let rows = match &json {
            Value::Object(map) => map.iter().map(|(k, v)| vec![k.clone(), scalar(v)]).collect(),
            other => vec![vec!["value".to_string(), scalar(other)]],
        };
        Self { json, header: vec!["field".into(), "value".into()], rows, pass }
    }

    /// One row per element of `items`, columns from the first item's keys.
    pub fn table(json: Value, items: &[Value], pass: bool) -> Self {
        let header: Vec<String> = match items.first() {
            Some(Value::Object(m)) => m.keys().cloned().collect(),
            _ => vec!["value".into()],
        };
        let rows = items
            .iter()
            .map(|it| match it {
                Value::Object(m) => header.iter().map(|h| m.get(h).map(scalar).unwrap_or_default()).collect(),
                other => vec![scalar(other)],
            })
            .collect();
        Self { json, header, rows, pass }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> CliResult<bool> {
        let mut bytes = Vec::new();
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut bytes, &self.json).map_err(|e| CliError::Io(e.to_string()))?;
                bytes.push(b'\n');
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut bytes);
                let io = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(&self.header).map_err(io)?;
                for r in &self.rows {
                    w.write_record(r).map_err(io)?;
                }
                w.flush().map_err(|e| CliError::Io(e.to_string()))?;
            }
        }
        match out {
            Some(p) => std::fs::write(p, &bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
            None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::Io(e.to_string()))?,
        }
        Ok(self.pass)
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
