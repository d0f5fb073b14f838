use anyhow::{Context, Result};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;

pub const CONVENTION: &str = "f = -ln Z / V; V = 2(MN+NK+MK) finite, MN unbounded/sliced; \
     f ~ f0 + f1 eps + f2 eps^2 ln eps + f3 eps^2; finite f2 = -1/(24(ab+bc+ca)), unbounded f2 = -1/(12ab)";

/// A table with metadata, rendered as commented CSV or JSON.
pub struct Report {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            meta: vec![
                ("version".into(), format!("hexdimer {}", env!("CARGO_PKG_VERSION"))),
                ("command".into(), command.into()),
                ("convention".into(), CONVENTION.into()),
            ],
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.meta.push((key.into(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn cell(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            other => other.to_string(),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Self::cell))?;
        }
        out.push_str(std::str::from_utf8(&w.into_inner()?)?);
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> =
                    self.columns.iter().cloned().zip(r.iter().cloned()).collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&json!({ "meta": meta, "rows": rows }))?;
        s.push('\n');
        Ok(s)
    }

    pub fn emit(&self, as_json: bool, out: Option<&Path>) -> Result<()> {
        let text = if as_json { self.to_json()? } else { self.to_csv()? };
        match out {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}
