use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// Output of one command: a config echo, a table, optional family blocks,
/// a structured payload and the assertions evaluated along the way.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub config: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Named text blocks such as witness families.
    pub blocks: Vec<(String, String)>,
    pub data: Value,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Report {
            command: command.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            data: Value::Null,
            ..Default::default()
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn passed(&self) -> usize {
        self.checks.len() - self.failed()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Tsv => self.render_tsv(),
            Format::Json => serde_json::to_string_pretty(&self.to_json()).expect("report serializes") + "\n",
        }
    }

    fn render_tsv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# permint {} {}", env!("CARGO_PKG_VERSION"), self.command).unwrap();
        for (k, v) in &self.config {
            writeln!(out, "# {k}={v}").unwrap();
        }
        if !self.columns.is_empty() {
            writeln!(out, "{}", self.columns.join("\t")).unwrap();
        }
        for r in &self.rows {
            writeln!(out, "{}", r.join("\t")).unwrap();
        }
        for (name, body) in &self.blocks {
            writeln!(out, "[{name}]").unwrap();
            out.push_str(body);
            if !body.ends_with('\n') {
                out.push('\n');
            }
        }
        for c in self.checks.iter().filter(|c| !c.passed) {
            writeln!(out, "# FAILED {}: {}", c.name, c.detail).unwrap();
        }
        writeln!(out, "# assertions passed={} failed={}", self.passed(), self.failed()).unwrap();
        out
    }

    pub fn to_json(&self) -> Value {
        let config: Map<String, Value> = self.config.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(|c| Value::String(c.clone()))).collect()))
            .collect();
        let blocks: Map<String, Value> = self.blocks.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        json!({
            "tool": format!("permint {}", env!("CARGO_PKG_VERSION")),
            "command": self.command,
            "config": config,
            "rows": rows,
            "blocks": blocks,
            "data": self.data,
            "assertions": {
                "passed": self.passed(),
                "failed": self.failed(),
                "checks": self.checks,
            },
        })
    }
}
