//! Tabular reports rendered as aligned text, JSON or CSV.

use crate::config::OutputFormat;
use serde_json::{Map, Value};
use zeta_asym_core::numeric::{to_decimal_digits, HpReal};

/// Significant digits printed for reported values.
pub const VALUE_DIGITS: usize = 30;
/// Significant digits printed for residuals and error bounds.
pub const RESIDUAL_DIGITS: usize = 6;

pub fn value(x: &HpReal) -> String {
    to_decimal_digits(x, VALUE_DIGITS)
}

pub fn residual(x: &HpReal) -> String {
    to_decimal_digits(x, RESIDUAL_DIGITS)
}

pub fn flag(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.to_string()
}

/// Result of one command: a table plus summary entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub passed: bool,
    pub config: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Report {
            command: command.to_string(),
            passed: true,
            config: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<String>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.to_text(),
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    pub fn to_json_value(&self) -> Value {
        let obj = |pairs: &[(String, String)]| {
            Value::Object(
                pairs
                    .iter()
                    .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                    .collect::<Map<_, _>>(),
            )
        };
        let rows = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| (c.clone(), Value::String(v.clone())))
                        .collect(),
                )
            })
            .collect();
        let mut top = Map::new();
        top.insert("command".into(), Value::String(self.command.clone()));
        top.insert("passed".into(), Value::Bool(self.passed));
        top.insert("config".into(), obj(&self.config));
        top.insert(
            "columns".into(),
            Value::Array(self.columns.iter().cloned().map(Value::String).collect()),
        );
        top.insert("rows".into(), Value::Array(rows));
        top.insert("summary".into(), obj(&self.summary));
        Value::Object(top)
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("== {} ==\n", self.command);
        if !self.config.is_empty() {
            let cfg: Vec<String> = self
                .config
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            out.push_str(&format!("config: {}\n", cfg.join(" ")));
        }
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| {
                self.rows
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain(std::iter::once(self.columns[i].chars().count()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            format!("{}\n", padded.join("  ").trim_end())
        };
        out.push_str(&line(&self.columns));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("{k}: {v}\n"));
        }
        out.push_str(&format!(
            "status: {}\n",
            if self.passed { "PASS" } else { "FAIL" }
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", &["order", "value"]);
        r.config.push(("precision".into(), "256".into()));
        r.push_row(vec!["2".into(), "1.5, approx".into()]);
        r.note("path", "closed-form");
        r
    }

    #[test]
    fn json_is_sorted_and_round_trips() {
        let s = sample().to_json();
        let keys: Vec<usize> = ["columns", "command", "config", "passed", "rows", "summary"]
            .iter()
            .map(|k| s.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        let v: Value = serde_json::from_str(&s).unwrap();
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(again, s);
    }

    #[test]
    fn csv_quotes_fields() {
        assert_eq!(sample().to_csv(), "order,value\n2,\"1.5, approx\"\n");
    }

    #[test]
    fn text_has_status() {
        let t = sample().to_text();
        assert!(t.contains("order  value"));
        assert!(t.ends_with("status: PASS\n"));
    }
}
