//! Ordered key/value reports in three renderings.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `key=value` lines.
    Structured,
    /// Aligned `key: value` lines.
    Text,
    /// One JSON object.
    Json,
}

#[derive(Debug, Default)]
pub struct Report {
    fields: Vec<(String, Value)>,
    pub pass: bool,
}

impl Report {
    pub fn new() -> Self {
        Self {
            fields: Vec::new(),
            pass: true,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        let value = value.into();
        match self.fields.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.fields.push((key.to_string(), value)),
        }
        self
    }

    /// Records a boolean outcome that the exit status depends on.
    pub fn check(&mut self, key: &str, ok: bool) -> &mut Self {
        self.pass &= ok;
        self.set(key, ok)
    }

    pub fn render(&self, format: Format) -> String {
        let plain = |v: &Value| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let mut out = String::new();
        match format {
            Format::Structured => {
                for (k, v) in &self.fields {
                    writeln!(out, "{k}={}", plain(v)).unwrap();
                }
                writeln!(out, "pass={}", self.pass).unwrap();
            }
            Format::Text => {
                let width = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(4).max(4);
                for (k, v) in &self.fields {
                    writeln!(out, "{k:<width$}  {}", plain(v)).unwrap();
                }
                writeln!(out, "{:<width$}  {}", "pass", if self.pass { "yes" } else { "no" }).unwrap();
            }
            Format::Json => {
                let mut map = Map::new();
                for (k, v) in &self.fields {
                    map.insert(k.clone(), v.clone());
                }
                map.insert("pass".into(), Value::Bool(self.pass));
                out = serde_json::to_string_pretty(&Value::Object(map)).unwrap();
                out.push('\n');
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renderings_keep_order() {
        let mut r = Report::new();
        r.set("function", "and_2").set("k", 2).check("valid", true);
        assert_eq!(r.render(Format::Structured), "function=and_2\nk=2\nvalid=true\npass=true\n");
        let j: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(j["k"], 2);
        r.check("bound_ok", false);
        assert!(!r.pass);
        assert!(r.render(Format::Text).ends_with("pass      no\n"));
    }
}
