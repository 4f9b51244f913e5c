//! The versioned report format shared by every experiment.
//!
//! Reports serialize with sorted object keys and contain no wall-clock data
//! unless timings were requested, so equal configurations give byte-identical
//! JSON.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "bernstein";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// A numeric table; the CSV output is the concatenation of all tables.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: BTreeMap<String, Value>,
    pub pass: bool,
    pub assertions: Vec<Assertion>,
    pub results: BTreeMap<String, Value>,
    pub tables: Vec<Table>,
    /// The first failing assertion's offending data, in full.
    pub counterexample: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: BTreeMap::new(),
            pass: true,
            assertions: Vec::new(),
            results: BTreeMap::new(),
            tables: Vec::new(),
            counterexample: None,
            timings_ms: None,
        }
    }

    pub fn config(&mut self, key: &str, value: impl Serialize) {
        self.config.insert(key.into(), to_value(value));
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.into(), to_value(value));
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) -> bool {
        self.pass &= pass;
        self.assertions.push(Assertion {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
        pass
    }

    /// Like [`Report::check`], recording `counterexample` if this is the
    /// first failure.
    pub fn check_with(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>, counterexample: impl FnOnce() -> Value) -> bool {
        let name = name.into();
        if !pass && self.counterexample.is_none() {
            self.counterexample = Some(serde_json::json!({ "assertion": name, "data": counterexample() }));
        }
        self.check(name, pass, detail)
    }

    pub fn time(&mut self, key: &str, ms: f64) {
        if let Some(t) = self.timings_ms.as_mut() {
            t.insert(key.into(), ms);
        }
    }

    pub fn enable_timings(&mut self) {
        self.timings_ms.get_or_insert_with(BTreeMap::new);
    }

    /// Folds a sub-report into this one, prefixing assertion and table names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for a in other.assertions {
            self.check(format!("{prefix}/{}", a.name), a.pass, a.detail);
        }
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
        self.results.insert(prefix.into(), Value::Object(other.results.into_iter().collect()));
        for mut t in other.tables {
            t.name = format!("{prefix}/{}", t.name);
            self.tables.push(t);
        }
        if let (Some(mine), Some(theirs)) = (self.timings_ms.as_mut(), other.timings_ms) {
            for (k, v) in theirs {
                mine.insert(format!("{prefix}/{k}"), v);
            }
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// A human-readable summary: one line per assertion, then the results.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} — {}\n", self.tool, self.command, if self.pass { "PASS" } else { "FAIL" });
        for (k, v) in &self.config {
            out.push_str(&format!("  config {k} = {v}\n"));
        }
        for a in &self.assertions {
            out.push_str(&format!("  [{}] {}: {}\n", if a.pass { "pass" } else { "FAIL" }, a.name, a.detail));
        }
        for t in &self.tables {
            out.push_str(&format!("  table {} ({})\n", t.name, t.columns.join(", ")));
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(cell).collect();
                out.push_str(&format!("    {}\n", cells.join("\t")));
            }
        }
        if let Some(c) = &self.counterexample {
            out.push_str(&format!("  counterexample: {c}\n"));
        }
        out
    }
}

/// A table cell without JSON string quoting.
pub fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_check_records_first_counterexample() {
        let mut r = Report::new("demo");
        r.check("ok", true, "");
        r.check_with("bad", false, "x", || serde_json::json!([1, 2]));
        r.check_with("worse", false, "y", || serde_json::json!([3]));
        assert!(!r.pass);
        assert_eq!(r.counterexample.as_ref().unwrap()["assertion"], "bad");
    }

    #[test]
    fn timings_only_when_enabled() {
        let mut r = Report::new("demo");
        r.time("a", 1.0);
        assert!(!r.to_json().contains("timings_ms"));
        r.enable_timings();
        r.time("a", 1.0);
        assert!(r.to_json().contains("timings_ms"));
    }

    #[test]
    fn absorb_prefixes_names() {
        let mut outer = Report::new("all");
        let mut inner = Report::new("part");
        inner.check("c", true, "");
        inner.tables.push(Table::new("t", &["a"]));
        outer.absorb("part", inner);
        assert_eq!(outer.assertions[0].name, "part/c");
        assert_eq!(outer.tables[0].name, "part/t");
    }
}
