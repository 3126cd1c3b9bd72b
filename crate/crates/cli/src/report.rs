use std::path::Path;

use serde_json::{json, Map, Value};

use cardbound_core::bind::StatsSource;
use cardbound_core::bound::{BoundValue, Method};
use cardbound_core::rational::{fmt_decimal, fmt_q, Q};

use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

pub struct Entry {
    pub bound: BoundValue,
    pub micros: u128,
}

#[derive(Default)]
pub struct Report {
    pub entries: Vec<Entry>,
    pub warnings: Vec<String>,
}

fn source_name(s: &StatsSource) -> &'static str {
    match s {
        StatsSource::Degrees => "degrees",
        StatsSource::Staircase => "staircase",
        StatsSource::Wildcard => "wildcard",
    }
}

impl Report {
    pub fn warn(&mut self, msg: String) {
        eprintln!("warning: {msg}");
        self.warnings.push(msg);
    }

    pub fn get(&self, m: Method) -> Option<&Entry> {
        self.entries.iter().find(|e| e.bound.method == m)
    }

    pub fn print(&self, true_count: Option<&Q>) {
        for e in &self.entries {
            let b = &e.bound;
            let exact = fmt_q(&b.value);
            let mut line = format!("{:<5} {exact}", b.method.name());
            if !b.value.is_integer() {
                line.push_str(&format!(" (~{})", fmt_decimal(&b.value, 6)));
            }
            if let Some(r) = &b.root {
                line.push_str(&format!("  root={r}"));
            }
            line.push_str(&format!("  [{} us]", e.micros));
            println!("{line}");
        }
        if let Some(c) = true_count {
            println!("true  {}", fmt_q(c));
        }
    }

    pub fn to_json(&self, query: &str, true_count: Option<&Q>) -> Value {
        let mut bounds = Map::new();
        for e in &self.entries {
            let b = &e.bound;
            let b_eff: Map<String, Value> = b
                .b_effective
                .iter()
                .map(|(k, v)| (k.clone(), Value::String(v.to_string())))
                .collect();
            let sources: Map<String, Value> = b
                .sources
                .iter()
                .map(|(k, v)| {
                    (
                        k.clone(),
                        json!(v.iter().map(source_name).collect::<Vec<_>>()),
                    )
                })
                .collect();
            bounds.insert(
                b.method.name().to_string(),
                json!({
                    "value": fmt_q(&b.value),
                    "value_decimal": fmt_decimal(&b.value, 6),
                    "root": b.root,
                    "b_effective": b_eff,
                    "sources": sources,
                    "micros": e.micros as u64,
                }),
            );
        }
        let mut doc = json!({
            "schema_version": SCHEMA_VERSION,
            "query": query,
            "bounds": bounds,
            "warnings": self.warnings,
        });
        if let Some(c) = true_count {
            doc["true_count"] = Value::String(fmt_q(c));
        }
        doc
    }

    pub fn write_json(
        &self,
        path: &Path,
        query: &str,
        true_count: Option<&Q>,
    ) -> Result<(), Failure> {
        let text =
            serde_json::to_string_pretty(&self.to_json(query, true_count)).expect("serializable");
        std::fs::write(path, text + "\n").map_err(|e| Failure {
            code: 1,
            message: format!("{}: {e}", path.display()),
        })
    }
}
