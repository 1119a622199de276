//! Payload assembly: 12 significant digits, no NaN, fixed CSV headers.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::RunConfig;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Rounds every float in `v`; non-finite floats become null.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .map(round_sig)
            .and_then(serde_json::Number::from_f64)
            .map_or(Value::Null, Value::Number),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect())
        }
        other => other,
    }
}

/// `serde_json::to_value` that maps ±∞ and NaN to null instead of failing.
pub fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).unwrap_or(Value::Null)
}

pub fn format_cell(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    let r = round_sig(x);
    let a = r.abs();
    if a == 0.0 || (1e-4..1e12).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub struct Table {
    pub header: &'static str,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &'static str) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::from(self.header);
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| quote(c)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

fn quote(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

/// What a command hands back before formatting.
pub struct Report {
    pub outputs: Value,
    pub tolerances: Map<String, Value>,
    pub table: Table,
}

pub fn payload(cfg: &RunConfig, report: &Report) -> Value {
    json!({
        "command": cfg.command.name(),
        "inputs": to_value(cfg),
        "outputs": round_value(report.outputs.clone()),
        "versions": {
            "conespec": env!("CARGO_PKG_VERSION"),
            "schema": 1,
        },
        "tolerances": round_value(Value::Object(report.tolerances.clone())),
    })
}
