//! Report assembly: JSON envelopes and the fixed-column CSV form.
//!
//! Extended reals are serialized as numbers when finite and as the string
//! `"inf"` otherwise (JSON has no infinity literal). The JSON envelope is
//! described by `docs/report.schema.json`.

use std::collections::BTreeMap;

use chandisc_core::complexity::BoundReport;
use chandisc_core::oracle::OracleResult;
use serde_json::{json, Value};

pub fn json_number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!("inf")
    }
}

pub fn bounds_to_json(report: &BoundReport) -> Value {
    let entries: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({
                "name": e.name,
                "direction": e.direction.name(),
                "value": json_number(e.value),
                "pre_ceiling": e.pre_ceiling.map(json_number),
                "applicable": e.applicable,
                "certified": e.certified,
                "reason": e.reason,
                "method": e.method,
            })
        })
        .collect();
    let divergences: BTreeMap<String, Value> = report
        .divergence_values
        .iter()
        .map(|(k, v)| (k.clone(), json_number(*v)))
        .collect();
    json!({
        "entries": entries,
        "best_lower": json_number(report.best_lower),
        "best_upper": json_number(report.best_upper),
        "divergences": divergences,
    })
}

pub fn oracle_to_json(result: &OracleResult) -> Value {
    json!({
        "n_star": result.n_star,
        "n_max_reached": result.n_max_reached,
        "witness_input": result.witness_input,
        "per_n_trace": result
            .per_n_trace
            .iter()
            .map(|(n, e)| json!([n, e]))
            .collect::<Vec<_>>(),
    })
}

/// Fixed CSV columns shared by all CSV outputs.
pub const CSV_HEADER: &str = "instance_id,bound_name,value,direction,method,applicable,reason";

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn bounds_to_csv_rows(instance_id: &str, report: &BoundReport) -> Vec<String> {
    report
        .entries
        .iter()
        .map(|e| {
            let value = if e.value.is_finite() {
                format!("{}", e.value)
            } else {
                "inf".to_string()
            };
            format!(
                "{},{},{},{},{},{},{}",
                csv_escape(instance_id),
                csv_escape(&e.name),
                value,
                e.direction.name(),
                csv_escape(&e.method),
                e.applicable,
                csv_escape(e.reason.as_deref().unwrap_or(""))
            )
        })
        .collect()
}

/// Envelope shared by every command's JSON report.
pub struct Envelope {
    pub command: String,
    pub seed: u64,
    pub inputs: Value,
    pub body: Value,
    pub timings_ms: Vec<(String, f64)>,
    pub with_timestamp: bool,
}

impl Envelope {
    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("command".into(), json!(self.command));
        obj.insert("seed".into(), json!(self.seed));
        if self.with_timestamp {
            obj.insert("timestamp".into(), json!(chrono::Utc::now().to_rfc3339()));
            let timings: BTreeMap<String, f64> = self
                .timings_ms
                .iter()
                .map(|(k, v)| (k.clone(), *v))
                .collect();
            obj.insert("timings_ms".into(), json!(timings));
        }
        obj.insert("inputs".into(), self.inputs.clone());
        obj.insert("report".into(), self.body.clone());
        Value::Object(obj)
    }
}
