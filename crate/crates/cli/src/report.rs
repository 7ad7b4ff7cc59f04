use latfree::norm::{FunctionalTuple, NormCertificate};
use latfree::rational::fmt_rational;
use latfree::{Rational, RealValue};
use serde_json::{json, Map, Value};

pub fn q(v: &Rational) -> Value {
    Value::String(fmt_rational(v))
}

pub fn vector(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(q).collect())
}

pub fn vectors(vs: &[Vec<Rational>]) -> Value {
    Value::Array(vs.iter().map(|v| vector(v)).collect())
}

pub fn tuple(t: &FunctionalTuple) -> Value {
    vectors(t.points())
}

/// Exact values as `p/q`, square roots as `sqrt(p/q)`, floats with a `~`.
pub fn real(v: &RealValue) -> Value {
    Value::String(v.describe())
}

pub fn certificate(c: &NormCertificate) -> Value {
    let method = match c.upper_method {
        latfree::norm::UpperMethod::ExactMatch => "exact_polyhedral",
        latfree::norm::UpperMethod::StrongUnit => "sandwich",
    };
    json!({
        "lower": q(&c.lower),
        "upper": q(&c.upper),
        "exact": c.exact,
        "witness": tuple(&c.witness),
        "method": method,
        "upper_method": c.upper_method.to_string(),
        "lambda": q(&c.lambda),
        "unit_support": c.unit_support,
        "unit_norm_sum": q(&c.unit_norm_sum),
        "k_used": c.witness.len(),
        "k_max": c.k_max,
        "cells": c.cells,
    })
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// Two-column `key  value` listing with dotted keys for nested objects.
pub fn render_table(v: &Value) -> String {
    if let Some(rows) = v.get("criteria").and_then(Value::as_array) {
        return render_criteria(v, rows);
    }
    let mut lines: Vec<(String, String)> = Vec::new();
    flatten("", v, &mut lines);
    let width = lines.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, val) in lines {
        out.push_str(&format!("{k:<width$}  {val}\n"));
    }
    out
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, val, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), compact(other))),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(compact).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn render_criteria(v: &Value, rows: &[Value]) -> String {
    let mut out = String::new();
    for row in rows {
        let id = row.get("id").and_then(Value::as_u64).unwrap_or(0);
        let passed = row.get("passed").and_then(Value::as_bool).unwrap_or(false);
        let name = row.get("name").and_then(Value::as_str).unwrap_or("");
        let detail = row.get("detail").and_then(Value::as_str).unwrap_or("");
        let mut line = format!("{id:>2}  {}  {name:<28}  {detail}", if passed { "PASS" } else { "FAIL" });
        if let Some(ms) = row.get("elapsed_ms").and_then(Value::as_f64) {
            line.push_str(&format!("  ({ms:.0} ms)"));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    let all = v.get("passed").and_then(Value::as_bool).unwrap_or(false);
    out.push_str(if all { "all criteria passed\n" } else { "some criteria failed\n" });
    out
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (k, v) in pairs {
        map.insert(k.to_string(), v);
    }
    Value::Object(map)
}
