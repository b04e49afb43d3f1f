//! Output rendering. JSON is the canonical format; CSV and the pretty
//! printer are pure functions of the JSON value, never of the computation
//! that produced it.

use std::cmp::Ordering;

use cumulant_poly::error::{Error, Result};
use serde_json::{Map, Value};

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

pub fn render(format: Format, value: &Value) -> Result<String> {
    match format {
        Format::Json => {
            serde_json::to_string(value).map_err(|e| Error::Parse(e.to_string()))
        }
        Format::Csv => to_csv(value),
        Format::Pretty => Ok(pretty(value)),
    }
}

fn scalar_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Splits an "i1,i2,..." key into numbers for ordering.
fn parse_index_key(key: &str) -> Vec<i64> {
    key.split(',')
        .map(|p| p.trim().parse::<i64>().unwrap_or(0))
        .collect()
}

fn graded_key_order(a: &str, b: &str) -> Ordering {
    let (ka, kb) = (parse_index_key(a), parse_index_key(b));
    let (ta, tb) = (ka.iter().sum::<i64>(), kb.iter().sum::<i64>());
    ta.cmp(&tb).then_with(|| ka.cmp(&kb))
}

fn sorted_index_map(map: &Map<String, Value>) -> Vec<(&String, &Value)> {
    let mut rows: Vec<(&String, &Value)> = map.iter().collect();
    rows.sort_by(|(a, _), (b, _)| graded_key_order(a, b));
    rows
}

fn write_rows(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(header)
        .map_err(|e| Error::Parse(e.to_string()))?;
    for row in rows {
        writer
            .write_record(&row)
            .map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// One row per multi-index for table-shaped documents; generic key/value
/// rows otherwise.
fn to_csv(value: &Value) -> Result<String> {
    if let Some(obj) = value.as_object() {
        if let Some(entries) = obj.get("entries").and_then(Value::as_object) {
            let rows = sorted_index_map(entries)
                .into_iter()
                .map(|(k, v)| vec![k.clone(), scalar_cell(v)])
                .collect();
            return write_rows(&["index", "value"], rows);
        }
        if let Some(coeffs) = obj.get("coeffs").and_then(Value::as_object) {
            let rows = sorted_index_map(coeffs)
                .into_iter()
                .map(|(k, v)| vec![k.clone(), scalar_cell(v)])
                .collect();
            return write_rows(&["index", "coefficient"], rows);
        }
        if let Some(terms) = obj.get("terms").and_then(Value::as_object) {
            let rows = sorted_index_map(terms)
                .into_iter()
                .map(|(k, v)| vec![k.clone(), scalar_cell(v)])
                .collect();
            return write_rows(&["exponents", "coefficient"], rows);
        }
        if let Some(results) = obj.get("results").and_then(Value::as_array) {
            let rows = results
                .iter()
                .filter_map(Value::as_object)
                .map(|r| {
                    ["index", "symbolic", "estimate", "se", "pass"]
                        .iter()
                        .map(|k| r.get(*k).map(scalar_cell).unwrap_or_default())
                        .collect()
                })
                .collect();
            return write_rows(&["index", "symbolic", "estimate", "se", "pass"], rows);
        }
        if let (Some(n), Some(moments)) = (obj.get("n"), obj.get("moments").and_then(Value::as_array)) {
            let rows = moments
                .iter()
                .enumerate()
                .map(|(k, v)| vec![(k + 1).to_string(), scalar_cell(v), scalar_cell(n)])
                .collect();
            return write_rows(&["order", "moment", "n"], rows);
        }
        if let Some(parts) = obj.get("partitions").and_then(Value::as_array) {
            let rows = parts
                .iter()
                .filter_map(Value::as_object)
                .map(|p| {
                    vec![
                        p.get("columns")
                            .map(|c| serde_json::to_string(c).unwrap_or_default())
                            .unwrap_or_default(),
                        p.get("length").map(scalar_cell).unwrap_or_default(),
                        p.get("coefficient").map(scalar_cell).unwrap_or_default(),
                    ]
                })
                .collect();
            return write_rows(&["columns", "length", "coefficient"], rows);
        }
        // Generic fallback: top-level key/value pairs.
        let rows = obj
            .iter()
            .map(|(k, v)| vec![k.clone(), scalar_cell(v)])
            .collect();
        return write_rows(&["key", "value"], rows);
    }
    Err(Error::Parse("csv output needs an object document".into()))
}

/// Renders a polynomial document {vars, terms} as a readable sum, highest
/// graded-lexicographic monomial first.
fn poly_string(vars: &[String], terms: &Map<String, Value>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut rows = sorted_index_map(terms);
    rows.reverse();
    let mut out = String::new();
    for (key, coeff) in rows {
        let coeff = scalar_cell(coeff);
        let negative = coeff.starts_with('-');
        let magnitude = coeff.trim_start_matches('-');
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else if negative {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let exps = parse_index_key(key);
        let mut factors: Vec<String> = Vec::new();
        if magnitude != "1" || exps.iter().all(|&e| e == 0) {
            factors.push(magnitude.to_string());
        }
        for (name, &e) in vars.iter().zip(&exps) {
            match e {
                0 => {}
                1 => factors.push(name.clone()),
                _ => factors.push(format!("{name}^{e}")),
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

/// Human-readable rendering, derived from the JSON document only.
pub fn pretty(value: &Value) -> String {
    if let Some(obj) = value.as_object() {
        if let (Some(vars), Some(terms)) = (
            obj.get("vars").and_then(Value::as_array),
            obj.get("terms").and_then(Value::as_object),
        ) {
            let vars: Vec<String> = vars
                .iter()
                .map(|v| v.as_str().unwrap_or_default().to_string())
                .collect();
            let mut head = String::new();
            if let Some(index) = obj.get("index") {
                head = format!("[{}]  ", scalar_cell(index));
            }
            return format!("{head}{}", poly_string(&vars, terms));
        }
        if let Some(entries) = obj.get("entries").and_then(Value::as_object) {
            let kind = obj.get("kind").map(scalar_cell).unwrap_or_default();
            let mut lines = vec![format!(
                "{} table, d={}, order {}",
                kind,
                obj.get("d").map(scalar_cell).unwrap_or_default(),
                obj.get("order").map(scalar_cell).unwrap_or_default()
            )];
            for (k, v) in sorted_index_map(entries) {
                lines.push(format!("  [{k}]  {}", scalar_cell(v)));
            }
            return lines.join("\n");
        }
        if let Some(coeffs) = obj.get("coeffs").and_then(Value::as_object) {
            let mut lines = vec![format!(
                "series, d={}, order {}",
                obj.get("d").map(scalar_cell).unwrap_or_default(),
                obj.get("order").map(scalar_cell).unwrap_or_default()
            )];
            for (k, v) in sorted_index_map(coeffs) {
                lines.push(format!("  [{k}]  {}", scalar_cell(v)));
            }
            return lines.join("\n");
        }
        if let Some(results) = obj.get("results").and_then(Value::as_array) {
            let mut lines = vec![format!(
                "validation at k={}, all_pass={}",
                obj.get("k").map(scalar_cell).unwrap_or_default(),
                obj.get("all_pass").map(scalar_cell).unwrap_or_default()
            )];
            for r in results.iter().filter_map(Value::as_object) {
                lines.push(format!(
                    "  [{}]  symbolic {}  estimate {}  se {}  {}",
                    r.get("index").map(scalar_cell).unwrap_or_default(),
                    r.get("symbolic").map(scalar_cell).unwrap_or_default(),
                    r.get("estimate").map(scalar_cell).unwrap_or_default(),
                    r.get("se").map(scalar_cell).unwrap_or_default(),
                    if r.get("pass").and_then(Value::as_bool).unwrap_or(false) {
                        "PASS"
                    } else {
                        "FAIL"
                    }
                ));
            }
            return lines.join("\n");
        }
        if let Some(parts) = obj.get("partitions").and_then(Value::as_array) {
            let mut lines = vec![format!(
                "{} partitions of ({})",
                parts.len(),
                obj.get("index").map(scalar_cell).unwrap_or_default()
            )];
            for p in parts.iter().filter_map(Value::as_object) {
                let cols = p
                    .get("columns")
                    .and_then(Value::as_array)
                    .map(|cols| {
                        cols.iter()
                            .filter_map(Value::as_array)
                            .map(|pair| {
                                let col = pair.first().map(scalar_cell).unwrap_or_default();
                                let mult = pair.get(1).map(scalar_cell).unwrap_or_default();
                                if mult == "1" {
                                    format!("({col})")
                                } else {
                                    format!("({col})^{mult}")
                                }
                            })
                            .collect::<Vec<_>>()
                            .join(", ")
                    })
                    .unwrap_or_default();
                lines.push(format!(
                    "  {{{cols}}}  length {}  coefficient {}",
                    p.get("length").map(scalar_cell).unwrap_or_default(),
                    p.get("coefficient").map(scalar_cell).unwrap_or_default()
                ));
            }
            return lines.join("\n");
        }
        if let Some(polys) = obj.get("polynomials").and_then(Value::as_array) {
            return polys
                .iter()
                .enumerate()
                .map(|(k, p)| format!("e_{k} = {}", pretty(p)))
                .collect::<Vec<_>>()
                .join("\n");
        }
    }
    serde_json::to_string_pretty(value).unwrap_or_else(|_| value.to_string())
}
