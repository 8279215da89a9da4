//! Output formatting: 12-significant-digit rounding, the JSON metadata
//! envelope, and the CSV dialect (header row, comma delimiter, no quoting,
//! newline-terminated records).

use crate::config::{FileConfig, GridCfg};
use serde_json::{json, Value};

/// Rounds to 12 significant digits.  Applied to every float the tool
/// prints, in both formats, so JSON and CSV agree byte-for-byte on values.
pub fn sig12(x: f64) -> f64 {
    format!("{x:.11e}")
        .parse()
        .expect("rounded float re-parses")
}

/// CSV cell for a float: the 12-significant-digit value in the shortest
/// decimal form that round-trips, rendered exactly as the JSON format
/// renders it (scientific notation for extreme exponents).
pub fn cell(x: f64) -> String {
    match serde_json::Number::from_f64(sig12(x)) {
        Some(n) => n.to_string(),
        None => x.to_string(),
    }
}

/// Walks a JSON tree and rounds every non-integer number in place.
fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if !(n.is_i64() || n.is_u64()) {
                if let Some(x) = n.as_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(sig12(x)) {
                        *value = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn csv_table(header: &str, rows: Vec<String>) -> String {
    let mut out = String::with_capacity(header.len() + rows.len() * 32);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// The JSON document: a metadata block (tool version, run parameters, the
/// tolerances in force, and the parsed config echoed back) plus the result.
/// No timestamps, so identical runs emit identical bytes.
pub fn json_envelope(
    command: &str,
    seed: Option<u64>,
    grid: Option<GridCfg>,
    config: &FileConfig,
    result: Value,
) -> String {
    let mut doc = json!({
        "metadata": {
            "tool": "orgnet",
            "tool_version": env!("CARGO_PKG_VERSION"),
            "run": {
                "command": command,
                "format": "json",
                "seed": seed,
                "grid": grid,
            },
            "tolerances": {
                "fixed_point_tol": orgnet::reliability::FIXED_POINT_TOL,
                "zero_floor": orgnet::reliability::ZERO_FLOOR,
                "blowup_cap": orgnet::reliability::BLOWUP_CAP,
                "threshold_tol": orgnet::selection::THRESHOLD_TOL,
                "deviation_tol": orgnet::equilibrium::DEVIATION_TOL,
            },
            "config": serde_json::to_value(config).expect("config serializes"),
        },
        "result": result,
    });
    round_floats(&mut doc);
    let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
    text.push('\n');
    text
}
