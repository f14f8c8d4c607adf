//! Report assembly and rendering.
//!
//! Every command produces one JSON value plus an exit code. JSON printing
//! is the machine interface and is byte-deterministic for identical
//! inputs, configuration, and seed; the text format is a rendering of the
//! same tree and carries no extra information.

use colombeau::{Tri, Valuation, ValuationEstimate, Witnessed};
use serde_json::{json, Value};

use crate::config::Format;

/// Exit codes: 0 for decided results, 1 for errors, 2 for Undecidable.
pub const EXIT_DECIDED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNDECIDABLE: i32 = 2;

/// A finished command: the report tree and the process exit code.
pub struct Rendered {
    pub json: Value,
    pub exit: i32,
}

impl Rendered {
    pub fn decided(json: Value) -> Rendered {
        Rendered { json, exit: EXIT_DECIDED }
    }
}

pub fn tri_str(t: Tri) -> &'static str {
    match t {
        Tri::True => "true",
        Tri::False => "false",
        Tri::Undecidable => "undecidable",
    }
}

pub fn tri_exit(t: Tri) -> i32 {
    match t {
        Tri::Undecidable => EXIT_UNDECIDABLE,
        _ => EXIT_DECIDED,
    }
}

pub fn tri_json(t: Tri) -> Value {
    Value::String(tri_str(t).to_owned())
}

pub fn witnessed_json(w: &Witnessed) -> Value {
    json!({ "decision": tri_str(w.decision), "witness": w.witness })
}

pub fn valuation_json(est: &ValuationEstimate) -> Value {
    let value = match est.value {
        Valuation::Finite(v) => json!(v),
        Valuation::PlusInfinity => json!("infinity"),
    };
    json!({
        "valuation": value,
        "residual": est.residual,
        "reliable": est.reliable,
    })
}

/// Prints a report in the requested format. Write errors (for example a
/// closed pipe) are ignored: the report is the only output.
pub fn print(report: &Value, format: Format) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    let _ = match format {
        Format::Json => writeln!(stdout, "{}", serde_json::to_string_pretty(report).unwrap()),
        Format::Text => {
            let mut out = String::new();
            render_text(report, 0, &mut out);
            write!(stdout, "{out}")
        }
    };
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(val, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar_text(val))),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(item, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}- {}\n", scalar_text(item))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar_text(v))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_rendering_walks_the_tree() {
        let v = json!({"a": 1, "b": {"c": [1, 2], "d": "x"}});
        let mut out = String::new();
        render_text(&v, 0, &mut out);
        assert_eq!(out, "a: 1\nb:\n  c:\n    - 1\n    - 2\n  d: x\n");
    }
}
