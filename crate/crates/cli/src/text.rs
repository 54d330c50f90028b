//! Plain-text rendering of JSON reports.

use serde_json::Value;

fn is_term(v: &Value) -> bool {
    v.get("indices").is_some() && v.get("coeff").is_some()
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn poly_text(monos: &[Value]) -> String {
    let parts: Vec<String> = monos
        .iter()
        .map(|m| {
            let c = scalar(&m["coeff"]);
            let vars: Vec<String> = m["monomial"]
                .as_array()
                .map(|e| {
                    e.iter()
                        .enumerate()
                        .filter_map(|(i, k)| match k.as_u64() {
                            Some(0) | None => None,
                            Some(1) => Some(format!("x{}", i + 1)),
                            Some(k) => Some(format!("x{}^{k}", i + 1)),
                        })
                        .collect()
                })
                .unwrap_or_default();
            if vars.is_empty() {
                c
            } else {
                format!("{c}*{}", vars.join("*"))
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn term_text(t: &Value) -> String {
    let idx: Vec<String> = t["indices"].as_array().map(|a| a.iter().map(scalar).collect()).unwrap_or_default();
    let coeff = match &t["coeff"] {
        Value::Array(monos) => format!("({})", poly_text(monos)),
        other => scalar(other),
    };
    if idx.is_empty() {
        coeff
    } else {
        format!("{coeff}·{}", idx.join("∧"))
    }
}

fn walk(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                walk(&p, x, out);
            }
        }
        Value::Array(a) if !a.is_empty() && a.iter().all(is_term) => {
            let terms: Vec<String> = a.iter().map(term_text).collect();
            out.push(format!("{prefix}: {}", terms.join(" + ")));
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            out.push(format!("{prefix}: [{}]", items.join(", ")));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                walk(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => out.push(format!("{prefix}: {}", scalar(other))),
    }
}

pub fn render(report: &Value) -> String {
    let mut out = vec![format!("tmtool {}: {}", scalar(&report["command"]), scalar(&report["status"]))];
    walk("", report, &mut out);
    let mut s = out.join("\n");
    s.push('\n');
    s
}
