//! Reports: the canonical JSON document every command emits. Canonical form
//! sorts object keys recursively and uses serde_json's shortest-round-trip
//! number formatting, so identical inputs give byte-identical output.

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub flags: Value,
    pub results: Value,
}

impl Report {
    pub fn new(command: &str, scene_text: &str, flags: Value, results: Value) -> Self {
        Self {
            command: command.to_string(),
            input_digest: digest(scene_text),
            flags,
            results,
        }
    }

    pub fn to_value(&self) -> Value {
        let mut map = Map::new();
        map.insert("version".into(), Value::String(REPORT_VERSION.into()));
        map.insert("command".into(), Value::String(self.command.clone()));
        map.insert("input_digest".into(), Value::String(self.input_digest.clone()));
        map.insert("flags".into(), self.flags.clone());
        map.insert("results".into(), self.results.clone());
        Value::Object(map)
    }

    /// Canonical serialization: sorted keys, two-space indentation, one
    /// trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut out = String::new();
        write_canonical(&self.to_value(), 0, &mut out);
        out.push('\n');
        out
    }
}

pub fn digest(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    format!("sha256:{:x}", hasher.finalize())
}

/// Canonical JSON for any value (sorted keys); used for scene round-trips.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_canonical(value, 0, &mut out);
    out.push('\n');
    out
}

fn write_canonical(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    let pad_in = "  ".repeat(indent + 1);
    match value {
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad_in);
                out.push_str(&serde_json::to_string(k).expect("string key"));
                out.push_str(": ");
                write_canonical(&map[*k], indent + 1, out);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad);
            out.push('}');
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad_in);
                write_canonical(item, indent + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad);
            out.push(']');
        }
        other => out.push_str(&serde_json::to_string(other).expect("scalar")),
    }
}

/// Helpers converting domain data to JSON values.
pub mod to_json {
    use crate::certify::{Certificate, Method, ModulusRow, Verdict};
    use crate::geom::{Hyperplane, Point};
    use crate::refgroup::{ClosureStatus, ReflectionGroup, ReflectionSet};
    use crate::trace::{ReflectionWitness, TraceStep};
    use serde_json::{json, Value};

    pub fn point(p: &Point) -> Value {
        Value::Array(p.iter().map(|&v| json!(v)).collect())
    }

    pub fn hyperplane(h: &Hyperplane) -> Value {
        json!({ "normal": point(h.normal()), "offset": h.offset() })
    }

    pub fn modulus_rows(rows: &[ModulusRow]) -> Value {
        Value::Array(
            rows.iter()
                .map(|r| {
                    json!({
                        "wave": r.wave_index,
                        "bc": r.bc,
                        "normal": point(&r.normal),
                        "modulus": r.modulus,
                    })
                })
                .collect(),
        )
    }

    pub fn certificate(cert: &Certificate) -> Value {
        let method = match cert.method {
            Method::Analytic => "analytic",
            Method::Sampled => "sampled",
        };
        let verdict = match &cert.verdict {
            Verdict::CriterionHolds { margin } => json!({
                "kind": "criterion_holds",
                "margin": margin,
            }),
            Verdict::CriterionFails { witness } => json!({
                "kind": "criterion_fails",
                "witness_normals": witness.normals.iter().map(point).collect::<Vec<_>>(),
                "witness_bcs": witness.bcs,
            }),
        };
        json!({
            "verdict": verdict,
            "method": method,
            "moduli": modulus_rows(&cert.details),
        })
    }

    pub fn reflection_set(rs: &ReflectionSet) -> Value {
        Value::Array(rs.hyperplanes().iter().map(hyperplane).collect())
    }

    pub fn group(g: &ReflectionGroup) -> Value {
        json!({
            "status": match g.closure_status {
                ClosureStatus::Finite => "finite",
                ClosureStatus::ExceededCap => "exceeded_cap",
            },
            "order": g.order(),
            "hyperplanes": reflection_set(&g.generators),
        })
    }

    pub fn trace_steps(steps: &[TraceStep]) -> Value {
        Value::Array(
            steps
                .iter()
                .map(|s| {
                    json!({
                        "flat_point": {
                            "point": point(&s.flat_point.point),
                            "plane": hyperplane(&s.flat_point.plane),
                            "clearance": s.flat_point.clearance,
                        },
                        "region": {
                            "unbounded": s.region.unbounded,
                            "far_criterion": s.region.far_criterion,
                            "resolution": s.region.resolution,
                            "cell_count": s.region.cells_plus.len(),
                        },
                    })
                })
                .collect(),
        )
    }

    pub fn witness(w: &ReflectionWitness) -> Value {
        json!({
            "plane": hyperplane(&w.plane),
            "escape_radius": w.escape_radius,
            "iterations": w.steps.len(),
            "steps": trace_steps(&w.steps),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn canonical_json_sorts_keys_and_is_stable() {
        let v = json!({"b": 1, "a": {"d": [1, 2], "c": 0.5}});
        let once = canonical_json(&v);
        let twice = canonical_json(&serde_json::from_str::<Value>(&once).unwrap());
        assert_eq!(once, twice);
        let a_pos = once.find("\"a\"").unwrap();
        let b_pos = once.find("\"b\"").unwrap();
        assert!(a_pos < b_pos);
    }

    #[test]
    fn report_round_trips_losslessly() {
        let report = Report::new(
            "certify",
            "scene-bytes",
            json!({"seed": 0}),
            json!({"ok": true, "values": [1.0, 0.25]}),
        );
        let text = report.to_canonical_json();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["command"], "certify");
        assert_eq!(parsed["results"]["values"][1], 0.25);
        assert_eq!(canonical_json(&parsed), text);
    }
}
