//! Deterministic text and image encoders.
//!
//! Floats always print with 17 significant digits so that two runs on the same
//! config produce identical bytes.

use std::fmt::Write as _;

use crate::wavefunction::WaveField;

/// `{:.16e}` for finite values, `nan`/`inf`/`-inf` otherwise.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// JSON number with the same digits, `null` for non-finite values.
pub fn json_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

pub fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// Quotes a CSV cell when it contains a separator or quote.
pub fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A JSON value assembled by hand so floats keep their fixed formatting.
#[derive(Clone, Debug)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj<K: Into<String>>(fields: Vec<(K, Json)>) -> Json {
        Json::Obj(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, depth: usize) {
        let pad = |out: &mut String, d: usize| out.push_str(&"  ".repeat(d));
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::Num(x) => out.push_str(&json_float(*x)),
            Json::Str(s) => out.push_str(&json_string(s)),
            Json::Arr(items) if items.is_empty() => out.push_str("[]"),
            Json::Arr(items) => {
                // Arrays of scalars stay on one line; grids would otherwise be enormous.
                let flat = items.iter().all(|v| !matches!(v, Json::Arr(_) | Json::Obj(_)));
                if flat {
                    out.push('[');
                    for (i, v) in items.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        v.write(out, depth);
                    }
                    out.push(']');
                } else {
                    out.push_str("[\n");
                    for (i, v) in items.iter().enumerate() {
                        pad(out, depth + 1);
                        v.write(out, depth + 1);
                        if i + 1 < items.len() {
                            out.push(',');
                        }
                        out.push('\n');
                    }
                    pad(out, depth);
                    out.push(']');
                }
            }
            Json::Obj(fields) if fields.is_empty() => out.push_str("{}"),
            Json::Obj(fields) => {
                out.push_str("{\n");
                for (i, (k, v)) in fields.iter().enumerate() {
                    pad(out, depth + 1);
                    out.push_str(&json_string(k));
                    out.push_str(": ");
                    v.write(out, depth + 1);
                    if i + 1 < fields.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                pad(out, depth);
                out.push('}');
            }
        }
    }
}

/// 16-bit binary PGM. Finite values map linearly onto 1..=65535, the NaN mask
/// onto 0. Row 0 of the image is the top of the bounding box.
pub fn pgm16(field: &WaveField) -> Vec<u8> {
    let finite = field.values.iter().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let mut out = format!("P5\n{} {}\n65535\n", field.nx, field.ny).into_bytes();
    out.reserve(2 * field.nx * field.ny);
    for j in (0..field.ny).rev() {
        for i in 0..field.nx {
            let v = field.get(i, j);
            let level: u16 = if !v.is_finite() {
                0
            } else if hi > lo {
                (1.0 + (v - lo) / (hi - lo) * 65534.0).round().clamp(1.0, 65535.0) as u16
            } else {
                32768
            };
            out.extend_from_slice(&level.to_be_bytes());
        }
    }
    out
}
