//! Canonical JSON text: object keys sorted by code point, no insignificant
//! whitespace, numbers in shortest round-trip form, trailing newline.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub fn to_canonical_string<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("in-memory value always serializes");
    let mut out = String::new();
    write_value(&v, &mut out);
    out.push('\n');
    out
}

pub fn to_canonical_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    to_canonical_string(value).into_bytes()
}

/// Strict JSON decoding: UTF-8 and syntax failures report a byte offset,
/// shape failures report the path of the offending field.
pub fn parse_json<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        offset: e.valid_up_to(),
        message: "input is not valid UTF-8".into(),
    })?;
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        json_error(text, path, inner)
    })?;
    de.end().map_err(|e| json_error(text, String::new(), e))?;
    Ok(value)
}

fn json_error(text: &str, path: String, e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Syntax | Category::Eof | Category::Io => Error::Parse {
            offset: byte_offset(text, e.line(), e.column()),
            message: e.to_string(),
        },
        Category::Data => {
            let field = if path.is_empty() || path == "." {
                "<root>".to_string()
            } else {
                path
            };
            // serde_json appends " at line L column C"; the field path is more useful.
            let msg = e.to_string();
            let msg = msg
                .rsplit_once(" at line ")
                .map_or(msg.as_str(), |(m, _)| m)
                .to_string();
            Error::Validation {
                field,
                message: msg,
            }
        }
    }
}

/// Converts serde_json's 1-based line and column into a byte offset.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&n.to_string()),
        Value::String(s) => write_str(s, out),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut entries: Vec<(&String, &Value)> = map.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            out.push('{');
            for (i, (k, item)) in entries.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_str(k, out);
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

fn write_str(s: &str, out: &mut String) {
    out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
}
