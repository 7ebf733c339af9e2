//! Minimal deterministic JSON document builder.
//!
//! Output documents must be byte-identical across runs, so every float is
//! printed with a fixed 17-significant-digit format and object keys keep
//! their insertion order.  (Input parsing uses `serde_json`; this writer
//! only covers the fixed report schemas.)

/// Formats a float with 17 significant digits, guaranteeing a lossless
/// round-trip through decimal.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "null".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 {
            "1e999".to_string()
        } else {
            "-1e999".to_string()
        };
    }
    format!("{x:.16e}")
}

/// A JSON value with insertion-ordered objects.
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Array(Vec<Json>),
    Object(Vec<(String, Json)>),
}

impl Json {
    pub fn object() -> Json {
        Json::Object(Vec::new())
    }

    /// Appends a field; only valid on objects.
    pub fn field(mut self, key: &str, value: impl Into<Json>) -> Json {
        match &mut self {
            Json::Object(fields) => fields.push((key.to_string(), value.into())),
            _ => unreachable!("field() is only used on objects"),
        }
        self
    }

    /// Serializes with two-space indentation and a trailing newline.
    pub fn to_document(&self) -> String {
        let mut buf = String::new();
        self.write(&mut buf, 0);
        buf.push('\n');
        buf
    }

    fn write(&self, buf: &mut String, indent: usize) {
        match self {
            Json::Null => buf.push_str("null"),
            Json::Bool(b) => buf.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => buf.push_str(&i.to_string()),
            Json::Float(x) => buf.push_str(&fmt_float(*x)),
            Json::Str(s) => write_escaped(buf, s),
            Json::Array(items) => {
                if items.is_empty() {
                    buf.push_str("[]");
                    return;
                }
                buf.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        buf.push(',');
                    }
                    buf.push('\n');
                    push_indent(buf, indent + 1);
                    item.write(buf, indent + 1);
                }
                buf.push('\n');
                push_indent(buf, indent);
                buf.push(']');
            }
            Json::Object(fields) => {
                if fields.is_empty() {
                    buf.push_str("{}");
                    return;
                }
                buf.push('{');
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        buf.push(',');
                    }
                    buf.push('\n');
                    push_indent(buf, indent + 1);
                    write_escaped(buf, key);
                    buf.push_str(": ");
                    value.write(buf, indent + 1);
                }
                buf.push('\n');
                push_indent(buf, indent);
                buf.push('}');
            }
        }
    }
}

fn push_indent(buf: &mut String, indent: usize) {
    for _ in 0..indent {
        buf.push_str("  ");
    }
}

fn write_escaped(buf: &mut String, s: &str) {
    buf.push('"');
    for c in s.chars() {
        match c {
            '"' => buf.push_str("\\\""),
            '\\' => buf.push_str("\\\\"),
            '\n' => buf.push_str("\\n"),
            '\r' => buf.push_str("\\r"),
            '\t' => buf.push_str("\\t"),
            c if (c as u32) < 0x20 => buf.push_str(&format!("\\u{:04x}", c as u32)),
            c => buf.push(c),
        }
    }
    buf.push('"');
}

impl From<bool> for Json {
    fn from(b: bool) -> Json {
        Json::Bool(b)
    }
}

impl From<i64> for Json {
    fn from(i: i64) -> Json {
        Json::Int(i)
    }
}

impl From<usize> for Json {
    fn from(i: usize) -> Json {
        Json::Int(i as i64)
    }
}

impl From<f64> for Json {
    fn from(x: f64) -> Json {
        Json::Float(x)
    }
}

impl From<&str> for Json {
    fn from(s: &str) -> Json {
        Json::Str(s.to_string())
    }
}

impl From<String> for Json {
    fn from(s: String) -> Json {
        Json::Str(s)
    }
}

impl<T: Into<Json>> From<Option<T>> for Json {
    fn from(value: Option<T>) -> Json {
        match value {
            Some(v) => v.into(),
            None => Json::Null,
        }
    }
}

impl From<Vec<f64>> for Json {
    fn from(values: Vec<f64>) -> Json {
        Json::Array(values.into_iter().map(Json::Float).collect())
    }
}
