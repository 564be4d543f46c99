use std::fmt::Write as _;

use super::{ParseError, ParseErrorKind};

/// Current machine report schema.
pub const SCHEMA: i64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    List(Vec<Value>),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    fn emit(&self, out: &mut String) {
        match self {
            Value::Int(i) => {
                let _ = write!(out, "{i}");
            }
            // `{:e}` always contains an exponent (or is inf/NaN), which
            // keeps floats distinguishable from integers.
            Value::Float(x) => {
                let _ = write!(out, "{x:e}");
            }
            Value::Text(s) => {
                if is_bare_word(s) {
                    out.push_str(s);
                } else {
                    out.push('"');
                    for ch in s.chars() {
                        match ch {
                            '"' => out.push_str("\\\""),
                            '\\' => out.push_str("\\\\"),
                            '\n' => out.push_str("\\n"),
                            c => out.push(c),
                        }
                    }
                    out.push('"');
                }
            }
            Value::List(items) => {
                out.push('[');
                for (k, v) in items.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    v.emit(out);
                }
                out.push(']');
            }
        }
    }

    fn parse(s: &str) -> Option<Value> {
        if let Some(inner) = s.strip_prefix('"') {
            let inner = inner.strip_suffix('"')?;
            let mut out = String::new();
            let mut it = inner.chars();
            while let Some(ch) = it.next() {
                if ch == '\\' {
                    match it.next()? {
                        'n' => out.push('\n'),
                        c => out.push(c),
                    }
                } else {
                    out.push(ch);
                }
            }
            return Some(Value::Text(out));
        }
        if let Some(inner) = s.strip_prefix('[') {
            let inner = inner.strip_suffix(']')?;
            if inner.is_empty() {
                return Some(Value::List(Vec::new()));
            }
            return inner.split(',').map(Value::parse).collect::<Option<Vec<_>>>().map(Value::List);
        }
        if let Ok(i) = s.parse::<i64>() {
            return Some(Value::Int(i));
        }
        if let Ok(x) = s.parse::<f64>() {
            return Some(Value::Float(x));
        }
        Some(Value::Text(s.to_string()))
    }
}

fn is_bare_word(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
        && s.parse::<f64>().is_err()
}

/// Ordered key/value report. Keys without a dot are the summary; dotted keys
/// (`attempt.*`, `cert.*`) carry details.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    fields: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: Value) {
        self.fields.push((key.into(), value));
    }

    pub fn int(&mut self, key: impl Into<String>, v: i64) {
        self.push(key, Value::Int(v));
    }

    pub fn float(&mut self, key: impl Into<String>, v: f64) {
        self.push(key, Value::Float(v));
    }

    pub fn text(&mut self, key: impl Into<String>, v: impl Into<String>) {
        self.push(key, Value::Text(v.into()));
    }

    pub fn floats(&mut self, key: impl Into<String>, v: &[f64]) {
        self.push(key, Value::List(v.iter().map(|&x| Value::Float(x)).collect()));
    }

    pub fn ints(&mut self, key: impl Into<String>, v: impl IntoIterator<Item = i64>) {
        self.push(key, Value::List(v.into_iter().map(Value::Int).collect()));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn fields(&self) -> &[(String, Value)] {
        &self.fields
    }

    /// `schema=1` followed by one `key=value` line per field.
    pub fn emit_machine(&self) -> String {
        let mut out = format!("schema={SCHEMA}\n");
        for (k, v) in &self.fields {
            out.push_str(k);
            out.push('=');
            v.emit(&mut out);
            out.push('\n');
        }
        out
    }

    pub fn parse_machine(text: &str) -> Result<Report, ParseError> {
        let mut lines = text.lines().enumerate();
        let bad = |line: usize, msg: String| ParseError {
            line: line + 1,
            col: 1,
            kind: ParseErrorKind::Syntax(msg),
        };
        match lines.next() {
            Some((_, l)) if l == format!("schema={SCHEMA}") => {}
            Some((i, l)) => return Err(bad(i, format!("expected schema={SCHEMA}, found '{l}'"))),
            None => return Err(bad(0, "empty report".into())),
        }
        let mut report = Report::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| bad(i, "expected key=value".into()))?;
            let value = Value::parse(v).ok_or_else(|| bad(i, format!("malformed value '{v}'")))?;
            report.push(k, value);
        }
        Ok(report)
    }

    /// Summary fields as aligned `key: value` lines, followed by a count of
    /// detail fields.
    pub fn emit_human(&self) -> String {
        let summary: Vec<&(String, Value)> = self.fields.iter().filter(|(k, _)| !k.contains('.')).collect();
        let width = summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &summary {
            let mut s = String::new();
            match v {
                Value::Float(x) => {
                    let _ = write!(s, "{x:.6e}");
                }
                Value::Text(t) => s.push_str(t),
                other => other.emit(&mut s),
            }
            let _ = writeln!(out, "{k:>width$}: {s}");
        }
        let details = self.fields.len() - summary.len();
        if details > 0 {
            let _ = writeln!(out, "({details} detail fields; use --format machine)");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut r = Report::new();
        r.text("status", "certified");
        r.int("exit_code", 0);
        r.float("bound", 9.043028674920289e-7);
        r.float("third", 1.0 / 3.0);
        r.float("whole", 2.0);
        r.float("neg_inf", f64::NEG_INFINITY);
        r.floats("cert.y", &[0.1, -2.5e-300, 7.0]);
        r.ints("cert.blocks", [9, 6, 6, 4]);
        r.text("cert.h", "1 + 2*p - 3e-1*p^2");
        r.text("cert.quote", "a \"b\" \\ c");
        r.text("cert.number_like", "12");
        r.push("cert.empty", Value::List(Vec::new()));
        let text = r.emit_machine();
        assert!(text.starts_with("schema=1\n"));
        let back = Report::parse_machine(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.emit_machine(), text);
        match back.get("third") {
            Some(Value::Float(x)) => assert_eq!(x.to_bits(), (1.0f64 / 3.0).to_bits()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_schema() {
        assert!(Report::parse_machine("schema=2\n").is_err());
        assert!(Report::parse_machine("schema=1\nnovalue\n").is_err());
    }
}
