//! Report output. Every value goes through [`Report`], which records it
//! both as a text line and as a JSON field, so the two forms never diverge.

use probalg::rational::fmt_ratio;
use probalg::Rational;
use serde_json::{Map, Value};

/// A scalar as shown in text and stored in JSON.
pub enum Cell {
    Text(String),
    Ratio(Rational),
    Float(f64),
    Flag(bool),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Ratio(r) => fmt_ratio(r),
            Cell::Float(x) => format!("{x:.12}"),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Ratio(r) => Value::String(fmt_ratio(r)),
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Flag(b) => Value::Bool(*b),
        }
    }
}

impl From<Rational> for Cell {
    fn from(r: Rational) -> Self {
        Cell::Ratio(r)
    }
}

impl From<&Rational> for Cell {
    fn from(r: &Rational) -> Self {
        Cell::Ratio(r.clone())
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Text(n.to_string())
    }
}

#[derive(Default)]
pub struct Report {
    lines: Vec<String>,
    json: Map<String, Value>,
    /// Set when a checked property fails; the process exits with 1.
    pub failed: bool,
    /// Replaces the text form; also the JSON form when no fields were set.
    pub raw: Option<String>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// `key = value`.
    pub fn put(&mut self, key: &str, value: impl Into<Cell>) {
        let c = value.into();
        self.lines.push(format!("{key} = {}", c.text()));
        self.json.insert(key.to_string(), c.json());
    }

    /// Like [`put`](Self::put) with a custom text rendering.
    pub fn put_as(&mut self, key: &str, value: impl Into<Cell>, text: String) {
        self.lines.push(text);
        self.json.insert(key.to_string(), value.into().json());
    }

    pub fn list(&mut self, key: &str, values: Vec<Cell>) {
        let text: Vec<String> = values.iter().map(Cell::text).collect();
        self.lines.push(format!("{key} = [{}]", text.join(", ")));
        self.json.insert(key.to_string(), Value::Array(values.iter().map(Cell::json).collect()));
    }

    /// Aligned table; in JSON an array of objects keyed by the headers.
    pub fn table(&mut self, key: &str, headers: &[&str], rows: Vec<Vec<Cell>>) {
        let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(Cell::text).collect()).collect();
        let widths: Vec<usize> = (0..headers.len())
            .map(|i| text.iter().map(|r| r[i].chars().count()).chain([headers[i].len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: Vec<&str>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        self.lines.push(format!("{key}:"));
        self.lines.push(format!("  {}", line(headers.to_vec())));
        for r in &text {
            self.lines.push(format!("  {}", line(r.iter().map(String::as_str).collect())));
        }
        let objects = rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = headers.iter().zip(r).map(|(h, c)| (h.to_string(), c.json())).collect();
                Value::Object(m)
            })
            .collect();
        self.json.insert(key.to_string(), Value::Array(objects));
    }

    pub fn nest(&mut self, key: &str, inner: Report) {
        self.lines.push(format!("{key}:"));
        self.lines.extend(inner.lines.into_iter().map(|l| format!("  {l}")));
        self.json.insert(key.to_string(), Value::Object(inner.json));
        self.failed |= inner.failed;
    }

    pub fn render(&self, json: bool) -> String {
        if let Some(raw) = self.raw.as_ref().filter(|_| !json || self.json.is_empty()) {
            return raw.clone();
        }
        if json {
            let mut s = serde_json::to_string_pretty(&Value::Object(self.json.clone())).expect("plain data");
            s.push('\n');
            s
        } else {
            let mut s = self.lines.join("\n");
            s.push('\n');
            s
        }
    }
}
