//! Output records and their CSV/JSON rendering.

use std::fmt::Write as _;

use serde_json::{Map, Value};

/// Column order of every table.
pub const COLUMNS: [&str; 15] = [
    "command",
    "p",
    "q",
    "phi",
    "null_kind",
    "alt_kind",
    "n",
    "eps",
    "beta",
    "dhe",
    "dhe_over_n",
    "case_tag",
    "n_eps",
    "oracle_beta",
    "abs_diff",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Record {
    pub command: &'static str,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub phi: Option<f64>,
    pub null_kind: &'static str,
    pub alt_kind: &'static str,
    pub n: Option<u32>,
    pub eps: Option<f64>,
    pub beta: Option<f64>,
    pub dhe: Option<f64>,
    pub dhe_over_n: Option<f64>,
    pub case_tag: Option<&'static str>,
    pub n_eps: Option<u64>,
    pub oracle_beta: Option<f64>,
    pub abs_diff: Option<f64>,
}

enum Cell {
    Empty,
    Text(String),
    Int(u64),
    Num(f64),
}

/// `x` rounded to 9 significant digits, printed in its shortest form.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let y: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    if (1e-4..1e9).contains(&y.abs()) {
        format!("{y}")
    } else {
        format!("{y:e}")
    }
}

impl Record {
    fn cells(&self) -> [Cell; 15] {
        let num = |x: Option<f64>| x.map_or(Cell::Empty, Cell::Num);
        let text = |s: &str| {
            if s.is_empty() {
                Cell::Empty
            } else {
                Cell::Text(s.to_string())
            }
        };
        [
            text(self.command),
            num(self.p),
            num(self.q),
            num(self.phi),
            text(self.null_kind),
            text(self.alt_kind),
            self.n.map_or(Cell::Empty, |n| Cell::Int(n.into())),
            num(self.eps),
            num(self.beta),
            num(self.dhe),
            num(self.dhe_over_n),
            self.case_tag.map_or(Cell::Empty, text),
            self.n_eps.map_or(Cell::Empty, Cell::Int),
            num(self.oracle_beta),
            num(self.abs_diff),
        ]
    }

    pub fn csv_row(&self) -> String {
        self.cells()
            .iter()
            .map(|c| match c {
                Cell::Empty => String::new(),
                Cell::Text(s) => s.clone(),
                Cell::Int(i) => i.to_string(),
                Cell::Num(x) => format_float(*x),
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn json(&self) -> Value {
        let mut m = Map::new();
        for (key, c) in COLUMNS.iter().zip(self.cells()) {
            let v = match c {
                Cell::Empty => Value::Null,
                Cell::Text(s) => Value::String(s),
                Cell::Int(i) => Value::from(i),
                // Non-finite values have no JSON number form.
                Cell::Num(x) if !x.is_finite() => Value::String(format_float(x)),
                Cell::Num(x) => {
                    let y: f64 = format_float(x).parse().expect("formatted float parses");
                    Value::from(y)
                }
            };
            m.insert((*key).to_string(), v);
        }
        Value::Object(m)
    }
}

/// Header entries echoed before the table.
pub type Header = Vec<(&'static str, String)>;

pub fn render_csv(header: &Header, records: &[Record]) -> String {
    let mut out = String::new();
    let items: Vec<String> = header.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(out, "# {}", items.join(" "));
    let _ = writeln!(out, "{}", COLUMNS.join(","));
    for r in records {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}

pub fn render_json(header: &Header, records: &[Record]) -> String {
    let mut h = Map::new();
    for (k, v) in header {
        h.insert((*k).to_string(), Value::String(v.clone()));
    }
    let mut root = Map::new();
    root.insert("header".into(), Value::Object(h));
    root.insert(
        "records".into(),
        Value::Array(records.iter().map(Record::json).collect()),
    );
    let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("JSON values serialize");
    s.push('\n');
    s
}
