//! Tabular results and their CSV, JSON and SVG renderings.
//!
//! Every rendering carries the parameter stamp of the run. Numbers are
//! written in shortest round-trip form so outputs are byte-stable and read
//! back to the same `f64`.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(value: Option<f64>) -> Cell {
        value.map_or(Cell::Empty, Cell::Num)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }

    fn csv_text(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::opt(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Which columns an SVG rendering plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plot {
    pub x: String,
    pub ys: Vec<String>,
}

/// A command's result: parameter stamp, summary values and rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub command: String,
    pub parameters: Vec<(String, Cell)>,
    pub summary: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub plot: Option<Plot>,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Table {
            command: command.to_owned(),
            parameters: Vec::new(),
            summary: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            plot: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.parameters.push((key.to_owned(), value.into()));
        self
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.summary.push((key.to_owned(), value.into()));
        self
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn plot(&mut self, x: &str, ys: &[&str]) -> &mut Self {
        self.plot = Some(Plot {
            x: x.to_owned(),
            ys: ys.iter().map(|y| y.to_string()).collect(),
        });
        self
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column; non-numeric cells are skipped.
    pub fn values(&self, name: &str) -> Vec<f64> {
        self.column(name)
            .map(|i| self.rows.iter().filter_map(|r| r[i].as_f64()).collect())
            .unwrap_or_default()
    }

    pub fn summary_value(&self, key: &str) -> Option<&Cell> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
            Format::Svg => self.to_svg(),
        }
    }

    fn stamp(pairs: &[(String, Cell)]) -> String {
        pairs
            .iter()
            .map(|(k, v)| format!("{k}={}", v.csv_text()))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = format!("# spring-linkage {}\n", self.command);
        if !self.parameters.is_empty() {
            writeln!(out, "# parameters: {}", Self::stamp(&self.parameters)).expect("string write");
        }
        if !self.summary.is_empty() {
            writeln!(out, "# summary: {}", Self::stamp(&self.summary)).expect("string write");
        }
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        writer.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::csv_text)).map_err(io)?;
        }
        let body = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| Error::Io(e.to_string()))?);
        Ok(out)
    }

    fn object(pairs: &[(String, Cell)]) -> Value {
        Value::Object(pairs.iter().map(|(k, v)| (k.clone(), v.json())).collect())
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect::<Map<_, _>>()))
            .collect();
        let mut doc = Map::new();
        doc.insert("command".into(), Value::String(self.command.clone()));
        doc.insert("parameters".into(), Self::object(&self.parameters));
        doc.insert("summary".into(), Self::object(&self.summary));
        doc.insert("columns".into(), self.columns.iter().cloned().map(Value::String).collect());
        doc.insert("rows".into(), Value::Array(rows));
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    /// Reads back a table written by [`Table::to_json`].
    pub fn from_json(text: &str) -> Result<Table> {
        let bad = |what: &str| Error::Configuration(format!("not a result document: {what}"));
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Configuration(e.to_string()))?;
        let cell = |v: &Value| match v {
            Value::Number(n) => n.as_f64().map_or(Cell::Empty, Cell::Num),
            Value::String(s) => Cell::Text(s.clone()),
            _ => Cell::Empty,
        };
        let pairs = |key: &str| -> Result<Vec<(String, Cell)>> {
            Ok(doc[key]
                .as_object()
                .ok_or_else(|| bad(key))?
                .iter()
                .map(|(k, v)| (k.clone(), cell(v)))
                .collect())
        };
        let columns: Vec<String> = doc["columns"]
            .as_array()
            .ok_or_else(|| bad("columns"))?
            .iter()
            .map(|c| c.as_str().map(str::to_owned).ok_or_else(|| bad("columns")))
            .collect::<Result<_>>()?;
        let rows = doc["rows"]
            .as_array()
            .ok_or_else(|| bad("rows"))?
            .iter()
            .map(|r| {
                let obj = r.as_object().ok_or_else(|| bad("rows"))?;
                Ok(columns.iter().map(|c| obj.get(c).map_or(Cell::Empty, cell)).collect())
            })
            .collect::<Result<_>>()?;
        Ok(Table {
            command: doc["command"].as_str().ok_or_else(|| bad("command"))?.to_owned(),
            parameters: pairs("parameters")?,
            summary: pairs("summary")?,
            columns,
            rows,
            plot: None,
        })
    }

    pub fn to_svg(&self) -> Result<String> {
        let plot = self
            .plot
            .as_ref()
            .ok_or_else(|| Error::Configuration(format!("{} has no plot; use csv or json", self.command)))?;
        let series: Vec<(&str, Vec<(f64, f64)>)> = plot
            .ys
            .iter()
            .map(|y| {
                let (xi, yi) = (self.column(&plot.x), self.column(y));
                let points = match (xi, yi) {
                    (Some(xi), Some(yi)) => self
                        .rows
                        .iter()
                        .filter_map(|r| Some((r[xi].as_f64()?, r[yi].as_f64()?)))
                        .collect(),
                    _ => Vec::new(),
                };
                (y.as_str(), points)
            })
            .collect();
        Ok(svg_lines(&format!("spring-linkage {}", self.command), &plot.x, &series))
    }

    pub fn write_to(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        out.write_all(self.render(format)?.as_bytes())?;
        Ok(())
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn svg_lines(title: &str, x_label: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    let (w, h, margin) = (640.0, 400.0, 60.0);
    let all = series.iter().flat_map(|(_, pts)| pts.iter().copied());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    y0 = y0.min(0.0);
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - (y - y0) / (y1 - y0) * (h - 2.0 * margin);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" font-size="14" text-anchor="middle">{}</text>"#, w / 2.0, escape(title));
    let (left, right, top, bottom) = (margin, w - margin, margin, h - margin);
    let _ = writeln!(
        svg,
        r#"<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" fill="none" stroke="black"/>"#
    );
    for v in [x0, x1] {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{}</text>"#, sx(v), bottom + 16.0, tick(v));
    }
    for v in [y0, y1] {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#, left - 6.0, sy(v) + 4.0, tick(v));
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, w / 2.0, h - 16.0, escape(x_label));
    for (i, (name, pts)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" fill="{colour}">{}</text>"#,
            right - 150.0,
            top + 14.0 * (i as f64 + 1.0),
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick(v: f64) -> String {
    format!("{:.3}", v)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo", &["x", "y", "note"]);
        t.param("alpha", 0.1).param("label", "a,b");
        t.summarize("best", 1.0 / 3.0);
        t.push_row(vec![0.0.into(), (0.1 + 0.2).into(), Cell::Empty]);
        t.push_row(vec![1.0.into(), Cell::Empty, "gap".into()]);
        t.plot("x", &["y"]);
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# spring-linkage demo");
        assert_eq!(lines[1], "# parameters: alpha=0.1 label=a,b");
        assert_eq!(lines[2], "# summary: best=0.3333333333333333");
        assert_eq!(lines[3], "x,y,note");
        assert_eq!(lines[4], "0.0,0.30000000000000004,");
        assert_eq!(lines[5], "1.0,,gap");
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn json_round_trip() {
        let t = sample();
        let back = Table::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back.rows, t.rows);
        assert_eq!(back.parameters, t.parameters);
        assert_eq!(back.summary, t.summary);
        assert_eq!(back.columns, t.columns);
    }

    #[test]
    fn svg_needs_a_plot() {
        let mut t = sample();
        assert!(t.to_svg().unwrap().starts_with("<svg"));
        t.plot = None;
        assert!(matches!(t.to_svg(), Err(Error::Configuration(_))));
    }
}
