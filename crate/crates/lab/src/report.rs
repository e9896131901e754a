//! Tables, assertions and plots, and their CSV / JSON / SVG serialization.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Seventeen significant digits, so every `f64` round-trips.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// CSV text preceded by one `# kind = ..., seed = ...` comment line.
    pub fn to_csv(&self, kind: &str, seed: u64) -> Result<Vec<u8>, csv::Error> {
        let mut out = format!("# kind = {kind}, seed = {seed}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::render))?;
            }
            w.flush()?;
        }
        Ok(out)
    }
}

/// Comparison an assertion makes between its two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// `lhs <= rhs` or `lhs >= rhs`; `slack` is the signed margin, so the
/// assertion passes iff `slack >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl Assertion {
    pub fn at_most(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::build(name.into(), lhs, Relation::AtMost, rhs)
    }

    pub fn at_least(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::build(name.into(), lhs, Relation::AtLeast, rhs)
    }

    /// A yes/no fact recorded as `value >= 1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    fn build(name: String, lhs: f64, relation: Relation, rhs: f64) -> Self {
        let slack = match relation {
            Relation::AtMost => rhs - lhs,
            Relation::AtLeast => lhs - rhs,
        };
        Self {
            name,
            lhs,
            relation,
            rhs,
            slack,
            pass: slack >= 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// A line plot of one quantity against one parameter, one polyline per series.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl Plot {
    pub fn new(name: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            name: name.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
        }
    }

    /// Series from two columns of `table`, grouped by the value of `group`
    /// when given. Rows with non-numeric cells are skipped.
    pub fn from_table(mut self, table: &Table, x: &str, y: &str, group: Option<&str>) -> Self {
        let (Some(xi), Some(yi)) = (table.column(x), table.column(y)) else {
            return self;
        };
        let gi = group.and_then(|g| table.column(g));
        for row in &table.rows {
            let (Some(xv), Some(yv)) = (row[xi].as_f64(), row[yi].as_f64()) else {
                continue;
            };
            let label = match gi {
                Some(g) => format!("{} = {}", group.unwrap_or_default(), row[g].render()),
                None => y.to_string(),
            };
            match self.series.iter_mut().find(|s| s.label == label) {
                Some(s) => s.points.push((xv, yv)),
                None => self.series.push(Series {
                    label,
                    points: vec![(xv, yv)],
                }),
            }
        }
        for s in &mut self.series {
            s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        self
    }

    pub fn is_empty(&self) -> bool {
        self.series.iter().all(|s| s.points.is_empty())
    }

    /// SVG document, or `None` when there is nothing to draw (or, with
    /// `log_y`, no positive value).
    pub fn to_svg(&self, kind: &str, seed: u64, log_y: bool) -> Option<String> {
        const W: f64 = 640.0;
        const H: f64 = 420.0;
        const PAD: f64 = 60.0;
        const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
        let map_y = |y: f64| if log_y { y.log10() } else { y };
        let usable = |y: f64| y.is_finite() && (!log_y || y > 0.0);
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .filter(|&(x, y)| x.is_finite() && usable(y))
            .map(|(x, y)| (x, map_y(y)))
            .collect();
        if pts.is_empty() {
            return None;
        }
        let bounds = |f: fn(&(f64, f64)) -> f64| {
            let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
            if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) }
        };
        let (x0, x1) = bounds(|p| p.0);
        let (y0, y1) = bounds(|p| p.1);
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(svg, "<!-- kind = {kind}, seed = {seed} -->");
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let y_axis = if log_y { format!("log10 {}", self.y_label) } else { self.y_label.clone() };
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{}</text>"#,
            W / 2.0,
            H - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="15" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
            H / 2.0,
            H / 2.0,
            escape(&y_axis)
        );
        for (v, x, anchor) in [(x0, PAD, "start"), (x1, W - PAD, "end")] {
            let _ = writeln!(
                svg,
                r#"<text x="{x}" y="{}" font-size="11" text-anchor="{anchor}">{}</text>"#,
                H - PAD + 15.0,
                short(v)
            );
        }
        for (v, y) in [(y0, H - PAD), (y1, PAD)] {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{y}" font-size="11" text-anchor="end">{}</text>"#,
                PAD - 5.0,
                short(v)
            );
        }
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let line: Vec<String> = s
                .points
                .iter()
                .filter(|&&(x, y)| x.is_finite() && usable(y))
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(map_y(y))))
                .collect();
            if line.is_empty() {
                continue;
            }
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                line.join(" ")
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
                PAD + 8.0,
                PAD + 15.0 * (i as f64 + 1.0),
                escape(&s.label)
            );
        }
        svg.push_str("</svg>\n");
        Some(svg)
    }
}

fn short(v: f64) -> String {
    format!("{v:.4e}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Outcome of one experiment: its tables, plots and checked inequalities.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub plots: Vec<Plot>,
    pub assertions: Vec<Assertion>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn extend(&mut self, other: Outcome) {
        self.tables.extend(other.tables);
        self.plots.extend(other.plots);
        self.assertions.extend(other.assertions);
    }
}

/// Timing and verdict of one acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionSummary {
    pub id: u32,
    pub title: String,
    pub pass: bool,
    pub runtime_seconds: f64,
    pub budget_seconds: f64,
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub kind: String,
    pub seed: u64,
    pub outcome: Outcome,
    pub criteria: Vec<CriterionSummary>,
}

#[derive(Serialize)]
struct Summary<'a> {
    kind: &'a str,
    seed: u64,
    pass: bool,
    assertions: &'a [Assertion],
    #[serde(skip_serializing_if = "<[_]>::is_empty")]
    criteria: &'a [CriterionSummary],
    max_residuals: serde_json::Map<String, serde_json::Value>,
    tables: Vec<&'a str>,
}

#[derive(Debug, thiserror::Error)]
pub enum WriteError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Report {
    pub fn passed(&self) -> bool {
        self.outcome.passed() && self.criteria.iter().all(|c| c.pass)
    }

    /// Every assertion, including those nested in criteria.
    pub fn all_assertions(&self) -> impl Iterator<Item = &Assertion> {
        self.outcome
            .assertions
            .iter()
            .chain(self.criteria.iter().flat_map(|c| c.assertions.iter()))
    }

    /// Largest `lhs` per assertion name among `<=` assertions.
    fn max_residuals(&self) -> serde_json::Map<String, serde_json::Value> {
        let mut out = serde_json::Map::new();
        for a in self.all_assertions().filter(|a| a.relation == Relation::AtMost) {
            let entry = out.entry(a.name.clone()).or_insert(serde_json::Value::from(a.lhs));
            if let Some(v) = entry.as_f64() {
                if a.lhs > v {
                    *entry = serde_json::Value::from(a.lhs);
                }
            }
        }
        out
    }

    pub fn summary_json(&self) -> Result<String, serde_json::Error> {
        let s = Summary {
            kind: &self.kind,
            seed: self.seed,
            pass: self.passed(),
            assertions: &self.outcome.assertions,
            criteria: &self.criteria,
            max_residuals: self.max_residuals(),
            tables: self.outcome.tables.iter().map(|t| t.name.as_str()).collect(),
        };
        serde_json::to_string_pretty(&s)
    }

    /// Writes `<table>.csv`, `summary.json` and `<plot>.svg` into `dir`;
    /// plots with nothing to draw are skipped with a warning on stderr.
    pub fn write(&self, dir: &Path, log_y: bool) -> Result<Vec<PathBuf>, WriteError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| WriteError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::new();
        for t in &self.outcome.tables {
            let path = dir.join(format!("{}.csv", t.name));
            fs::write(&path, t.to_csv(&self.kind, self.seed)?).map_err(io(&path))?;
            written.push(path);
        }
        let path = dir.join("summary.json");
        fs::write(&path, self.summary_json()? + "\n").map_err(io(&path))?;
        written.push(path);
        for p in &self.outcome.plots {
            match p.to_svg(&self.kind, self.seed, log_y) {
                Some(svg) => {
                    let path = dir.join(format!("{}.svg", p.name));
                    fs::write(&path, svg).map_err(io(&path))?;
                    written.push(path);
                }
                None => eprintln!("warning: plot {} has no data, no file written", p.name),
            }
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let x = 0.1 + 0.2;
        let s = format_float(x);
        assert_eq!(s, "3.0000000000000004e-1");
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(format_float(f64::NAN), "NaN");
    }

    #[test]
    fn csv_has_seed_line_and_fixed_columns() {
        let mut t = Table::new("demo", &["b", "flag"]);
        t.push(vec![1.5.into(), true.into()]);
        let text = String::from_utf8(t.to_csv("demo-kind", 9).unwrap()).unwrap();
        assert_eq!(text, "# kind = demo-kind, seed = 9\nb,flag\n1.5000000000000000e0,true\n");
    }

    #[test]
    fn assertion_slack_is_the_margin() {
        let a = Assertion::at_most("x", 1.0, 3.0);
        assert!(a.pass && a.slack == 2.0);
        let b = Assertion::at_least("y", 1.0, 3.0);
        assert!(!b.pass && b.slack == -2.0);
        assert!(!Assertion::at_most("nan", f64::NAN, 1.0).pass);
    }

    #[test]
    fn empty_plot_has_no_svg() {
        let t = Table::new("empty", &["b", "v"]);
        let p = Plot::new("p", "b", "v").from_table(&t, "b", "v", None);
        assert!(p.is_empty());
        assert!(p.to_svg("k", 1, false).is_none());
    }

    #[test]
    fn single_column_gives_one_polyline() {
        let mut t = Table::new("t", &["b", "v"]);
        for i in 0..4 {
            t.push(vec![(i as f64).into(), (i as f64 * 2.0).into()]);
        }
        let svg = Plot::new("p", "b", "v").from_table(&t, "b", "v", None).to_svg("k", 3, false).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("seed = 3"));
    }

    #[test]
    fn grouped_series_split_by_value() {
        let mut t = Table::new("t", &["b", "s", "v"]);
        for s in [-1.0, 0.0, 1.0] {
            for b in [0.0, 1.0] {
                t.push(vec![b.into(), s.into(), (b * s).into()]);
            }
        }
        let p = Plot::new("p", "b", "v").from_table(&t, "b", "v", Some("s"));
        assert_eq!(p.series.len(), 3);
        // log scale drops non-positive values; only s = 1, b = 1 remains
        let svg = p.to_svg("k", 1, true).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
