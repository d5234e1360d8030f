//! Tabular output shared by every report: CSV with `#` manifest lines, or a
//! JSON envelope `{"manifest": {...}, "columns": [...], "rows": [{...}, ...]}`.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! inputs always produce byte-identical files.

use std::io::Write;

use serde_json::{Map, Value};

use crate::analytic::{JIntegrals, ProbeRow};
use crate::reps::{GrowthRow, RatioRow, RepresentationTable};
use crate::sigma::SigmaReport;
use crate::Result;

pub const TOOL_NAME: &str = "primepow";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::UInt(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::UInt(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Ordered `key: value` lines describing how a table was produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Self::default();
        m.push("tool", format!("{TOOL_NAME} {TOOL_VERSION}"));
        m.push("command", command);
        m
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.push(key, value);
        self
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn write_csv<W: Write>(&self, manifest: &Manifest, mut out: W) -> Result<()> {
        for (k, v) in manifest.entries() {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, manifest: &Manifest) -> Value {
        let mut m = Map::new();
        for (k, v) in manifest.entries() {
            m.insert(k.clone(), Value::String(v.clone()));
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (c, v) in self.columns.iter().zip(row) {
                    obj.insert(c.clone(), v.to_json());
                }
                Value::Object(obj)
            })
            .collect();
        let mut env = Map::new();
        env.insert("manifest".into(), Value::Object(m));
        env.insert(
            "columns".into(),
            Value::Array(self.columns.iter().cloned().map(Value::String).collect()),
        );
        env.insert("rows".into(), Value::Array(rows));
        Value::Object(env)
    }

    pub fn write_json<W: Write>(&self, manifest: &Manifest, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.to_json(manifest))?;
        writeln!(out)?;
        Ok(())
    }
}

/// `N,q,k,G_qk,G_1k,sigma,phi,ratio,residual,residual_normalized`
pub const RATIO_COLUMNS: [&str; 10] = [
    "N",
    "q",
    "k",
    "G_qk",
    "G_1k",
    "sigma",
    "phi",
    "ratio",
    "residual",
    "residual_normalized",
];

pub fn ratio_table(rows: &[RatioRow]) -> Table {
    let mut t = Table::new(RATIO_COLUMNS);
    for r in rows {
        t.push(vec![
            r.n.into(),
            r.q.into(),
            r.k.into(),
            r.g_qk.into(),
            r.g_1k.into(),
            r.sigma.into(),
            r.phi.into(),
            r.ratio.into(),
            r.residual.into(),
            r.residual_normalized.into(),
        ]);
    }
    t
}

pub fn sigma_table(rows: &[SigmaReport]) -> Table {
    let mut t = Table::new([
        "q",
        "k",
        "mode",
        "via_char_sum",
        "via_closed_form",
        "via_bruteforce",
        "agree",
        "case_trace",
    ]);
    for r in rows {
        t.push(vec![
            r.q.into(),
            r.k.into(),
            r.mode.to_string().into(),
            r.via_char_sum.into(),
            r.via_closed_form.into(),
            r.via_bruteforce.into(),
            r.agree.into(),
            r.case_trace.join("; ").into(),
        ]);
    }
    t
}

pub fn representation_table(table: &RepresentationTable, q: u64) -> Table {
    let mut t = Table::new(["n", "psi"]);
    for (n, v) in table.iter().filter(|(n, _)| n % q == 0) {
        t.push(vec![n.into(), v.into()]);
    }
    t
}

pub fn growth_table(rows: &[GrowthRow]) -> Table {
    let mut t = Table::new([
        "N",
        "k",
        "G_1k",
        "G_1k_over_N_pow_1_plus_1_over_k",
        "G_1k_over_N_pow_2_over_k",
        "area_constant",
    ]);
    for r in rows {
        t.push(vec![
            r.n.into(),
            r.k.into(),
            r.g_1k.into(),
            r.heuristic_normalized.into(),
            r.area_normalized.into(),
            r.area_constant.into(),
        ]);
    }
    t
}

pub fn probe_table(rows: &[ProbeRow]) -> Table {
    let mut t = Table::new([
        "N",
        "k",
        "psi",
        "normalized",
        "gamma_candidate",
        "stated_candidate",
    ]);
    for r in rows {
        t.push(vec![
            r.n.into(),
            r.k.into(),
            r.psi.into(),
            r.normalized.into(),
            r.gamma_candidate.into(),
            r.stated_candidate.into(),
        ]);
    }
    t
}

/// J-integral rows with the normalisations `J₁/(X² log²(2q))` and
/// `J₂/((h+1) X log²(3qX/(h+1)))`.
pub fn j_table(q: u64, k: u32, rows: &[JIntegrals]) -> Table {
    let mut t = Table::new(["q", "k", "X", "h", "J1", "J2", "J1_normalized", "J2_normalized"]);
    for r in rows {
        let (j1n, j2n) = j_normalized(q, r);
        t.push(vec![
            q.into(),
            k.into(),
            r.x.into(),
            r.h.into(),
            r.j1.into(),
            r.j2.into(),
            j1n.into(),
            j2n.into(),
        ]);
    }
    t
}

pub fn j_normalized(q: u64, r: &JIntegrals) -> (f64, f64) {
    let qf = q as f64;
    let j1n = r.j1 / (r.x * r.x * (2.0 * qf).ln().powi(2));
    let j2n = r.j2 / ((r.h + 1.0) * r.x * (3.0 * qf * r.x / (r.h + 1.0)).ln().powi(2));
    (j1n, j2n)
}

/// Whitespace-separated two-column data for external plotting.
pub fn write_plot_data<W: Write>(points: &[(f64, f64)], mut out: W) -> Result<()> {
    for (x, y) in points {
        writeln!(out, "{x} {y}")?;
    }
    Ok(())
}
