//! Loading and validating the garment-productivity table.
//!
//! The loader is lenient about cell contents and strict about shape: a
//! missing required column or a repeated header aborts, while a cell that
//! fails to parse becomes missing and is listed in [`Frame::cell_errors`].
//! Values outside a column's documented range are kept and listed in
//! [`Frame::range_warnings`].
//!
//! Empty cells (and the literal `NA`) are missing. Categorical labels are
//! whitespace-trimmed; `department` is additionally lower-cased so the
//! `finishing` / `finishing ` variants collapse.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnKind {
    Date,
    Categorical,
    Integer,
    Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    pub required: bool,
    pub range: Option<(f64, f64)>,
}

impl ColumnSchema {
    fn required(name: &str, kind: ColumnKind) -> Self {
        ColumnSchema { name: name.to_string(), kind, required: true, range: None }
    }
}

/// The fifteen columns of the garment dataset, in file order.
pub fn garment_schema() -> Vec<ColumnSchema> {
    use ColumnKind::*;
    let mut cols = vec![
        ColumnSchema::required("date", Date),
        ColumnSchema::required("quarter", Categorical),
        ColumnSchema::required("department", Categorical),
        ColumnSchema::required("day", Categorical),
        ColumnSchema::required("team", Integer),
        ColumnSchema::required("targeted_productivity", Real),
        ColumnSchema::required("smv", Real),
        ColumnSchema::required("wip", Real),
        ColumnSchema::required("over_time", Integer),
        ColumnSchema::required("incentive", Integer),
        ColumnSchema::required("idle_time", Real),
        ColumnSchema::required("idle_men", Integer),
        ColumnSchema::required("no_of_style_change", Integer),
        ColumnSchema::required("no_of_workers", Real),
        ColumnSchema::required("actual_productivity", Real),
    ];
    cols.last_mut().unwrap().range = Some((0.0, 1.0));
    cols
}

/// The ten numeric covariates used for factor analysis.
pub const FACTOR_COLUMNS: [&str; 10] = [
    "team",
    "targeted_productivity",
    "smv",
    "wip",
    "over_time",
    "incentive",
    "idle_time",
    "idle_men",
    "no_of_style_change",
    "no_of_workers",
];

fn canonical_header(raw: &str) -> String {
    let h = raw.trim().trim_start_matches('\u{feff}').to_ascii_lowercase();
    match h.as_str() {
        "team_no" => "team".to_string(),
        _ => h,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColumnData {
    Date(Vec<Option<NaiveDate>>),
    Categorical(Vec<Option<String>>),
    Integer(Vec<Option<i64>>),
    Real(Vec<Option<f64>>),
}

impl ColumnData {
    fn empty(kind: ColumnKind) -> Self {
        match kind {
            ColumnKind::Date => ColumnData::Date(Vec::new()),
            ColumnKind::Categorical => ColumnData::Categorical(Vec::new()),
            ColumnKind::Integer => ColumnData::Integer(Vec::new()),
            ColumnKind::Real => ColumnData::Real(Vec::new()),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ColumnData::Date(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
            ColumnData::Integer(v) => v.len(),
            ColumnData::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match self {
            ColumnData::Date(v) => v[row].is_none(),
            ColumnData::Categorical(v) => v[row].is_none(),
            ColumnData::Integer(v) => v[row].is_none(),
            ColumnData::Real(v) => v[row].is_none(),
        }
    }

    fn select(&self, rows: &[usize]) -> ColumnData {
        fn pick<T: Clone>(v: &[T], rows: &[usize]) -> Vec<T> {
            rows.iter().map(|&r| v[r].clone()).collect()
        }
        match self {
            ColumnData::Date(v) => ColumnData::Date(pick(v, rows)),
            ColumnData::Categorical(v) => ColumnData::Categorical(pick(v, rows)),
            ColumnData::Integer(v) => ColumnData::Integer(pick(v, rows)),
            ColumnData::Real(v) => ColumnData::Real(pick(v, rows)),
        }
    }

    fn render(&self, row: usize) -> String {
        match self {
            ColumnData::Date(v) => v[row].map(format_date).unwrap_or_default(),
            ColumnData::Categorical(v) => v[row].clone().unwrap_or_default(),
            ColumnData::Integer(v) => v[row].map(|x| x.to_string()).unwrap_or_default(),
            ColumnData::Real(v) => v[row].map(|x| x.to_string()).unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub schema: ColumnSchema,
    pub data: ColumnData,
}

/// A cell whose text did not parse under its column kind. `row` is the
/// 0-based data row (the header is not counted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub row: usize,
    pub column: String,
    pub raw: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeWarning {
    pub row: usize,
    pub column: String,
    pub value: f64,
    pub range: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    columns: Vec<Column>,
    n_rows: usize,
    cell_errors: Vec<CellError>,
    range_warnings: Vec<RangeWarning>,
}

impl Frame {
    /// Builds a frame from already-typed columns of equal length.
    pub fn from_columns(columns: Vec<Column>) -> Result<Frame> {
        let n_rows = columns.first().map_or(0, |c| c.data.len());
        let mut seen = HashSet::new();
        for c in &columns {
            if c.data.len() != n_rows {
                return Err(Error::LengthMismatch { expected: n_rows, actual: c.data.len() });
            }
            if !seen.insert(c.schema.name.clone()) {
                return Err(Error::SchemaViolation(format!("duplicate column `{}`", c.schema.name)));
            }
        }
        Ok(Frame { columns, n_rows, cell_errors: Vec::new(), range_warnings: Vec::new() })
    }

    /// A frame of real columns with no missing cells.
    pub fn from_real_columns<S: AsRef<str>>(names: &[S], cols: &[Vec<f64>]) -> Result<Frame> {
        if names.len() != cols.len() {
            return Err(Error::LengthMismatch { expected: names.len(), actual: cols.len() });
        }
        let columns = names
            .iter()
            .zip(cols)
            .map(|(n, c)| Column {
                schema: ColumnSchema::required(n.as_ref(), ColumnKind::Real),
                data: ColumnData::Real(c.iter().map(|&v| Some(v)).collect()),
            })
            .collect();
        Frame::from_columns(columns)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn schema(&self) -> Vec<ColumnSchema> {
        self.columns.iter().map(|c| c.schema.clone()).collect()
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.schema.name.as_str()).collect()
    }

    pub fn cell_errors(&self) -> &[CellError] {
        &self.cell_errors
    }

    pub fn range_warnings(&self) -> &[RangeWarning] {
        &self.range_warnings
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.schema.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn missing_mask(&self, name: &str) -> Result<Vec<bool>> {
        let c = self.column(name)?;
        Ok((0..self.n_rows).map(|r| c.data.is_missing(r)).collect())
    }

    pub fn missing_count(&self, name: &str) -> Result<usize> {
        Ok(self.missing_mask(name)?.into_iter().filter(|&m| m).count())
    }

    /// Numeric view of a column; dates become days since 1970-01-01.
    pub fn numeric(&self, name: &str) -> Result<Vec<Option<f64>>> {
        match &self.column(name)?.data {
            ColumnData::Real(v) => Ok(v.clone()),
            ColumnData::Integer(v) => Ok(v.iter().map(|x| x.map(|i| i as f64)).collect()),
            ColumnData::Date(v) => Ok(v.iter().map(|x| x.map(|d| encode_date(d) as f64)).collect()),
            ColumnData::Categorical(_) => {
                Err(Error::InvalidParameter(format!("column `{name}` is categorical, not numeric")))
            }
        }
    }

    pub fn categorical(&self, name: &str) -> Result<&[Option<String>]> {
        match &self.column(name)?.data {
            ColumnData::Categorical(v) => Ok(v),
            _ => Err(Error::InvalidParameter(format!("column `{name}` is not categorical"))),
        }
    }

    /// Complete numeric columns after dropping rows missing in any of them.
    pub fn numeric_complete<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<Vec<f64>>> {
        let cc = complete_cases(self, names)?;
        names
            .iter()
            .map(|n| Ok(cc.numeric(n.as_ref())?.into_iter().map(|v| v.unwrap()).collect()))
            .collect()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Frame {
        let columns = self
            .columns
            .iter()
            .map(|c| Column { schema: c.schema.clone(), data: c.data.select(rows) })
            .collect();
        // diagnostics refer to source rows and are not carried over
        Frame { columns, n_rows: rows.len(), cell_errors: Vec::new(), range_warnings: Vec::new() }
    }
}

/// Days since 1970-01-01.
pub fn encode_date(d: NaiveDate) -> i64 {
    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1).unwrap();
    (d - epoch).num_days()
}

/// Parses `M/D/YYYY`, `MM-DD-YYYY` or ISO `YYYY-MM-DD`.
pub fn parse_date(text: &str) -> Option<NaiveDate> {
    let t = text.trim();
    ["%m/%d/%Y", "%m-%d-%Y", "%Y-%m-%d"]
        .iter()
        .find_map(|fmt| NaiveDate::parse_from_str(t, fmt).ok())
}

/// Writes the `M/D/YYYY` form used by the public file.
pub fn format_date(d: NaiveDate) -> String {
    d.format("%-m/%-d/%Y").to_string()
}

fn parse_integer(t: &str) -> Option<i64> {
    if let Ok(v) = t.parse::<i64>() {
        return Some(v);
    }
    let f: f64 = t.parse().ok()?;
    (f.is_finite() && f.fract() == 0.0 && f.abs() < 9.0e15).then_some(f as i64)
}

fn is_missing_text(t: &str) -> bool {
    t.is_empty() || t == "NA"
}

/// Reads the garment CSV. Every column of [`garment_schema`] must be present
/// (in any order); unrecognized columns are kept as categorical.
pub fn load_dataset<R: Read>(source: R) -> Result<Frame> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(source);
    let raw_headers = rdr.headers()?.clone();
    if raw_headers.is_empty() || raw_headers.iter().all(|h| h.trim().is_empty()) {
        return Err(Error::SchemaViolation("no header row".into()));
    }
    let headers: Vec<String> = raw_headers.iter().map(canonical_header).collect();
    let mut seen = HashSet::new();
    for h in &headers {
        if !seen.insert(h.as_str()) {
            return Err(Error::SchemaViolation(format!("duplicate header `{h}`")));
        }
    }
    let known = garment_schema();
    let missing: Vec<&str> = known
        .iter()
        .filter(|s| s.required && !headers.contains(&s.name))
        .map(|s| s.name.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(Error::SchemaViolation(format!("missing required column(s): {}", missing.join(", "))));
    }

    let schemas: Vec<ColumnSchema> = headers
        .iter()
        .map(|h| {
            known.iter().find(|s| &s.name == h).cloned().unwrap_or(ColumnSchema {
                name: h.clone(),
                kind: ColumnKind::Categorical,
                required: false,
                range: None,
            })
        })
        .collect();
    let mut data: Vec<ColumnData> = schemas.iter().map(|s| ColumnData::empty(s.kind)).collect();
    let mut cell_errors = Vec::new();
    let mut range_warnings = Vec::new();
    let mut n_rows = 0;

    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Parse { row, column: String::new(), message: e.to_string() })?;
        for (c, cell) in record.iter().enumerate() {
            let schema = &schemas[c];
            let t = cell.trim();
            let mut reject = |msg: &str| {
                cell_errors.push(CellError {
                    row,
                    column: schema.name.clone(),
                    raw: cell.to_string(),
                    message: msg.to_string(),
                })
            };
            let missing = is_missing_text(t);
            let value: Option<f64> = match &mut data[c] {
                ColumnData::Date(v) => {
                    let d = if missing { None } else { parse_date(t) };
                    if !missing && d.is_none() {
                        reject("not a date (expected M/D/YYYY or MM-DD-YYYY)");
                    }
                    v.push(d);
                    None
                }
                ColumnData::Categorical(v) => {
                    let label = (!missing).then(|| {
                        if schema.name == "department" {
                            t.to_lowercase()
                        } else {
                            t.to_string()
                        }
                    });
                    v.push(label);
                    None
                }
                ColumnData::Integer(v) => {
                    let x = if missing { None } else { parse_integer(t) };
                    if !missing && x.is_none() {
                        reject("not an integer");
                    }
                    v.push(x);
                    x.map(|i| i as f64)
                }
                ColumnData::Real(v) => {
                    let x = if missing { None } else { t.parse::<f64>().ok().filter(|f| f.is_finite()) };
                    if !missing && x.is_none() {
                        reject("not a finite number");
                    }
                    v.push(x);
                    x
                }
            };
            if let (Some(x), Some((lo, hi))) = (value, schema.range) {
                if x < lo || x > hi {
                    range_warnings.push(RangeWarning { row, column: schema.name.clone(), value: x, range: (lo, hi) });
                }
            }
        }
        n_rows += 1;
    }
    if n_rows == 0 {
        return Err(Error::SchemaViolation("no data rows".into()));
    }
    let columns = schemas.into_iter().zip(data).map(|(schema, data)| Column { schema, data }).collect();
    Ok(Frame { columns, n_rows, cell_errors, range_warnings })
}

pub fn load_path(path: &std::path::Path) -> Result<Frame> {
    let f = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_dataset(std::io::BufReader::new(f))
}

/// Writes the frame back as CSV; missing cells are empty.
pub fn write_csv<W: Write>(frame: &Frame, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(frame.column_names())?;
    for r in 0..frame.n_rows {
        w.write_record(frame.columns.iter().map(|c| c.data.render(r)))?;
    }
    w.flush()?;
    Ok(())
}

/// Drops rows missing a value in any listed column, keeping order.
pub fn complete_cases<S: AsRef<str>>(frame: &Frame, columns: &[S]) -> Result<Frame> {
    let cols: Vec<&Column> = columns.iter().map(|n| frame.column(n.as_ref())).collect::<Result<_>>()?;
    let keep: Vec<usize> = (0..frame.n_rows).filter(|&r| cols.iter().all(|c| !c.data.is_missing(r))).collect();
    if keep.len() == frame.n_rows {
        return Ok(frame.clone());
    }
    Ok(frame.select_rows(&keep))
}

/// Plain-text validation summary: row count, per-column missing counts,
/// rejected cells and range warnings.
pub fn validation_report(frame: &Frame) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "rows = {}", frame.n_rows);
    let _ = writeln!(s, "columns = {}", frame.columns.len());
    for c in &frame.columns {
        let miss = (0..frame.n_rows).filter(|&r| c.data.is_missing(r)).count();
        let _ = writeln!(s, "missing.{} = {}", c.schema.name, miss);
    }
    let _ = writeln!(s, "rejected_cells = {}", frame.cell_errors.len());
    for e in &frame.cell_errors {
        let _ = writeln!(s, "rejected: row {} column {} value {:?}: {}", e.row, e.column, e.raw, e.message);
    }
    let _ = writeln!(s, "range_warnings = {}", frame.range_warnings.len());
    for w in &frame.range_warnings {
        let _ = writeln!(s, "out-of-range: row {} column {} value {} outside [{}, {}]", w.row, w.column, w.value, w.range.0, w.range.1);
    }
    s
}
