//! Output records and their JSON / CSV rendering.
//!
//! JSON floats use the shortest representation that parses back to the same
//! value; CSV floats are printed with 17 significant digits. Both are exact
//! round trips.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Serialize, Serializer};

use holoq_core::CMat2;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Row-major real and imaginary parts of a 2x2 gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateEntries {
    pub re: [[f64; 2]; 2],
    pub im: [[f64; 2]; 2],
}

impl From<&CMat2> for GateEntries {
    fn from(g: &CMat2) -> Self {
        let mut out = GateEntries {
            re: [[0.0; 2]; 2],
            im: [[0.0; 2]; 2],
        };
        for i in 0..2 {
            for j in 0..2 {
                out.re[i][j] = g.0[i][j].re;
                out.im[i][j] = g.0[i][j].im;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub theta2: Option<f64>,
    pub phi2: Option<f64>,
    /// Target rotation angle, when compiled from a target.
    pub alpha: Option<f64>,
    pub eta: Option<f64>,
    pub ratio: Option<f64>,
    pub areas: Vec<f64>,
}

/// Result of `compile`, `simulate` or `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub command: String,
    pub scheme: String,
    pub parameters: Parameters,
    pub gate: GateEntries,
    pub closure_defect: f64,
    pub dyn_phase_max: Option<f64>,
    /// Numeric gate against the closed form.
    pub gate_distance: Option<f64>,
    /// Gate against the requested target.
    pub target_distance: Option<f64>,
}

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl ReportRecord {
    pub fn to_table(&self) -> Table {
        let p = &self.parameters;
        let mut columns: Vec<&'static str> = vec![
            "command", "scheme", "theta", "phi", "theta2", "phi2", "alpha", "eta", "ratio", "areas",
        ];
        let mut row = vec![
            Cell::Text(self.command.clone()),
            Cell::Text(self.scheme.clone()),
            Cell::opt(p.theta),
            Cell::opt(p.phi),
            Cell::opt(p.theta2),
            Cell::opt(p.phi2),
            Cell::opt(p.alpha),
            Cell::opt(p.eta),
            Cell::opt(p.ratio),
            Cell::Text(
                p.areas
                    .iter()
                    .map(|a| fmt_float(*a))
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
        ];
        let names = [
            ["g00_re", "g00_im"],
            ["g01_re", "g01_im"],
            ["g10_re", "g10_im"],
            ["g11_re", "g11_im"],
        ];
        for (k, pair) in names.iter().enumerate() {
            let (i, j) = (k / 2, k % 2);
            columns.extend_from_slice(pair);
            row.push(Cell::Num(self.gate.re[i][j]));
            row.push(Cell::Num(self.gate.im[i][j]));
        }
        columns.extend_from_slice(&[
            "closure_defect",
            "dyn_phase_max",
            "gate_distance",
            "target_distance",
        ]);
        row.push(Cell::Num(self.closure_defect));
        row.push(Cell::opt(self.dyn_phase_max));
        row.push(Cell::opt(self.gate_distance));
        row.push(Cell::opt(self.target_distance));
        Table {
            columns,
            csv_columns: None,
            rows: vec![row],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn opt(x: Option<f64>) -> Cell {
        x.map(Cell::Num).unwrap_or(Cell::Empty)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::Num(_) | Cell::Empty => s.serialize_none(),
            Cell::Int(i) => s.serialize_i64(*i),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
        }
    }
}

/// Ordered table; JSON is an array of objects with keys in column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    /// Columns written to CSV when the CSV layout is fixed; all otherwise.
    pub csv_columns: Option<Vec<&'static str>>,
    pub rows: Vec<Vec<Cell>>,
}

struct RowRef<'a>(&'a [&'static str], &'a [Cell]);

impl Serialize for RowRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows.len()))?;
        for row in &self.rows {
            seq.serialize_element(&RowRef(&self.columns, row))?;
        }
        seq.end()
    }
}

impl Table {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let selected: Vec<usize> = match &self.csv_columns {
            Some(cols) => cols
                .iter()
                .map(|c| {
                    self.columns
                        .iter()
                        .position(|x| x == c)
                        .expect("CSV column present in table")
                })
                .collect(),
            None => (0..self.columns.len()).collect(),
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(selected.iter().map(|&i| self.columns[i]))
            .map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(selected.iter().map(|&i| row[i].csv()))
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

/// Something a command prints.
pub enum Output {
    Record(Box<ReportRecord>),
    Table(Table),
}

impl Output {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match (self, format) {
            (Output::Record(r), Format::Json) => Ok(to_json(r)),
            (Output::Table(t), Format::Json) => Ok(to_json(t)),
            (Output::Record(r), Format::Csv) => r.to_table().to_csv(),
            (Output::Table(t), Format::Csv) => t.to_csv(),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// `prefix.ext`, unless the prefix already carries the extension.
pub fn output_path(prefix: &Path, format: Format) -> PathBuf {
    let ext = format.extension();
    if prefix.extension().and_then(|e| e.to_str()) == Some(ext) {
        prefix.to_path_buf()
    } else {
        let mut name = prefix.as_os_str().to_owned();
        name.push(".");
        name.push(ext);
        PathBuf::from(name)
    }
}

pub fn emit(output: &Output, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = output.render(format)?;
    match out {
        Some(prefix) => {
            let path = output_path(prefix, format);
            fs::write(&path, text)?;
            log::info!("wrote {}", path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}
