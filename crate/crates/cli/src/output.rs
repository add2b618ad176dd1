//! CSV tables with `#`-prefixed provenance headers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// One CSV cell. Reals are written with 17 significant digits so that a
/// parse of the file recovers every value bit for bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
}

impl Value {
    pub fn render(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Real(x) => format!("{x:.16e}"),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<usize> for Value {
    fn from(i: usize) -> Self {
        Value::Int(i64::try_from(i).expect("count fits in i64"))
    }
}

impl From<u64> for Value {
    fn from(i: u64) -> Self {
        Value::Int(i64::try_from(i).expect("count fits in i64"))
    }
}

/// Builds a row from heterogeneous cells.
#[macro_export]
macro_rules! row {
    ($($cell:expr),* $(,)?) => {
        vec![$($crate::output::Value::from($cell)),*]
    };
}

/// Writes `header` (every line prefixed with `# `), the column names and
/// one line per row.
pub fn write_csv<I>(path: &Path, header: &str, columns: &[&str], rows: I) -> io::Result<()>
where
    I: IntoIterator<Item = Vec<Value>>,
{
    let mut out = BufWriter::new(File::create(path)?);
    for line in header.lines() {
        writeln!(out, "# {line}")?;
    }
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    writer.write_record(columns)?;
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != columns.len() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!(
                    "row {i} has {} cells, expected {}",
                    row.len(),
                    columns.len()
                ),
            ));
        }
        writer.write_record(row.iter().map(Value::render))?;
    }
    writer.flush()?;
    let out = writer.into_inner().map_err(|e| e.into_error())?;
    out.into_inner().map_err(|e| e.into_error())?.sync_all()
}

/// Parsed contents of a file written by [`write_csv`].
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Reads a table back, parsing every cell as `f64`.
pub fn read_csv(path: &Path) -> io::Result<Table> {
    let text = std::fs::read_to_string(path)?;
    let header = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches('#').trim_start().to_string())
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let columns = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<f64>().map_err(|e| {
                    io::Error::new(
                        io::ErrorKind::InvalidData,
                        format!("bad cell {cell:?}: {e}"),
                    )
                })
            })
            .collect::<io::Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table {
        header,
        columns,
        rows,
    })
}
