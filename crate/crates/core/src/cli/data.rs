//! CSV ingestion: comma separated, header row, decimal point.

use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{PlregError, Result};

/// A numeric table read from CSV, stored by column.
#[derive(Debug, Clone)]
pub struct DataTable {
    pub headers: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl DataTable {
    pub fn from_columns(headers: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if headers.len() != columns.len() {
            return Err(PlregError::Usage("one header per column is required".into()));
        }
        if columns.windows(2).any(|w| w[0].len() != w[1].len()) {
            return Err(PlregError::Usage("columns differ in length".into()));
        }
        Ok(Self { headers, columns })
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        let k = self.headers.iter().position(|h| h == name).ok_or_else(|| {
            PlregError::Usage(format!(
                "column `{name}` not found; available columns: {}",
                self.headers.join(", ")
            ))
        })?;
        Ok(&self.columns[k])
    }

    /// SHA-256 over the names and IEEE bit patterns of the given columns.
    pub fn hash(&self, names: &[String]) -> Result<String> {
        let mut h = Sha256::new();
        for name in names {
            let col = self.column(name)?;
            h.update(name.as_bytes());
            h.update([0u8]);
            for v in col {
                h.update(v.to_le_bytes());
            }
        }
        Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
    }
}

/// Reads a CSV file whose cells are all numbers.
pub fn read_csv(path: &Path) -> Result<DataTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| PlregError::Parse(format!("{}: {e}", path.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| PlregError::Parse(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || headers.iter().any(String::is_empty) {
        return Err(PlregError::Parse(format!("{}: header row has empty names", path.display())));
    }
    let mut columns = vec![Vec::new(); headers.len()];
    for record in reader.records() {
        let record = record.map_err(|e| PlregError::Parse(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        for (k, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                PlregError::Parse(format!(
                    "{}: line {line}, column {} (`{}`): `{cell}` is not a number",
                    path.display(),
                    k + 1,
                    headers[k]
                ))
            })?;
            columns[k].push(v);
        }
    }
    DataTable::from_columns(headers, columns)
}
