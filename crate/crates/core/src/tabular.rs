//! Dense CSV tables with typed columns.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("the file is empty (a header row is required)")]
    Empty,
    #[error("duplicate column name `{0}` in header")]
    DuplicateHeader(String),
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row} has an empty cell in column `{column}`")]
    MissingCell { row: usize, column: String },
    #[error("unknown column `{name}`; available: {}", available.join(", "))]
    UnknownColumn { name: String, available: Vec<String> },
    #[error("table columns have different lengths")]
    LengthMismatch,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, ColumnData::Numeric(_))
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match self {
            ColumnData::Numeric(v) => Some(v),
            ColumnData::Categorical(_) => None,
        }
    }

    pub fn as_categorical(&self) -> Option<&[String]> {
        match self {
            ColumnData::Categorical(v) => Some(v),
            ColumnData::Numeric(_) => None,
        }
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> ColumnData {
        match self {
            ColumnData::Numeric(v) => ColumnData::Numeric(indices.iter().map(|&i| v[i]).collect()),
            ColumnData::Categorical(v) => {
                ColumnData::Categorical(indices.iter().map(|&i| v[i].clone()).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

impl Column {
    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            data: ColumnData::Numeric(values),
        }
    }

    pub fn categorical(name: impl Into<String>, values: Vec<String>) -> Self {
        Column {
            name: name.into(),
            data: ColumnData::Categorical(values),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<Column>,
    row_count: usize,
}

/// Plain decimal or exponent notation with `.` as decimal point. Rejects
/// `inf`, `NaN` and thousands separators, which `f64::from_str` would
/// partly accept.
pub fn parse_decimal(cell: &str) -> Option<f64> {
    if !crate::rdf::is_double_lexical(cell) {
        return None;
    }
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Result<Self, TableError> {
        let row_count = columns.first().map_or(0, Column::len);
        if columns.iter().any(|c| c.len() != row_count) {
            return Err(TableError::LengthMismatch);
        }
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(TableError::DuplicateHeader(c.name.clone()));
            }
        }
        Ok(Table { columns, row_count })
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, TableError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(reader);
        let mut records = rdr.records();
        let header = match records.next() {
            None => return Err(TableError::Empty),
            Some(r) => r?,
        };
        let names: Vec<String> = header.iter().map(str::to_string).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(TableError::DuplicateHeader(n.clone()));
            }
        }
        let mut cells: Vec<Vec<String>> = vec![Vec::new(); names.len()];
        for (row, record) in records.enumerate() {
            let record = record?;
            let row = row + 1;
            if record.len() != names.len() {
                return Err(TableError::RaggedRow {
                    row,
                    expected: names.len(),
                    found: record.len(),
                });
            }
            for (j, cell) in record.iter().enumerate() {
                if cell.is_empty() {
                    return Err(TableError::MissingCell {
                        row,
                        column: names[j].clone(),
                    });
                }
                cells[j].push(cell.to_string());
            }
        }
        let row_count = cells.first().map_or(0, Vec::len);
        let columns = names
            .into_iter()
            .zip(cells)
            .map(|(name, raw)| {
                let parsed: Option<Vec<f64>> = raw.iter().map(|c| parse_decimal(c)).collect();
                let data = match parsed {
                    Some(v) => ColumnData::Numeric(v),
                    None => ColumnData::Categorical(raw),
                };
                Column { name, data }
            })
            .collect();
        Ok(Table { columns, row_count })
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn extract_column(&self, name: &str) -> Result<&Column, TableError> {
        self.column(name).ok_or_else(|| TableError::UnknownColumn {
            name: name.to_string(),
            available: self.columns.iter().map(|c| c.name.clone()).collect(),
        })
    }
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Table, TableError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| TableError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Table::from_reader(std::io::BufReader::new(file))
}

pub fn extract_column<'t>(table: &'t Table, name: &str) -> Result<&'t Column, TableError> {
    table.extract_column(name)
}
