use std::path::Path;

use rand::seq::index;

use super::schema::{ColumnKind, DatasetSchema, Delimiter};
use crate::error::{Error, Result};
use crate::seed;

/// String cells exactly as read, one row per retained record.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Records dropped because a used column held the missing-value token.
    pub dropped_missing: usize,
}

impl RawTable {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// Keeps `n` rows drawn without replacement, in their original order.
    pub fn subsample(&self, n: usize, seed: u64) -> RawTable {
        if n >= self.rows.len() {
            return self.clone();
        }
        let mut rng = seed::rng(seed);
        let mut keep = index::sample(&mut rng, self.rows.len(), n).into_vec();
        keep.sort_unstable();
        RawTable {
            columns: self.columns.clone(),
            rows: keep.into_iter().map(|i| self.rows[i].clone()).collect(),
            dropped_missing: self.dropped_missing,
        }
    }
}

pub fn load_dataset(path: impl AsRef<Path>, schema: &DatasetSchema) -> Result<RawTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, schema)
}

pub fn parse_dataset(text: &str, schema: &DatasetSchema) -> Result<RawTable> {
    let records = split_records(text, schema)?;
    let arity = schema.columns.len();
    let mut rows = Vec::with_capacity(records.len());
    let mut dropped = 0usize;

    'rows: for (r, cells) in records.into_iter().enumerate() {
        if cells.len() != arity {
            return Err(Error::RowArity {
                row: r,
                expected: arity,
                found: cells.len(),
            });
        }
        for (cell, col) in cells.iter().zip(&schema.columns) {
            if col.kind == ColumnKind::Ignore {
                continue;
            }
            if schema.missing.as_deref() == Some(cell.as_str()) {
                dropped += 1;
                continue 'rows;
            }
        }
        for (cell, col) in cells.iter().zip(&schema.columns) {
            if let ColumnKind::Categorical(levels) | ColumnKind::Coded(levels) = &col.kind {
                if !levels.iter().any(|l| l == cell) {
                    return Err(Error::UnknownLevel {
                        row: r,
                        column: col.name.clone(),
                        value: cell.clone(),
                    });
                }
            }
        }
        rows.push(cells);
    }

    if dropped > 0 {
        log::info!(
            "{}: dropped {dropped} rows containing the missing-value token",
            schema.name
        );
    }
    if rows.is_empty() {
        return Err(Error::NoDataRows);
    }
    Ok(RawTable {
        columns: schema.columns.iter().map(|c| c.name.clone()).collect(),
        rows,
        dropped_missing: dropped,
    })
}

fn split_records(text: &str, schema: &DatasetSchema) -> Result<Vec<Vec<String>>> {
    match schema.delimiter {
        Delimiter::Whitespace => Ok(text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .skip(usize::from(schema.header))
            .map(|l| l.split_whitespace().map(str::to_owned).collect())
            .collect()),
        Delimiter::Byte(b) => {
            let mut reader = csv::ReaderBuilder::new()
                .delimiter(b)
                .has_headers(schema.header)
                .flexible(true)
                .trim(csv::Trim::All)
                .from_reader(text.as_bytes());
            let mut out = Vec::new();
            for rec in reader.records() {
                let rec = rec?;
                if rec.len() == 1 && rec[0].is_empty() {
                    continue;
                }
                out.push(rec.iter().map(str::to_owned).collect());
            }
            Ok(out)
        }
    }
}
