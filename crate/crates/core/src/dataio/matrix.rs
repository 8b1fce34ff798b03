use std::collections::HashSet;

use crate::error::{Error, Result};

/// Row-major `n × D` matrix of encoded applicant features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: Vec<f64>,
    n_rows: usize,
    columns: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(values: Vec<f64>, columns: Vec<String>) -> Result<Self> {
        let d = columns.len();
        if d == 0 {
            return Err(Error::Dimension("feature matrix needs at least one column".into()));
        }
        if !values.len().is_multiple_of(d) {
            return Err(Error::Dimension(format!(
                "{} values do not fill rows of width {d}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite feature at row {}, column {:?}",
                pos / d,
                columns[pos % d]
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = columns.iter().find(|c| !seen.insert(c.as_str())) {
            return Err(Error::InvalidArgument(format!("duplicate column name {dup:?}")));
        }
        Ok(FeatureMatrix {
            n_rows: values.len() / d,
            values,
            columns,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], columns: Vec<String>) -> Result<Self> {
        let d = columns.len();
        if let Some(r) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::Dimension(format!(
                "row {r} has {} entries, expected {d}",
                rows[r].len()
            )));
        }
        Self::new(rows.concat(), columns)
    }

    /// Convenience constructor with generated column names `x0, x1, ...`.
    pub fn from_rows_unnamed(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        Self::from_rows(rows, (0..d).map(|j| format!("x{j}")).collect())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_cols();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_cols())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn select_rows(&self, idx: &[usize]) -> FeatureMatrix {
        let mut values = Vec::with_capacity(idx.len() * self.n_cols());
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            values,
            n_rows: idx.len(),
            columns: self.columns.clone(),
        }
    }

    /// Appends rows in place; callers guarantee width and finiteness.
    pub(crate) fn push_row(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.n_cols());
        self.values.extend_from_slice(row);
        self.n_rows += 1;
    }

    pub fn vstack(&self, other: &FeatureMatrix) -> Result<FeatureMatrix> {
        if self.columns != other.columns {
            return Err(Error::Dimension("cannot stack matrices with different columns".into()));
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Ok(FeatureMatrix {
            values,
            n_rows: self.n_rows + other.n_rows,
            columns: self.columns.clone(),
        })
    }
}

/// Binary outcome per applicant: 1 = good (paid back), 0 = bad (defaulted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector(Vec<u8>);

impl LabelVector {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if let Some(i) = labels.iter().position(|&y| y > 1) {
            return Err(Error::InvalidArgument(format!(
                "label {} at position {i} is not 0 or 1",
                labels[i]
            )));
        }
        Ok(LabelVector(labels))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    /// `(bad, good)` counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let good = self.0.iter().filter(|&&y| y == 1).count();
        (self.0.len() - good, good)
    }

    pub fn select(&self, idx: &[usize]) -> LabelVector {
        LabelVector(idx.iter().map(|&i| self.0[i]).collect())
    }

    pub(crate) fn push(&mut self, y: u8) {
        self.0.push(y);
    }
}

/// Features, labels and the original row position of every row.
///
/// Synthetic rows produced by oversampling carry indices past the end of the
/// source table.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    pub x: FeatureMatrix,
    pub y: LabelVector,
    pub orig_index: Vec<usize>,
}

impl LabeledSet {
    pub fn new(x: FeatureMatrix, y: LabelVector, orig_index: Vec<usize>) -> Result<Self> {
        if x.n_rows() != y.len() || y.len() != orig_index.len() {
            return Err(Error::Dimension(format!(
                "{} feature rows, {} labels, {} indices",
                x.n_rows(),
                y.len(),
                orig_index.len()
            )));
        }
        Ok(LabeledSet { x, y, orig_index })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}
