//! Dense row-major data matrices.
//!
//! Rows are data points and columns are the component-selector features
//! `f_j(x) = x_j`. The counting measure over the rows is implicit.

use crate::error::{Error, Result};

/// Dense `rows x cols` matrix of finite reals in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    names: Option<Vec<String>>,
}

impl DatasetMatrix {
    /// Builds a matrix from row-major values, rejecting non-finite entries.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if cols == 0 {
            return Err(Error::NoColumns);
        }
        if rows == 0 {
            return Err(Error::EmptyData);
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::InvalidArgument(format!("{rows}x{cols} overflows")))?;
        if values.len() != expected {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                expected,
                actual: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
                value: values[pos],
            });
        }
        Ok(Self {
            rows,
            cols,
            values,
            names: None,
        })
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::RaggedRow {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        if rows.is_empty() {
            return Err(Error::EmptyData);
        }
        Self::new(rows.len(), cols, values)
    }

    /// Builds a matrix from columns of equal length.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::NoColumns);
        }
        let rows = columns[0].as_ref().len();
        for (j, c) in columns.iter().enumerate() {
            if c.as_ref().len() != rows {
                return Err(Error::InvalidArgument(format!(
                    "column {j} has {} values, expected {rows}",
                    c.as_ref().len()
                )));
            }
        }
        let cols = columns.len();
        let mut values = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            values.extend(columns.iter().map(|c| c.as_ref()[i]));
        }
        Self::new(rows, cols, values)
    }

    /// Attaches column names, one per column.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.cols {
            return Err(Error::InvalidArgument(format!(
                "{} names for {} columns",
                names.len(),
                self.cols
            )));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    /// Copies one column out of the row-major buffer.
    pub fn column(&self, col: usize) -> Result<Vec<f64>> {
        if col >= self.cols {
            return Err(Error::FeatureOutOfRange {
                index: col,
                cols: self.cols,
            });
        }
        Ok(self
            .values
            .iter()
            .skip(col)
            .step_by(self.cols)
            .copied()
            .collect())
    }

    /// Keeps the given columns in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::NoColumns);
        }
        if let Some(&bad) = keep.iter().find(|&&j| j >= self.cols) {
            return Err(Error::FeatureOutOfRange {
                index: bad,
                cols: self.cols,
            });
        }
        let mut values = Vec::with_capacity(self.rows * keep.len());
        for i in 0..self.rows {
            let row = self.row(i);
            values.extend(keep.iter().map(|&j| row[j]));
        }
        let names = self
            .names
            .as_ref()
            .map(|n| keep.iter().map(|&j| n[j].clone()).collect());
        Ok(Self {
            rows: self.rows,
            cols: keep.len(),
            values,
            names,
        })
    }

    /// Errors unless the matrix has enough rows for a dimension computation.
    pub(crate) fn require_rows(&self) -> Result<()> {
        if self.rows < 2 {
            Err(Error::TooFewRows(self.rows))
        } else {
            Ok(())
        }
    }

    /// Column values sorted ascending.
    pub(crate) fn sorted_column(&self, col: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .values
            .iter()
            .skip(col)
            .step_by(self.cols)
            .copied()
            .collect();
        v.sort_unstable_by(f64::total_cmp);
        v
    }
}
