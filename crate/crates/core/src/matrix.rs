//! Series × feature value table.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::catalog::FeatureDescriptor;
use crate::dataset::LabeledDataset;
use crate::features::FeatureValue;
use crate::seed::derive_seed;
use crate::series::TimeSeries;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum MatrixError {
    #[error("expected {expected} cells, got {got}")]
    NotRectangular { expected: usize, got: usize },
    #[error("duplicate column {0:?}")]
    DuplicateColumn(String),
    #[error("duplicate row id {0:?}")]
    DuplicateRow(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnMeta {
    pub name: String,
    pub params: Vec<(String, f64)>,
}

impl From<&FeatureDescriptor> for ColumnMeta {
    fn from(d: &FeatureDescriptor) -> Self {
        Self {
            name: d.name.clone(),
            params: d.params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    row_ids: Vec<String>,
    columns: Vec<ColumnMeta>,
    /// Row-major.
    cells: Vec<FeatureValue>,
    seed: u64,
}

impl FeatureMatrix {
    pub fn new(
        row_ids: Vec<String>,
        columns: Vec<ColumnMeta>,
        cells: Vec<FeatureValue>,
        seed: u64,
    ) -> Result<Self, MatrixError> {
        let expected = row_ids.len() * columns.len();
        if cells.len() != expected {
            return Err(MatrixError::NotRectangular {
                expected,
                got: cells.len(),
            });
        }
        let mut names = BTreeSet::new();
        for c in &columns {
            if !names.insert(c.name.as_str()) {
                return Err(MatrixError::DuplicateColumn(c.name.clone()));
            }
        }
        let mut ids = BTreeSet::new();
        for r in &row_ids {
            if !ids.insert(r.as_str()) {
                return Err(MatrixError::DuplicateRow(r.clone()));
            }
        }
        Ok(Self {
            row_ids,
            columns,
            cells,
            seed,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn columns(&self) -> &[ColumnMeta] {
        &self.columns
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    /// Seed the matrix was built with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cell(&self, row: usize, col: usize) -> FeatureValue {
        self.cells[row * self.columns.len() + col]
    }

    pub fn row(&self, row: usize) -> &[FeatureValue] {
        let w = self.columns.len();
        &self.cells[row * w..(row + 1) * w]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = FeatureValue> + '_ {
        (0..self.n_rows()).map(move |r| self.cell(r, col))
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn row_index(&self, id: &str) -> Option<usize> {
        self.row_ids.iter().position(|r| r == id)
    }

    /// Column values, or `None` if any cell is special.
    pub fn finite_column(&self, col: usize) -> Option<Vec<f64>> {
        self.column(col).map(|v| v.value()).collect()
    }

    pub fn column_has_special(&self, col: usize) -> bool {
        self.column(col).any(|v| v.is_special())
    }

    pub fn has_special(&self) -> bool {
        self.cells.iter().any(FeatureValue::is_special)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let cells = rows.iter().flat_map(|&r| self.row(r).iter().copied()).collect();
        Self {
            row_ids: rows.iter().map(|&r| self.row_ids[r].clone()).collect(),
            columns: self.columns.clone(),
            cells,
            seed: self.seed,
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let cells = (0..self.n_rows())
            .flat_map(|r| cols.iter().map(move |&c| self.cell(r, c)))
            .collect();
        Self {
            row_ids: self.row_ids.clone(),
            columns: cols.iter().map(|&c| self.columns[c].clone()).collect(),
            cells,
            seed: self.seed,
        }
    }
}

/// One cell: `descriptor` on `series` with a seed derived from
/// `(seed, series id, feature name)`.
pub fn evaluate_cell(series: &TimeSeries, descriptor: &FeatureDescriptor, seed: u64) -> FeatureValue {
    descriptor.evaluate(series, derive_seed(seed, series.id(), &descriptor.name))
}

/// Evaluates every catalog feature on every series. Cell values do not
/// depend on evaluation order.
pub fn build_feature_matrix(
    data: &LabeledDataset,
    catalog: &[FeatureDescriptor],
    seed: u64,
) -> Result<FeatureMatrix, MatrixError> {
    let cells = data
        .series()
        .iter()
        .flat_map(|s| catalog.iter().map(move |d| evaluate_cell(s, d, seed)))
        .collect();
    FeatureMatrix::new(
        data.ids().into_iter().map(String::from).collect(),
        catalog.iter().map(ColumnMeta::from).collect(),
        cells,
        seed,
    )
}

/// Names of columns with at least one special value.
pub fn special_columns(m: &FeatureMatrix) -> Vec<String> {
    (0..m.n_cols())
        .filter(|&c| m.column_has_special(c))
        .map(|c| m.columns[c].name.clone())
        .collect()
}

/// Drops every column that holds a special value in any row.
pub fn filter_special_features(m: &FeatureMatrix) -> FeatureMatrix {
    let keep: Vec<usize> = (0..m.n_cols()).filter(|&c| !m.column_has_special(c)).collect();
    m.select_columns(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::SpecialKind;
    use alloc::vec;

    fn meta(name: &str) -> ColumnMeta {
        ColumnMeta {
            name: name.into(),
            params: vec![],
        }
    }

    fn matrix(cols: &[&str], cells: Vec<FeatureValue>, rows: usize) -> FeatureMatrix {
        FeatureMatrix::new(
            (0..rows).map(|i| alloc::format!("r{i}")).collect(),
            cols.iter().map(|c| meta(c)).collect(),
            cells,
            0,
        )
        .unwrap()
    }

    #[test]
    fn one_special_drops_column() {
        let mut cells = Vec::new();
        for r in 0..100 {
            cells.push(FeatureValue::Value(r as f64));
            cells.push(if r == 37 {
                FeatureValue::Special(SpecialKind::NotFinite)
            } else {
                FeatureValue::Value(1.0)
            });
        }
        let m = matrix(&["a", "b"], cells, 100);
        let f = filter_special_features(&m);
        assert_eq!(f.column_names(), vec!["a"]);
        assert_eq!(f.n_rows(), 100);
        assert_eq!(f.finite_column(0), m.finite_column(0));
        assert_eq!(special_columns(&m), vec!["b".to_string()]);
    }

    #[test]
    fn all_special_leaves_no_columns() {
        let s = FeatureValue::Special(SpecialKind::Degenerate);
        let m = matrix(&["a", "b"], vec![s, FeatureValue::Value(1.0), FeatureValue::Value(2.0), s], 2);
        assert_eq!(filter_special_features(&m).n_cols(), 0);
        let clean = matrix(&["a"], vec![FeatureValue::Value(1.0)], 1);
        assert_eq!(filter_special_features(&clean), clean);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            FeatureMatrix::new(vec!["r".into()], vec![meta("a")], vec![], 0),
            Err(MatrixError::NotRectangular { .. })
        ));
        assert!(matches!(
            FeatureMatrix::new(vec![], vec![meta("a"), meta("a")], vec![], 0),
            Err(MatrixError::DuplicateColumn(_))
        ));
    }
}
