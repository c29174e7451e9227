//! Dense row-major feature matrix.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Dense row-major matrix of feature values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<F> {
    data: Vec<F>,
    n_cols: usize,
}

impl<F: Scalar> Matrix<F> {
    /// Builds a matrix from row-major storage.
    ///
    /// Panics if `n_cols` is zero or `data.len()` is not a multiple of it.
    pub fn from_vec(data: Vec<F>, n_cols: usize) -> Self {
        assert!(n_cols > 0, "matrix requires at least one column");
        assert!(
            data.len() % n_cols == 0,
            "row-major data length {} is not a multiple of n_cols {}",
            data.len(),
            n_cols
        );
        Self { data, n_cols }
    }

    pub fn empty(n_cols: usize) -> Self {
        Self::from_vec(Vec::new(), n_cols)
    }

    pub fn n_rows(&self) -> usize {
        self.data.len() / self.n_cols
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[F]> {
        self.data.chunks_exact(self.n_cols)
    }

    pub fn push_row(&mut self, row: &[F]) {
        assert_eq!(row.len(), self.n_cols, "row width mismatch");
        self.data.extend_from_slice(row);
    }

    /// New matrix holding the given rows, in the given order (duplicates
    /// allowed).
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            data,
            n_cols: self.n_cols,
        }
    }

    pub fn as_slice(&self) -> &[F] {
        &self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_rows_preserves_order_and_duplicates() {
        let m = Matrix::from_vec(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0], 2);
        let s = m.select_rows(&[2, 0, 2]);
        assert_eq!(s.n_rows(), 3);
        assert_eq!(s.row(0), &[4.0, 5.0]);
        assert_eq!(s.row(1), &[0.0, 1.0]);
        assert_eq!(s.row(2), &[4.0, 5.0]);
    }

    #[test]
    #[should_panic(expected = "multiple of n_cols")]
    fn ragged_storage_is_rejected() {
        let _ = Matrix::from_vec(vec![1.0f64, 2.0, 3.0], 2);
    }
}
