//! Exact k-nearest-neighbor queries under Euclidean distance, shared by the
//! neighborhood-cleaning rule and SMOTE.

use std::cmp::Ordering;

use thiserror::Error;

use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum NeighborsError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k = {k} exceeds the {eligible} eligible reference points")]
    KTooLarge { k: usize, eligible: usize },
    #[error("query dimensionality {query} does not match reference width {reference}")]
    DimensionMismatch { query: usize, reference: usize },
}

/// Brute-force exact kNN over a fixed reference matrix.
///
/// Distances are Euclidean on raw features. Distance ties are broken toward
/// the smaller row index, so results are identical across platforms.
/// Reference values must be finite.
#[derive(Debug, Clone)]
pub struct NeighborQuery<'a, F> {
    reference: &'a Matrix<F>,
    k: usize,
    exclude_self: bool,
}

impl<'a, F: Scalar> NeighborQuery<'a, F> {
    pub fn new(
        reference: &'a Matrix<F>,
        k: usize,
        exclude_self: bool,
    ) -> Result<Self, NeighborsError> {
        if k == 0 {
            return Err(NeighborsError::ZeroK);
        }
        let eligible = reference.n_rows() - usize::from(exclude_self);
        if k > eligible {
            return Err(NeighborsError::KTooLarge { k, eligible });
        }
        Ok(Self {
            reference,
            k,
            exclude_self,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Indices of the k nearest reference rows to `query`, ascending by
    /// distance.
    ///
    /// `query_index` identifies the query's own row when the query is part of
    /// the reference set; that row is skipped when the query was built with
    /// `exclude_self`.
    pub fn knn(&self, query: &[F], query_index: Option<usize>) -> Result<Vec<usize>, NeighborsError> {
        if query.len() != self.reference.n_cols() {
            return Err(NeighborsError::DimensionMismatch {
                query: query.len(),
                reference: self.reference.n_cols(),
            });
        }
        let skip = if self.exclude_self { query_index } else { None };
        let mut scored: Vec<(F, usize)> = self
            .reference
            .rows()
            .enumerate()
            .filter(|&(i, _)| Some(i) != skip)
            .map(|(i, row)| (squared_distance(query, row), i))
            .collect();
        if self.k > scored.len() {
            return Err(NeighborsError::KTooLarge {
                k: self.k,
                eligible: scored.len(),
            });
        }
        if scored.len() > self.k {
            scored.select_nth_unstable_by(self.k - 1, pair_cmp);
            scored.truncate(self.k);
        }
        scored.sort_unstable_by(pair_cmp);
        Ok(scored.into_iter().map(|(_, i)| i).collect())
    }

    /// Convenience for querying one of the reference rows by index.
    pub fn knn_of_row(&self, row: usize) -> Result<Vec<usize>, NeighborsError> {
        self.knn(self.reference.row(row), Some(row))
    }
}

fn pair_cmp<F: Scalar>(a: &(F, usize), b: &(F, usize)) -> Ordering {
    a.0.partial_cmp(&b.0)
        .expect("distances are finite")
        .then(a.1.cmp(&b.1))
}

fn squared_distance<F: Scalar>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&[f64]]) -> Matrix<f64> {
        let n_cols = rows[0].len();
        Matrix::from_vec(rows.iter().flat_map(|r| r.iter().copied()).collect(), n_cols)
    }

    #[test]
    fn nearest_two_by_inspection() {
        let m = matrix(&[&[0.0, 0.0], &[1.0, 0.0], &[5.0, 5.0]]);
        let q = NeighborQuery::new(&m, 2, false).unwrap();
        assert_eq!(q.knn(&[0.1, 0.0], None).unwrap(), vec![0, 1]);
    }

    #[test]
    fn exclude_self_skips_own_row_only() {
        let m = matrix(&[&[0.0], &[0.0], &[3.0]]);
        let q = NeighborQuery::new(&m, 1, true).unwrap();
        // Row 1 queries itself: its duplicate at row 0 is still eligible.
        assert_eq!(q.knn_of_row(1).unwrap(), vec![0]);
        assert_eq!(q.knn_of_row(0).unwrap(), vec![1]);
    }

    #[test]
    fn ties_break_toward_smaller_index() {
        let m = matrix(&[&[1.0], &[-1.0], &[1.0]]);
        let q = NeighborQuery::new(&m, 3, false).unwrap();
        assert_eq!(q.knn(&[0.0], None).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn k_larger_than_eligible_is_rejected() {
        let m = matrix(&[&[0.0], &[1.0]]);
        assert!(matches!(
            NeighborQuery::new(&m, 2, true),
            Err(NeighborsError::KTooLarge { k: 2, eligible: 1 })
        ));
        assert!(NeighborQuery::new(&m, 2, false).is_ok());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let m = matrix(&[&[0.0, 1.0]]);
        let q = NeighborQuery::new(&m, 1, false).unwrap();
        assert!(matches!(
            q.knn(&[0.0], None),
            Err(NeighborsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distances_ascend_in_output() {
        let m = matrix(&[&[4.0], &[1.0], &[9.0], &[0.0], &[2.5]]);
        let q = NeighborQuery::new(&m, 4, false).unwrap();
        let out = q.knn(&[0.0], None).unwrap();
        let dist = |i: usize| (m.row(i)[0] as f64).abs();
        for pair in out.windows(2) {
            assert!(dist(pair[0]) <= dist(pair[1]));
        }
    }
}
