//! Data model, file ingestion (KEEL/CSV), class profiling, and stratified
//! fold splitting.

mod csv_io;
mod keel;

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::rng::{derive_seed, stream};
use crate::scalar::Scalar;

pub use csv_io::LabelColumn;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("expected exactly 2 classes, found {}: {found:?}", found.len())]
    ClassCardinality { found: Vec<String> },
    #[error("non-numeric value {value:?} for feature {column:?} at line {line}")]
    NonNumeric {
        line: usize,
        column: String,
        value: String,
    },
    #[error("missing value at row {row}, column {column:?}")]
    MissingValue { row: usize, column: String },
    #[error("label column {name:?} not found; available columns: {available:?}")]
    MissingLabelColumn {
        name: String,
        available: Vec<String>,
    },
    #[error("class {label:?} has {count} samples, fewer than the {folds} requested folds")]
    Stratification {
        label: String,
        count: usize,
        folds: usize,
    },
    #[error("dataset has a single class; two are required")]
    SingleClass,
    #[error("invalid dataset: {0}")]
    Invalid(String),
}

/// Identifier of one of the two classes; indexes into `Dataset::label_names`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassId(u8);

impl ClassId {
    pub const FIRST: ClassId = ClassId(0);
    pub const SECOND: ClassId = ClassId(1);

    pub fn from_index(i: usize) -> Option<ClassId> {
        match i {
            0 => Some(ClassId(0)),
            1 => Some(ClassId(1)),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        usize::from(self.0)
    }

    /// The opposite class.
    pub fn other(self) -> ClassId {
        ClassId(1 - self.0)
    }
}

/// Feature matrix with binary labels; the unit flowing through every
/// sampling and training stage.
///
/// Invariants, enforced at construction: the feature row count equals the
/// label count, every feature cell is finite, and there is at least one
/// feature column. Loaders additionally guarantee that both classes are
/// present. A `Dataset` is immutable afterwards and safe to share across
/// threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset<F> {
    features: Matrix<F>,
    labels: Vec<ClassId>,
    feature_names: Vec<String>,
    label_names: [String; 2],
}

/// Minority/majority identification for a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassProfile {
    pub minority: ClassId,
    pub majority: ClassId,
    pub n_minority: usize,
    pub n_majority: usize,
    /// `n_majority / n_minority`; 1 means balanced.
    pub imbalance_ratio: f64,
}

/// One train/test split of a stratified k-fold partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub fold_id: usize,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

impl<F: Scalar> Dataset<F> {
    pub fn new(
        features: Matrix<F>,
        labels: Vec<ClassId>,
        feature_names: Vec<String>,
        label_names: [String; 2],
    ) -> Result<Self, DataError> {
        if features.n_rows() != labels.len() {
            return Err(DataError::Invalid(format!(
                "feature rows ({}) != labels ({})",
                features.n_rows(),
                labels.len()
            )));
        }
        if feature_names.len() != features.n_cols() {
            return Err(DataError::Invalid(format!(
                "feature names ({}) != feature columns ({})",
                feature_names.len(),
                features.n_cols()
            )));
        }
        if let Some(pos) = features.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(DataError::Invalid(format!(
                "non-finite feature value at row {}, column {}",
                pos / features.n_cols(),
                pos % features.n_cols()
            )));
        }
        Ok(Self {
            features,
            labels,
            feature_names,
            label_names,
        })
    }

    /// Loads a KEEL `.dat` file; the class attribute is the last column.
    pub fn load_keel(path: impl AsRef<Path>) -> Result<Self, DataError> {
        keel::load(path.as_ref())
    }

    /// Loads an RFC-4180-style CSV with a mandatory header row.
    pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn) -> Result<Self, DataError> {
        csv_io::load(path.as_ref(), label)
    }

    /// Writes the dataset as a CSV with the label in a trailing `class`
    /// column. `load_csv` of the output reproduces the dataset.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        csv_io::write(self, path.as_ref())
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_cols()
    }

    pub fn features(&self) -> &Matrix<F> {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[F] {
        self.features.row(i)
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> ClassId {
        self.labels[i]
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn label_names(&self) -> &[String; 2] {
        &self.label_names
    }

    pub fn label_name(&self, class: ClassId) -> &str {
        &self.label_names[class.index()]
    }

    /// Row indices belonging to `class`, ascending.
    pub fn class_indices(&self, class: ClassId) -> Vec<usize> {
        (0..self.n_samples())
            .filter(|&i| self.labels[i] == class)
            .collect()
    }

    /// Sample counts per class id.
    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0usize; 2];
        for label in &self.labels {
            counts[label.index()] += 1;
        }
        counts
    }

    /// New dataset holding the given rows, in order (duplicates allowed).
    /// Feature and label names are preserved, so class ids keep their meaning.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            label_names: self.label_names.clone(),
        }
    }

    pub(crate) fn push_row(&mut self, row: &[F], label: ClassId) {
        self.features.push_row(row);
        self.labels.push(label);
    }

    /// Identifies the minority and majority classes.
    ///
    /// The minority is the class with strictly fewer samples; a tie is broken
    /// toward the lexicographically smaller label name. Errors if only one
    /// class is present.
    pub fn profile(&self) -> Result<ClassProfile, DataError> {
        let counts = self.class_counts();
        if counts[0] == 0 || counts[1] == 0 {
            return Err(DataError::SingleClass);
        }
        let minority = match counts[0].cmp(&counts[1]) {
            std::cmp::Ordering::Less => ClassId::FIRST,
            std::cmp::Ordering::Greater => ClassId::SECOND,
            std::cmp::Ordering::Equal => {
                if self.label_names[0] <= self.label_names[1] {
                    ClassId::FIRST
                } else {
                    ClassId::SECOND
                }
            }
        };
        let majority = minority.other();
        let n_minority = counts[minority.index()];
        let n_majority = counts[majority.index()];
        Ok(ClassProfile {
            minority,
            majority,
            n_minority,
            n_majority,
            imbalance_ratio: n_majority as f64 / n_minority as f64,
        })
    }

    /// Stratified k-fold split: per-class indices are shuffled by a seeded
    /// PRNG and dealt round-robin into `k` folds, so every fold's class
    /// counts are within one of `count / k`.
    pub fn stratified_kfold(&self, k: usize, seed: u64) -> Result<Vec<FoldSplit>, DataError> {
        if k < 2 {
            return Err(DataError::Invalid(format!("fold count {k} must be >= 2")));
        }
        let mut rng = stream(derive_seed(seed, "stratified-kfold", 0));
        let mut test_sets: Vec<Vec<usize>> = vec![Vec::new(); k];
        for class in [ClassId::FIRST, ClassId::SECOND] {
            let mut indices = self.class_indices(class);
            if indices.len() < k {
                return Err(DataError::Stratification {
                    label: self.label_name(class).to_owned(),
                    count: indices.len(),
                    folds: k,
                });
            }
            indices.shuffle(&mut rng);
            for (pos, idx) in indices.into_iter().enumerate() {
                test_sets[pos % k].push(idx);
            }
        }
        let n = self.n_samples();
        let mut fold_of = vec![0usize; n];
        for (fold_id, test) in test_sets.iter().enumerate() {
            for &i in test {
                fold_of[i] = fold_id;
            }
        }
        Ok(test_sets
            .into_iter()
            .enumerate()
            .map(|(fold_id, mut test)| {
                test.sort_unstable();
                let train = (0..n).filter(|&i| fold_of[i] != fold_id).collect();
                FoldSplit {
                    fold_id,
                    train_indices: train,
                    test_indices: test,
                }
            })
            .collect())
    }
}

/// Maps the two distinct class strings to ids: the lexicographically smaller
/// name becomes `ClassId::FIRST`.
pub(crate) fn assign_label_ids(
    raw_labels: &[String],
) -> Result<(Vec<ClassId>, [String; 2]), DataError> {
    let mut distinct: Vec<&str> = Vec::new();
    for l in raw_labels {
        if !distinct.contains(&l.as_str()) {
            distinct.push(l);
        }
    }
    if distinct.len() != 2 {
        return Err(DataError::ClassCardinality {
            found: distinct.into_iter().map(str::to_owned).collect(),
        });
    }
    distinct.sort_unstable();
    let names: [String; 2] = [distinct[0].to_owned(), distinct[1].to_owned()];
    let labels = raw_labels
        .iter()
        .map(|l| {
            if l == &names[0] {
                ClassId::FIRST
            } else {
                ClassId::SECOND
            }
        })
        .collect();
    Ok((labels, names))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n_a: usize, n_b: usize) -> Dataset<f64> {
        let n = n_a + n_b;
        let features = Matrix::from_vec((0..n).map(|i| i as f64).collect(), 1);
        let labels = (0..n)
            .map(|i| {
                if i < n_a {
                    ClassId::FIRST
                } else {
                    ClassId::SECOND
                }
            })
            .collect();
        Dataset::new(
            features,
            labels,
            vec!["x".into()],
            ["alpha".into(), "beta".into()],
        )
        .unwrap()
    }

    #[test]
    fn profile_counts_and_ratio() {
        // 90 "alpha" vs 10 "beta": beta is the minority, IR = 9.
        let d = toy(90, 10);
        let p = d.profile().unwrap();
        assert_eq!(p.minority, ClassId::SECOND);
        assert_eq!(p.majority, ClassId::FIRST);
        assert_eq!(p.n_minority, 10);
        assert_eq!(p.n_majority, 90);
        assert_eq!(p.imbalance_ratio, 9.0);
    }

    #[test]
    fn profile_tie_prefers_lexicographically_smaller_name() {
        let d = toy(50, 50);
        let p = d.profile().unwrap();
        assert_eq!(d.label_name(p.minority), "alpha");
        assert_eq!(p.imbalance_ratio, 1.0);
    }

    #[test]
    fn profile_integer_ratio() {
        let d = toy(55, 11);
        let p = d.profile().unwrap();
        assert_eq!(p.imbalance_ratio, 5.0);
    }

    #[test]
    fn profile_rejects_single_class() {
        let features = Matrix::from_vec(vec![1.0f64, 2.0], 1);
        let d = Dataset::new(
            features,
            vec![ClassId::FIRST, ClassId::FIRST],
            vec!["x".into()],
            ["a".into(), "b".into()],
        )
        .unwrap();
        assert!(matches!(d.profile(), Err(DataError::SingleClass)));
    }

    #[test]
    fn new_rejects_non_finite_features() {
        let features = Matrix::from_vec(vec![1.0f64, f64::NAN], 1);
        let r = Dataset::new(
            features,
            vec![ClassId::FIRST, ClassId::SECOND],
            vec!["x".into()],
            ["a".into(), "b".into()],
        );
        assert!(matches!(r, Err(DataError::Invalid(_))));
    }

    #[test]
    fn stratified_kfold_exact_division() {
        // 10 minority + 90 majority, k=5: every test fold holds exactly
        // 2 minority and 18 majority.
        let d = toy(90, 10);
        let folds = d.stratified_kfold(5, 42).unwrap();
        assert_eq!(folds.len(), 5);
        for fold in &folds {
            let minority = fold
                .test_indices
                .iter()
                .filter(|&&i| d.label(i) == ClassId::SECOND)
                .count();
            assert_eq!(minority, 2);
            assert_eq!(fold.test_indices.len(), 20);
            assert_eq!(fold.train_indices.len(), 80);
        }
    }

    #[test]
    fn stratified_kfold_pigeonhole() {
        let d = toy(60, 11);
        let folds = d.stratified_kfold(5, 1).unwrap();
        for fold in &folds {
            let minority = fold
                .test_indices
                .iter()
                .filter(|&&i| d.label(i) == ClassId::SECOND)
                .count();
            assert!((2..=3).contains(&minority), "minority = {minority}");
        }
    }

    #[test]
    fn stratified_kfold_is_deterministic() {
        let d = toy(40, 9);
        assert_eq!(
            d.stratified_kfold(3, 7).unwrap(),
            d.stratified_kfold(3, 7).unwrap()
        );
    }

    #[test]
    fn stratified_kfold_partitions_exactly() {
        let d = toy(23, 12);
        let folds = d.stratified_kfold(4, 99).unwrap();
        let mut all: Vec<usize> = folds.iter().flat_map(|f| f.test_indices.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..35).collect::<Vec<_>>());
        for fold in &folds {
            assert!(fold.train_indices.iter().all(|i| !fold.test_indices.contains(i)));
        }
    }

    #[test]
    fn stratified_kfold_rejects_small_class() {
        let d = toy(20, 3);
        let err = d.stratified_kfold(5, 0).unwrap_err();
        assert!(matches!(err, DataError::Stratification { count: 3, folds: 5, .. }));
    }
}
