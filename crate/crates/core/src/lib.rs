//! Imbalanced-classification toolkit built around hybrid-resampled random
//! forests: every bootstrap subset is rebalanced by a neighborhood-cleaning →
//! random-undersampling → SMOTE pipeline before a CART tree is grown on it.
//! The crate also ships the plain and undersampling-balanced forest baselines,
//! single-shot samplers, confusion-matrix metrics with rank-based ROC-AUC, and
//! a stratified cross-validation harness that never resamples test folds.
//!
//! Feature-space math (distances, interpolation, split thresholds) is generic
//! over [`scalar::Scalar`] (`f32` or `f64`); counts, class probabilities, and
//! metrics are always computed in `f64`. The `*32`/`*64` aliases below pin the
//! two supported instantiations.

pub mod dataset;
pub mod ensemble;
pub mod harness;
pub mod matrix;
pub mod metrics;
pub mod neighbors;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod tree;

pub use dataset::{ClassId, ClassProfile, DataError, Dataset, FoldSplit, LabelColumn};
pub use ensemble::{EnsembleConfig, EnsembleError, ForestModel, Method};
pub use harness::{
    BenchmarkOutcome, ExperimentConfig, HarnessError, MethodId, ReportFormat, ReportRow,
};
pub use matrix::Matrix;
pub use metrics::{ConfusionMatrix, MetricsError};
pub use neighbors::{NeighborQuery, NeighborsError};
pub use sampling::{SamplerConfig, SamplingError, SamplingTrace};
pub use scalar::Scalar;
pub use tree::{DecisionTree, SplitRule, TreeError};

pub type Matrix32 = matrix::Matrix<f32>;
pub type Matrix64 = matrix::Matrix<f64>;
pub type Dataset32 = dataset::Dataset<f32>;
pub type Dataset64 = dataset::Dataset<f64>;
pub type DecisionTree32 = tree::DecisionTree<f32>;
pub type DecisionTree64 = tree::DecisionTree<f64>;
pub type ForestModel32 = ensemble::ForestModel<f32>;
pub type ForestModel64 = ensemble::ForestModel<f64>;
