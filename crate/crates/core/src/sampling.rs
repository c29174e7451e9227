//! The three elementary samplers (neighborhood cleaning, random
//! undersampling, SMOTE) and the hybrid pipeline that chains them to produce
//! an exactly balanced subset.
//!
//! All samplers are pure functions of `(input, config, seed)`: identical
//! inputs and stream state produce bit-identical outputs, so subsets may be
//! resampled concurrently with independent streams.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::Rng;

use crate::dataset::{ClassId, DataError, Dataset};
use crate::neighbors::{NeighborQuery, NeighborsError};
use crate::rng::StreamRng;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("invalid sampler config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Neighbors(#[from] NeighborsError),
    #[error("undersample fraction {0} is outside [0, 1)")]
    InvalidFraction(f64),
    #[error("undersampling would leave no majority samples")]
    EmptyMajority,
    #[error("cannot undersample majority from {current} to {target}")]
    InvalidUndersampleTarget { current: usize, target: usize },
    #[error("SMOTE target {target} is below the current minority count {current}")]
    TargetBelowCurrent { target: usize, current: usize },
}

/// Knobs of the hybrid sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Neighbor count for the neighborhood-cleaning vote.
    pub nc_k: usize,
    /// Fraction of post-cleaning majority samples removed by random
    /// undersampling; exactly `floor(rus_fraction * n_majority)` rows go.
    pub rus_fraction: f64,
    /// Neighbor count for SMOTE interpolation.
    pub smote_k: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            nc_k: 3,
            rus_fraction: 0.20,
            smote_k: 5,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), SamplingError> {
        if self.nc_k == 0 {
            return Err(SamplingError::InvalidConfig("nc_k must be >= 1".into()));
        }
        if self.smote_k == 0 {
            return Err(SamplingError::InvalidConfig("smote_k must be >= 1".into()));
        }
        if !self.rus_fraction.is_finite() || !(0.0..1.0).contains(&self.rus_fraction) {
            return Err(SamplingError::InvalidConfig(format!(
                "rus_fraction {} must lie in [0, 1)",
                self.rus_fraction
            )));
        }
        Ok(())
    }
}

/// Per-stage record of one [`hybrid_resample`] run. Index lists refer to rows
/// of the dataset passed in, so the NC and RUS removal sets are disjoint by
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingTrace {
    pub removed_by_nc: Vec<usize>,
    pub removed_by_rus: Vec<usize>,
    pub synthetic_count: usize,
    pub final_minority: usize,
    pub final_majority: usize,
    /// Neighborhood cleaning was skipped: a class was too small for the vote,
    /// or cleaning would have emptied the majority class.
    pub nc_skipped: bool,
    /// Neighbor count actually used by SMOTE after the small-minority
    /// fallback (0 when nothing was synthesized).
    pub smote_k_used: usize,
    /// The synthesizing class had a single sample, so synthetics are copies
    /// of it.
    pub smote_duplicated: bool,
}

/// Applies the neighborhood-cleaning rule with a `k`-neighbor vote.
///
/// For every sample, its k nearest neighbors (self excluded) vote by simple
/// majority. A majority-class sample misclassified by the vote is marked; for
/// a misclassified minority-class sample, every majority-class sample among
/// its neighbors is marked. Marks are computed against the original set in
/// one pass and applied at once; minority samples are never removed.
///
/// Returns the cleaned dataset and the removed row indices, ascending. The
/// operation is the identity when either class has `k` or fewer samples, or
/// when cleaning would empty the majority class.
pub fn neighborhood_clean<F: Scalar>(
    data: &Dataset<F>,
    k: usize,
) -> Result<(Dataset<F>, Vec<usize>), SamplingError> {
    let (cleaned, removed, _skipped) = neighborhood_clean_impl(data, k)?;
    Ok((cleaned, removed))
}

fn neighborhood_clean_impl<F: Scalar>(
    data: &Dataset<F>,
    k: usize,
) -> Result<(Dataset<F>, Vec<usize>, bool), SamplingError> {
    if k == 0 {
        return Err(SamplingError::InvalidConfig("nc_k must be >= 1".into()));
    }
    let profile = data.profile()?;
    if profile.n_minority <= k || profile.n_majority <= k {
        log::warn!(
            "neighborhood cleaning skipped: class counts {}/{} too small for k = {k}",
            profile.n_minority,
            profile.n_majority
        );
        return Ok((data.clone(), Vec::new(), true));
    }

    let query = NeighborQuery::new(data.features(), k, true)?;
    let n = data.n_samples();
    let mut marked = vec![false; n];
    for i in 0..n {
        let neighbors = query.knn_of_row(i)?;
        let own = data.label(i);
        let disagreeing = neighbors
            .iter()
            .filter(|&&j| data.label(j) != own)
            .count();
        // Simple majority: misclassified only when strictly more than half of
        // the neighbors carry the other label.
        if 2 * disagreeing <= k {
            continue;
        }
        if own == profile.majority {
            marked[i] = true;
        } else {
            for &j in &neighbors {
                if data.label(j) == profile.majority {
                    marked[j] = true;
                }
            }
        }
    }

    let removed: Vec<usize> = (0..n).filter(|&i| marked[i]).collect();
    if removed.len() == profile.n_majority {
        log::warn!("neighborhood cleaning skipped: it would remove every majority sample");
        return Ok((data.clone(), Vec::new(), true));
    }
    let kept: Vec<usize> = (0..n).filter(|&i| !marked[i]).collect();
    Ok((data.subset(&kept), removed, false))
}

/// Removes exactly `floor(fraction * n_majority)` majority samples, chosen
/// uniformly without replacement from the stream. Minority rows are
/// untouched. Returns the reduced dataset and the removed row indices,
/// ascending.
pub fn random_undersample<F: Scalar>(
    data: &Dataset<F>,
    fraction: f64,
    rng: &mut StreamRng,
) -> Result<(Dataset<F>, Vec<usize>), SamplingError> {
    if !fraction.is_finite() || !(0.0..1.0).contains(&fraction) {
        return Err(SamplingError::InvalidFraction(fraction));
    }
    let profile = data.profile()?;
    let remove_count = (fraction * profile.n_majority as f64).floor() as usize;
    remove_random_of_class(data, profile.majority, remove_count, rng)
}

/// Removes uniformly chosen majority samples until exactly `target_majority`
/// remain. Used by the balanced-forest baseline and the single-shot RUS
/// method, both of which undersample to the minority count.
pub fn undersample_majority_to<F: Scalar>(
    data: &Dataset<F>,
    target_majority: usize,
    rng: &mut StreamRng,
) -> Result<(Dataset<F>, Vec<usize>), SamplingError> {
    let profile = data.profile()?;
    if target_majority > profile.n_majority {
        return Err(SamplingError::InvalidUndersampleTarget {
            current: profile.n_majority,
            target: target_majority,
        });
    }
    if target_majority == 0 {
        return Err(SamplingError::EmptyMajority);
    }
    let remove_count = profile.n_majority - target_majority;
    remove_random_of_class(data, profile.majority, remove_count, rng)
}

fn remove_random_of_class<F: Scalar>(
    data: &Dataset<F>,
    class: ClassId,
    remove_count: usize,
    rng: &mut StreamRng,
) -> Result<(Dataset<F>, Vec<usize>), SamplingError> {
    let class_rows = data.class_indices(class);
    if remove_count >= class_rows.len() && remove_count > 0 {
        return Err(SamplingError::EmptyMajority);
    }
    let mut removed: Vec<usize> = rand::seq::index::sample(rng, class_rows.len(), remove_count)
        .into_iter()
        .map(|j| class_rows[j])
        .collect();
    removed.sort_unstable();
    let mut is_removed = vec![false; data.n_samples()];
    for &i in &removed {
        is_removed[i] = true;
    }
    let kept: Vec<usize> = (0..data.n_samples()).filter(|&i| !is_removed[i]).collect();
    Ok((data.subset(&kept), removed))
}

struct SmoteDetail {
    k_used: usize,
    duplicated: bool,
}

/// Appends `target_minority_count - n_minority` synthetic minority rows.
///
/// Each synthetic sample is `x + g * (x_nn - x)` where `x` cycles round-robin
/// through the minority rows in index order, `x_nn` is a uniformly chosen one
/// of its k nearest minority neighbors (computed once on the original
/// minority set), and `g` is uniform on [0, 1] from the stream. When fewer
/// than `k + 1` minority rows exist the neighbor count shrinks to
/// `n_minority - 1`; a single minority row is duplicated outright.
pub fn smote<F: Scalar>(
    data: &Dataset<F>,
    k: usize,
    target_minority_count: usize,
    rng: &mut StreamRng,
) -> Result<Dataset<F>, SamplingError> {
    smote_impl(data, k, target_minority_count, rng).map(|(d, _)| d)
}

fn smote_impl<F: Scalar>(
    data: &Dataset<F>,
    k: usize,
    target_minority_count: usize,
    rng: &mut StreamRng,
) -> Result<(Dataset<F>, SmoteDetail), SamplingError> {
    if k == 0 {
        return Err(SamplingError::InvalidConfig("smote_k must be >= 1".into()));
    }
    let profile = data.profile()?;
    let minority_rows = data.class_indices(profile.minority);
    let m = minority_rows.len();
    if target_minority_count < m {
        return Err(SamplingError::TargetBelowCurrent {
            target: target_minority_count,
            current: m,
        });
    }
    let n_synthetic = target_minority_count - m;
    let mut out = data.clone();
    if n_synthetic == 0 {
        return Ok((
            out,
            SmoteDetail {
                k_used: 0,
                duplicated: false,
            },
        ));
    }
    if m == 1 {
        let row = data.row(minority_rows[0]).to_vec();
        for _ in 0..n_synthetic {
            out.push_row(&row, profile.minority);
        }
        return Ok((
            out,
            SmoteDetail {
                k_used: 0,
                duplicated: true,
            },
        ));
    }

    let k_used = k.min(m - 1);
    let minority_matrix = data.features().select_rows(&minority_rows);
    let query = NeighborQuery::new(&minority_matrix, k_used, true)?;
    let neighbors: Vec<Vec<usize>> = (0..m)
        .map(|i| query.knn_of_row(i))
        .collect::<Result<_, _>>()?;

    for s in 0..n_synthetic {
        let seed_local = s % m;
        let nn_local = neighbors[seed_local][rng.random_range(0..k_used)];
        let g = F::from_f64_lossy(rng.random::<f64>());
        let a = minority_matrix.row(seed_local);
        let b = minority_matrix.row(nn_local);
        let row: Vec<F> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| interpolate(x, y, g))
            .collect();
        out.push_row(&row, profile.minority);
    }
    Ok((
        out,
        SmoteDetail {
            k_used,
            duplicated: false,
        },
    ))
}

fn interpolate<F: Scalar>(a: F, b: F, g: F) -> F {
    a + g * (b - a)
}

/// Runs the hybrid pipeline on one subset: neighborhood cleaning, then random
/// undersampling of the post-cleaning majority, then SMOTE up to the
/// post-undersampling majority count. The result has exactly equal class
/// counts; the trace records every stage.
///
/// Class roles are fixed by the input's profile for the whole pipeline, so
/// cleaning and undersampling always act on the original majority class. If
/// undersampling pushes the majority below the minority count, the final
/// SMOTE stage synthesizes whichever class is rarer at that point, matching
/// the count-based balancing of the reference sampling libraries.
pub fn hybrid_resample<F: Scalar>(
    data: &Dataset<F>,
    config: &SamplerConfig,
    rng: &mut StreamRng,
) -> Result<(Dataset<F>, SamplingTrace), SamplingError> {
    config.validate()?;
    let entry = data.profile()?;

    let (after_nc, removed_by_nc, nc_skipped) = neighborhood_clean_impl(data, config.nc_k)?;
    let kept_after_nc: Vec<usize> = {
        let mut removed_mark = vec![false; data.n_samples()];
        for &i in &removed_by_nc {
            removed_mark[i] = true;
        }
        (0..data.n_samples()).filter(|&i| !removed_mark[i]).collect()
    };

    let majority_after_nc = after_nc.class_counts()[entry.majority.index()];
    let remove_count = (config.rus_fraction * majority_after_nc as f64).floor() as usize;
    let (after_rus, removed_local) =
        remove_random_of_class(&after_nc, entry.majority, remove_count, rng)?;
    let removed_by_rus: Vec<usize> = removed_local.iter().map(|&j| kept_after_nc[j]).collect();

    let counts = after_rus.class_counts();
    let target = counts[0].max(counts[1]);
    let synthetic_count = target - counts[0].min(counts[1]);
    let (balanced, detail) = smote_impl(&after_rus, config.smote_k, target, rng)?;

    let final_counts = balanced.class_counts();
    let trace = SamplingTrace {
        removed_by_nc,
        removed_by_rus,
        synthetic_count,
        final_minority: final_counts[entry.minority.index()],
        final_majority: final_counts[entry.majority.index()],
        nc_skipped,
        smote_k_used: detail.k_used,
        smote_duplicated: detail.duplicated,
    };
    debug_assert_eq!(trace.final_minority, trace.final_majority);
    Ok((balanced, trace))
}
