//! Confusion-matrix metrics and rank-based ROC-AUC. The minority class is
//! the positive class throughout; every 0/0 form evaluates to 0 so fold
//! averages stay well-defined.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ClassId;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("label vectors have different lengths: {truth} vs {predicted}")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("ROC-AUC is undefined when only one class is present")]
    SingleClass,
    #[error("non-finite score at index {0}")]
    NonFiniteScore(usize),
}

/// 2x2 tally with the minority class as positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// true positives
    pub tpc: usize,
    /// false negatives
    pub fnc: usize,
    /// false positives
    pub fpc: usize,
    /// true negatives
    pub tnc: usize,
}

impl ConfusionMatrix {
    pub fn new(tpc: usize, fnc: usize, fpc: usize, tnc: usize) -> Self {
        Self { tpc, fnc, fpc, tnc }
    }

    /// Tallies predictions against truth, with `positive` as the positive
    /// class.
    pub fn from_predictions(
        y_true: &[ClassId],
        y_pred: &[ClassId],
        positive: ClassId,
    ) -> Result<Self, MetricsError> {
        if y_true.len() != y_pred.len() {
            return Err(MetricsError::LengthMismatch {
                truth: y_true.len(),
                predicted: y_pred.len(),
            });
        }
        let mut cm = Self::new(0, 0, 0, 0);
        for (&t, &p) in y_true.iter().zip(y_pred) {
            match (t == positive, p == positive) {
                (true, true) => cm.tpc += 1,
                (true, false) => cm.fnc += 1,
                (false, true) => cm.fpc += 1,
                (false, false) => cm.tnc += 1,
            }
        }
        Ok(cm)
    }

    pub fn total(&self) -> usize {
        self.tpc + self.fnc + self.fpc + self.tnc
    }

    /// The same outcomes with the positive/negative roles exchanged.
    pub fn swap_classes(&self) -> Self {
        Self {
            tpc: self.tnc,
            fnc: self.fpc,
            fpc: self.fnc,
            tnc: self.tpc,
        }
    }

    /// Matthews correlation coefficient in [-1, 1]; 0 when any denominator
    /// factor vanishes. Intermediate products are taken in 128-bit integers
    /// so large folds cannot overflow.
    pub fn mcc(&self) -> f64 {
        let (tp, fn_, fp, tn) = (
            self.tpc as u128,
            self.fnc as u128,
            self.fpc as u128,
            self.tnc as u128,
        );
        let den = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
        if den == 0 {
            return 0.0;
        }
        let num = (tp * tn) as i128 - (fp * fn_) as i128;
        num as f64 / (den as f64).sqrt()
    }

    /// True-positive rate `tp / (tp + fn)` (a.k.a. recall).
    pub fn sensitivity(&self) -> f64 {
        ratio(self.tpc, self.tpc + self.fnc)
    }

    /// True-negative rate `tn / (tn + fp)`.
    pub fn specificity(&self) -> f64 {
        ratio(self.tnc, self.tnc + self.fpc)
    }

    /// Positive predictive value `tp / (tp + fp)`.
    pub fn precision(&self) -> f64 {
        ratio(self.tpc, self.tpc + self.fpc)
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tpc + self.tnc, self.total())
    }

    /// Harmonic mean of precision and sensitivity.
    pub fn f1(&self) -> f64 {
        let p = self.precision();
        let s = self.sensitivity();
        if p + s == 0.0 {
            0.0
        } else {
            2.0 * p * s / (p + s)
        }
    }

    /// Geometric mean of sensitivity and specificity.
    pub fn gmean(&self) -> f64 {
        (self.sensitivity() * self.specificity()).sqrt()
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Rank-based (Mann–Whitney) ROC-AUC with midranks for tied scores:
/// `AUC = (R+ - n+(n+ + 1)/2) / (n+ * n-)` where `R+` is the rank sum of the
/// positive class.
pub fn roc_auc(
    y_true: &[ClassId],
    minority_scores: &[f64],
    positive: ClassId,
) -> Result<f64, MetricsError> {
    if y_true.len() != minority_scores.len() {
        return Err(MetricsError::LengthMismatch {
            truth: y_true.len(),
            predicted: minority_scores.len(),
        });
    }
    if let Some(i) = minority_scores.iter().position(|s| !s.is_finite()) {
        return Err(MetricsError::NonFiniteScore(i));
    }
    let n_pos = y_true.iter().filter(|&&l| l == positive).count();
    let n_neg = y_true.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(MetricsError::SingleClass);
    }

    let mut order: Vec<usize> = (0..y_true.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        minority_scores[a]
            .partial_cmp(&minority_scores[b])
            .expect("finite scores")
            .then(a.cmp(&b))
    });

    // Midranks: tied scores share the average of their 1-based rank range.
    let mut rank_sum_pos = 0.0f64;
    let mut lo = 0usize;
    while lo < order.len() {
        let mut hi = lo;
        while hi + 1 < order.len()
            && minority_scores[order[hi + 1]] == minority_scores[order[lo]]
        {
            hi += 1;
        }
        let midrank = (lo + hi + 2) as f64 / 2.0;
        for &idx in &order[lo..=hi] {
            if y_true[idx] == positive {
                rank_sum_pos += midrank;
            }
        }
        lo = hi + 1;
    }

    let n_pos_f = n_pos as f64;
    Ok((rank_sum_pos - n_pos_f * (n_pos_f + 1.0) / 2.0) / (n_pos_f * n_neg as f64))
}
