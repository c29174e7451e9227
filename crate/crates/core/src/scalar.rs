//! Floating-point scalar abstraction for feature-space arithmetic.

use std::fmt::{Debug, Display};

use num_traits::{Float, NumCast};
use serde::{de::DeserializeOwned, Serialize};

/// Feature-space scalar: `f32` or `f64`.
///
/// Only feature values, distances, and split thresholds are generic over this
/// trait; counts, class probabilities, and metrics stay in `f64`.
pub trait Scalar:
    Float + Debug + Display + Serialize + DeserializeOwned + Send + Sync + 'static
{
    /// Widens to `f64` for reporting and mixed count/feature arithmetic.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar is representable as f64")
    }

    /// Narrows from `f64`, used when feeding PRNG draws into feature space.
    fn from_f64_lossy(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("f64 is representable in the scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
