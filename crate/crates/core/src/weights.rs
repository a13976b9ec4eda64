//! Finite positive weight vectors and the standard families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights θ₁..θₙ of the Luce model, indexed by 1-based label.
///
/// Weights are never renormalized implicitly; call [`WeightVector::normalize`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector {
    weights: Vec<f64>,
    #[serde(skip)]
    total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// θᵢ = n − i + 1
    Descending,
    /// θᵢ = i
    Ascending,
}

/// Tolerance on |Σθ − 1| for operations that require normalized input.
pub const NORMALIZATION_TOL: f64 = 1e-9;

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        if let Some((i, &w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidWeight { index: i + 1, value: w });
        }
        let total = neumaier_sum(&weights);
        Ok(Self { weights, total })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    /// Sukhatme weights: `n, n-1, .., 1` (descending) or `1, 2, .., n` (ascending).
    pub fn sukhatme(n: usize, orientation: Orientation) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyWeights);
        }
        let w = match orientation {
            Orientation::Descending => (1..=n).rev().map(|i| i as f64).collect(),
            Orientation::Ascending => (1..=n).map(|i| i as f64).collect(),
        };
        Self::new(w)
    }

    /// Zipf weights θᵢ = i^(−s).
    pub fn zipf(n: usize, exponent: f64) -> Result<Self> {
        if !exponent.is_finite() {
            return Err(Error::InvalidArgument(format!("zipf exponent {exponent}")));
        }
        Self::new((1..=n).map(|i| (i as f64).powf(-exponent)).collect())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// θ for a 1-based label. Panics if out of range.
    pub fn theta(&self, label: usize) -> f64 {
        self.weights[label - 1]
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn is_normalized(&self) -> bool {
        (self.total - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized { sum: self.total, tolerance: NORMALIZATION_TOL })
        }
    }

    pub fn normalize(&self) -> Self {
        let w: Vec<f64> = self.weights.iter().map(|x| x / self.total).collect();
        let total = neumaier_sum(&w);
        Self { weights: w, total }
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(self.weights.iter().map(|x| x * c).collect())
    }

    /// Weights of the given labels, in the given order.
    ///
    /// Under the full model the relative order of these labels is Luce with
    /// the returned weights.
    pub fn restrict(&self, labels: &[usize]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyWeights);
        }
        check_labels(labels, self.len())?;
        Self::new(labels.iter().map(|&l| self.theta(l)).collect())
    }

    /// Weights sorted from largest to smallest.
    pub fn sorted_descending(&self) -> Vec<f64> {
        let mut w = self.weights.clone();
        w.sort_by(|a, b| b.total_cmp(a));
        w
    }

    pub fn max(&self) -> f64 {
        self.weights.iter().copied().fold(f64::MIN, f64::max)
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            weights: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        Self::new(raw.weights).map_err(serde::de::Error::custom)
    }
}

/// Checks that labels are in `1..=n` and pairwise distinct.
pub(crate) fn check_labels(labels: &[usize], n: usize) -> Result<()> {
    let mut seen = std::collections::HashSet::with_capacity(labels.len());
    for &l in labels {
        if l == 0 || l > n {
            return Err(Error::LabelOutOfRange { label: l, n });
        }
        if !seen.insert(l) {
            return Err(Error::RepeatedLabel(l));
        }
    }
    Ok(())
}

/// Compensated summation.
pub(crate) fn neumaier_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}
