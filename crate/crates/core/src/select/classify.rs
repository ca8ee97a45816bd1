//! One-dimensional linear discriminant: with equal priors and pooled
//! variance the decision boundary is the midpoint of the two class means.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SelectionError;
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdClassifier {
    pub threshold: f64,
    /// Side of the threshold predicted as the positive class (`true` label).
    pub positive_side: Side,
    pub trained_on: String,
}

impl ThresholdClassifier {
    /// Values exactly at the threshold fall on the positive side.
    pub fn predict(&self, v: f64) -> bool {
        match self.positive_side {
            Side::Above => v >= self.threshold,
            Side::Below => v <= self.threshold,
        }
    }
}

fn class_means(values: &[f64], labels: &[bool]) -> Result<(f64, f64), SelectionError> {
    if values.len() != labels.len() {
        return Err(SelectionError::LengthMismatch {
            values: values.len(),
            labels: labels.len(),
        });
    }
    let (mut s0, mut n0, mut s1, mut n1) = (0.0, 0usize, 0.0, 0usize);
    for (&v, &l) in values.iter().zip(labels) {
        if l {
            s1 += v;
            n1 += 1;
        } else {
            s0 += v;
            n0 += 1;
        }
    }
    if n0 == 0 || n1 == 0 {
        return Err(SelectionError::MissingClass);
    }
    Ok((s0 / n0 as f64, s1 / n1 as f64))
}

/// Threshold at the midpoint of the class means; the positive side points
/// toward the positive class mean (above on ties).
pub fn fit_threshold_classifier(
    values: &[f64],
    labels: &[bool],
) -> Result<ThresholdClassifier, SelectionError> {
    let (m0, m1) = class_means(values, labels)?;
    Ok(ThresholdClassifier {
        threshold: (m0 + m1) / 2.0,
        positive_side: if m1 < m0 { Side::Below } else { Side::Above },
        trained_on: String::new(),
    })
}

/// Fraction of samples predicted into the wrong class.
pub fn misclassification_rate(c: &ThresholdClassifier, values: &[f64], labels: &[bool]) -> f64 {
    let wrong = values
        .iter()
        .zip(labels)
        .filter(|(&v, &l)| c.predict(v) != l)
        .count();
    wrong as f64 / values.len() as f64
}

fn in_sample_rate(values: &[f64], labels: &[bool]) -> Result<f64, SelectionError> {
    let c = fit_threshold_classifier(values, labels)?;
    Ok(misclassification_rate(&c, values, labels))
}

/// Observed in-sample rate and the rates after refitting on `n_perm` seeded
/// label shuffles.
pub fn permutation_null(
    values: &[f64],
    labels: &[bool],
    n_perm: usize,
    seed: u64,
) -> Result<(f64, Vec<f64>), SelectionError> {
    let observed = in_sample_rate(values, labels)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = labels.to_vec();
    let null = (0..n_perm)
        .map(|_| {
            shuffled.shuffle(&mut rng);
            in_sample_rate(values, &shuffled)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((observed, null))
}

/// `(1 + #{null rate <= observed}) / (n_perm + 1)`.
pub fn empirical_pvalue(observed: f64, null: &[f64]) -> f64 {
    let hits = null.iter().filter(|&&r| r <= observed).count();
    (1 + hits) as f64 / (null.len() + 1) as f64
}

/// Lower-tail probability of `observed` under a normal distribution fitted
/// to the permutation rates. Falls back to [`empirical_pvalue`] when the
/// null has no spread.
pub fn gaussian_null_pvalue(observed: f64, null: &[f64]) -> f64 {
    let sd = math::sample_std(null);
    if !(sd > 0.0) {
        return empirical_pvalue(observed, null);
    }
    let z = (observed - math::mean(null)) / sd;
    let p = 0.5 * libm::erfc(-z / core::f64::consts::SQRT_2);
    p.clamp(f64::MIN_POSITIVE, 1.0)
}

/// Label-permutation p-value of the in-sample misclassification rate.
pub fn permutation_pvalue(
    values: &[f64],
    labels: &[bool],
    n_perm: usize,
    seed: u64,
) -> Result<f64, SelectionError> {
    let (observed, null) = permutation_null(values, labels, n_perm, seed)?;
    Ok(empirical_pvalue(observed, &null))
}

/// How a permutation null is turned into a p-value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PValueMethod {
    /// Rank of the observed rate among the permutation rates; bounded below
    /// by `1 / (n_perm + 1)`.
    Empirical,
    /// Normal tail fitted to the permutation rates.
    GaussianNull,
}

impl PValueMethod {
    pub fn pvalue(&self, observed: f64, null: &[f64]) -> f64 {
        match self {
            PValueMethod::Empirical => empirical_pvalue(observed, null),
            PValueMethod::GaussianNull => gaussian_null_pvalue(observed, null),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PValueMethod::Empirical => "empirical",
            PValueMethod::GaussianNull => "gaussian",
        }
    }
}
