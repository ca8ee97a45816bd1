//! Uniformly sampled series with an explicit missing-value mask, plus the
//! gap interpolation and trimming applied before feature extraction.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

/// FHR recordings are sampled at 4 Hz.
pub const FHR_SAMPLE_RATE_HZ: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SeriesError {
    #[error("series is empty")]
    Empty,
    #[error("values ({values}) and missing mask ({mask}) differ in length")]
    LengthMismatch { values: usize, mask: usize },
    #[error("sample rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("sample {index} is not finite and not marked missing")]
    NonFiniteSample { index: usize },
    #[error("series contains missing samples")]
    MissingValues,
    #[error("series has zero variance")]
    DegenerateSeries,
    #[error("lag {lag} is not smaller than the series length {len}")]
    LagTooLarge { lag: usize, len: usize },
    #[error("need at least {needed} histogram bins, got {got}")]
    TooFewBins { needed: usize, got: usize },
}

#[derive(Clone, Debug)]
pub struct TimeSeries {
    id: String,
    /// Missing positions hold NaN.
    values: Vec<f64>,
    missing: Vec<bool>,
    sample_rate_hz: f64,
}

/// Equal when ids, rates and every sample (missing or value) agree.
impl PartialEq for TimeSeries {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.sample_rate_hz == other.sample_rate_hz
            && self.missing == other.missing
            && self
                .values
                .iter()
                .zip(&other.values)
                .zip(&self.missing)
                .all(|((a, b), &m)| m || a == b)
    }
}

impl TimeSeries {
    pub fn new(
        id: impl Into<String>,
        values: Vec<f64>,
        missing: Vec<bool>,
        sample_rate_hz: f64,
    ) -> Result<Self, SeriesError> {
        if values.is_empty() {
            return Err(SeriesError::Empty);
        }
        if values.len() != missing.len() {
            return Err(SeriesError::LengthMismatch {
                values: values.len(),
                mask: missing.len(),
            });
        }
        if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
            return Err(SeriesError::NonPositiveRate(sample_rate_hz));
        }
        let mut values = values;
        for (i, (v, &m)) in values.iter_mut().zip(&missing).enumerate() {
            if m {
                *v = f64::NAN;
            } else if !v.is_finite() {
                return Err(SeriesError::NonFiniteSample { index: i });
            }
        }
        Ok(Self {
            id: id.into(),
            values,
            missing,
            sample_rate_hz,
        })
    }

    /// A fully observed series at the FHR sampling rate.
    pub fn from_values(id: impl Into<String>, values: Vec<f64>) -> Result<Self, SeriesError> {
        let n = values.len();
        Self::new(id, values, alloc::vec![false; n], FHR_SAMPLE_RATE_HZ)
    }

    /// `None` entries are missing.
    pub fn from_samples(
        id: impl Into<String>,
        samples: &[Option<f64>],
        sample_rate_hz: f64,
    ) -> Result<Self, SeriesError> {
        let values = samples.iter().map(|s| s.unwrap_or(f64::NAN)).collect();
        let missing = samples.iter().map(Option::is_none).collect();
        Self::new(id, values, missing, sample_rate_hz)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn missing_mask(&self) -> &[bool] {
        &self.missing
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn missing_count(&self) -> usize {
        self.missing.iter().filter(|&&m| m).count()
    }

    pub fn has_missing(&self) -> bool {
        self.missing.iter().any(|&m| m)
    }

    /// The sample values, or an error if any sample is missing.
    pub fn complete_values(&self) -> Result<&[f64], SeriesError> {
        if self.has_missing() {
            Err(SeriesError::MissingValues)
        } else {
            Ok(&self.values)
        }
    }

    pub fn samples(&self) -> impl Iterator<Item = Option<f64>> + '_ {
        self.values
            .iter()
            .zip(&self.missing)
            .map(|(&v, &m)| (!m).then_some(v))
    }

    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.values.reverse();
        out.missing.reverse();
        out
    }

    /// Same id and rate, new fully observed values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self, SeriesError> {
        let n = values.len();
        Self::new(self.id.clone(), values, alloc::vec![false; n], self.sample_rate_hz)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PreprocessConfig {
    /// Interior missing runs up to this many samples are interpolated.
    pub max_interp_gap_samples: usize,
    /// Series whose missing fraction after edge trimming exceeds this are rejected.
    pub max_missing_fraction: f64,
}

impl Default for PreprocessConfig {
    /// 60 samples is 15 s at 4 Hz.
    fn default() -> Self {
        Self {
            max_interp_gap_samples: 60,
            max_missing_fraction: 0.2,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.max_interp_gap_samples < 1 {
            return Err("max_interp_gap_samples must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.max_missing_fraction) {
            return Err("max_missing_fraction must lie in [0, 1]");
        }
        Ok(())
    }
}

/// A series dropped by [`trim_and_filter`].
#[derive(Clone, Copy, Debug, PartialEq, Error)]
#[error("missing fraction {missing_fraction} exceeds the allowed maximum")]
pub struct Rejected {
    pub missing_fraction: f64,
}

/// Maximal runs of missing samples as `(start, len)`.
fn missing_runs(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < mask.len() {
        if mask[i] {
            let start = i;
            while i < mask.len() && mask[i] {
                i += 1;
            }
            runs.push((start, i - start));
        } else {
            i += 1;
        }
    }
    runs
}

/// Linearly interpolates every interior missing run no longer than
/// `max_interp_gap_samples`. Longer runs and runs touching either end are
/// left as they are.
pub fn interpolate_short_gaps(series: &TimeSeries, cfg: &PreprocessConfig) -> TimeSeries {
    let mut out = series.clone();
    let n = out.values.len();
    for (start, len) in missing_runs(&series.missing) {
        let end = start + len;
        if start == 0 || end == n || len > cfg.max_interp_gap_samples {
            continue;
        }
        let left = out.values[start - 1];
        let right = out.values[end];
        let span = (len + 1) as f64;
        for k in 0..len {
            let t = (k + 1) as f64 / span;
            out.values[start + k] = left + (right - left) * t;
            out.missing[start + k] = false;
        }
    }
    out
}

/// Trims leading and trailing missing runs, rejects the series if the
/// remaining missing fraction is above the limit, and otherwise splices out
/// the interior gaps that survived interpolation by concatenating the
/// observed segments.
pub fn trim_and_filter(series: &TimeSeries, cfg: &PreprocessConfig) -> Result<TimeSeries, Rejected> {
    let first = series.missing.iter().position(|&m| !m);
    let last = series.missing.iter().rposition(|&m| !m);
    let (first, last) = match (first, last) {
        (Some(f), Some(l)) => (f, l),
        _ => {
            return Err(Rejected {
                missing_fraction: 1.0,
            })
        }
    };
    let mask = &series.missing[first..=last];
    let missing = mask.iter().filter(|&&m| m).count();
    let fraction = missing as f64 / mask.len() as f64;
    if fraction > cfg.max_missing_fraction {
        return Err(Rejected {
            missing_fraction: fraction,
        });
    }
    let values: Vec<f64> = series.values[first..=last]
        .iter()
        .zip(mask)
        .filter(|(_, &m)| !m)
        .map(|(&v, _)| v)
        .collect();
    // Non-empty: `first` is an observed sample.
    Ok(series
        .with_values(values)
        .expect("observed samples are finite"))
}

/// Interpolation followed by trimming.
pub fn preprocess(series: &TimeSeries, cfg: &PreprocessConfig) -> Result<TimeSeries, Rejected> {
    trim_and_filter(&interpolate_short_gaps(series, cfg), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ts(samples: &[Option<f64>]) -> TimeSeries {
        TimeSeries::from_samples("s", samples, 4.0).unwrap()
    }

    #[test]
    fn equality_treats_missing_samples_alike() {
        let a = ts(&[Some(1.0), None, Some(3.0)]);
        assert_eq!(a, a.clone());
        assert_ne!(a, ts(&[Some(1.0), Some(2.0), Some(3.0)]));
    }

    fn gapped(left: &[f64], gap: usize, right: &[f64]) -> TimeSeries {
        let mut s: Vec<Option<f64>> = left.iter().map(|&v| Some(v)).collect();
        s.extend(core::iter::repeat(None).take(gap));
        s.extend(right.iter().map(|&v| Some(v)));
        ts(&s)
    }

    #[test]
    fn rejects_invalid_construction() {
        assert_eq!(
            TimeSeries::from_values("a", vec![]),
            Err(SeriesError::Empty)
        );
        assert_eq!(
            TimeSeries::from_values("a", vec![1.0, f64::NAN]),
            Err(SeriesError::NonFiniteSample { index: 1 })
        );
        assert_eq!(
            TimeSeries::new("a", vec![1.0], vec![false], 0.0),
            Err(SeriesError::NonPositiveRate(0.0))
        );
    }

    #[test]
    fn interpolates_single_gap_midpoint() {
        let s = ts(&[Some(1.0), None, Some(3.0)]);
        let out = interpolate_short_gaps(&s, &PreprocessConfig::default());
        assert_eq!(out.values(), &[1.0, 2.0, 3.0]);
        assert!(!out.has_missing());
    }

    #[test]
    fn interpolates_two_sample_gap_on_line() {
        let s = ts(&[Some(0.0), None, None, Some(3.0)]);
        let out = interpolate_short_gaps(&s, &PreprocessConfig::default());
        assert_eq!(out.values(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn long_and_edge_gaps_untouched() {
        let s = gapped(&[1.0], 61, &[3.0]);
        let out = interpolate_short_gaps(&s, &PreprocessConfig::default());
        assert_eq!(out.missing_mask(), s.missing_mask());

        let edge = ts(&[None, Some(1.0), Some(2.0), None]);
        let out = interpolate_short_gaps(&edge, &PreprocessConfig::default());
        assert_eq!(out.missing_count(), 2);
    }

    #[test]
    fn trims_edges() {
        let s = ts(&[None, Some(1.0), Some(2.0), None]);
        let out = trim_and_filter(&s, &PreprocessConfig::default()).unwrap();
        assert_eq!(out.values(), &[1.0, 2.0]);
    }

    #[test]
    fn rejects_high_missing_fraction() {
        let mut samples: Vec<Option<f64>> = (0..100).map(|i| Some(i as f64)).collect();
        for s in samples.iter_mut().skip(10).take(30) {
            *s = None;
        }
        let err = trim_and_filter(&ts(&samples), &PreprocessConfig::default()).unwrap_err();
        assert!((err.missing_fraction - 0.30).abs() < 1e-12);
    }

    #[test]
    fn splices_long_interior_gap() {
        let s = gapped(&[1.0, 2.0], 100, &[3.0, 4.0]);
        let cfg = PreprocessConfig {
            max_interp_gap_samples: 60,
            max_missing_fraction: 0.99,
        };
        let out = preprocess(&s, &cfg).unwrap();
        assert_eq!(out.values(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn all_missing_is_rejected() {
        let s = ts(&[None, None]);
        assert_eq!(
            trim_and_filter(&s, &PreprocessConfig::default()),
            Err(Rejected {
                missing_fraction: 1.0
            })
        );
    }
}
