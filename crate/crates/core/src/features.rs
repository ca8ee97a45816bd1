//! The scalar features: each maps the complete values of a series to one
//! real number or fails with a [`FeatureError`], which
//! [`FeatureValue::from_result`] turns into a special value.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::correlation::{first_min_auto_mutual_info, first_zero_autocorr};
use crate::eigen::{min_eigenvalue, EigenError};
use crate::entropy::{apen, sampen, EntropyParams};
use crate::fit::{fit_exp_decay, fit_exp_density, FitError};
use crate::hull::{hull_area, Point};
use crate::math;
use crate::series::SeriesError;
use crate::symbolic::{symbolize_equiprobable, transition_matrix};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum FeatureError {
    #[error("feature is undefined for this series")]
    Degenerate,
    #[error("feature evaluated to a non-finite number")]
    NotFinite,
    #[error("series too short: need {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("series has missing samples")]
    MissingValues,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("numerical routine failed to converge")]
    NumericalFailure,
}

impl From<SeriesError> for FeatureError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::DegenerateSeries => FeatureError::Degenerate,
            SeriesError::MissingValues => FeatureError::MissingValues,
            SeriesError::LagTooLarge { lag, len } => FeatureError::SeriesTooShort {
                needed: lag + 1,
                got: len,
            },
            SeriesError::TooFewBins { .. } => FeatureError::InvalidParameter("n_bins"),
            _ => FeatureError::InvalidParameter("series"),
        }
    }
}

impl From<FitError> for FeatureError {
    fn from(_: FitError) -> Self {
        FeatureError::NumericalFailure
    }
}

impl From<EigenError> for FeatureError {
    fn from(_: EigenError) -> Self {
        FeatureError::NumericalFailure
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpecialKind {
    /// Infinity or NaN, including failed numerical routines.
    NotFinite,
    /// The algorithm does not apply to this series.
    Degenerate,
}

/// A feature output: a finite real or a special value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FeatureValue {
    Value(f64),
    Special(SpecialKind),
}

impl FeatureValue {
    /// Non-finite inputs become `Special(NotFinite)`.
    pub fn finite(x: f64) -> Self {
        if x.is_finite() {
            FeatureValue::Value(x)
        } else {
            FeatureValue::Special(SpecialKind::NotFinite)
        }
    }

    pub fn from_result(r: Result<f64, FeatureError>) -> Self {
        match r {
            Ok(x) => Self::finite(x),
            Err(FeatureError::NotFinite | FeatureError::NumericalFailure | FeatureError::MissingValues) => {
                FeatureValue::Special(SpecialKind::NotFinite)
            }
            Err(_) => FeatureValue::Special(SpecialKind::Degenerate),
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            FeatureValue::Value(x) => Some(x),
            FeatureValue::Special(_) => None,
        }
    }

    pub fn is_special(&self) -> bool {
        matches!(self, FeatureValue::Special(_))
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Value(x) => write!(f, "{x}"),
            FeatureValue::Special(SpecialKind::NotFinite) => f.write_str("Inf"),
            FeatureValue::Special(SpecialKind::Degenerate) => f.write_str("NaN"),
        }
    }
}

fn require_len(xs: &[f64], needed: usize) -> Result<(), FeatureError> {
    if xs.len() < needed {
        Err(FeatureError::SeriesTooShort {
            needed,
            got: xs.len(),
        })
    } else {
        Ok(())
    }
}

/// `mean((x[t+tau] - x[t])^3)`, the numerator of the time-reversal
/// asymmetry statistic.
pub fn trev_num(xs: &[f64], tau: usize) -> Result<f64, FeatureError> {
    if tau == 0 {
        return Err(FeatureError::InvalidParameter("tau must be positive"));
    }
    require_len(xs, tau + 1)?;
    let diffs = xs[tau..].iter().zip(xs).map(|(b, a)| {
        let d = b - a;
        d * d * d
    });
    Ok(diffs.sum::<f64>() / (xs.len() - tau) as f64)
}

/// `CO_trev_mi_num`: [`trev_num`] at the first minimum of the
/// auto-mutual-information profile.
pub fn f_trev_mi_num(xs: &[f64], max_lag: usize, n_bins: usize) -> Result<f64, FeatureError> {
    let tau = first_min_auto_mutual_info(xs, max_lag, n_bins)?;
    trev_num(xs, tau)
}

/// `DN_OutlierTest2_std`: sample standard deviation after dropping the
/// `ceil(trim_percent% * N)` largest and smallest values, divided by the
/// standard deviation of the full series.
pub fn f_outliertest_std(xs: &[f64], trim_percent: usize) -> Result<f64, FeatureError> {
    let n = xs.len();
    let k = (n * trim_percent).div_ceil(100);
    require_len(xs, 2 * k + 2)?;
    let full = math::sample_std(xs);
    if full == 0.0 {
        return Err(FeatureError::Degenerate);
    }
    let sorted = math::sorted(xs);
    Ok(math::sample_std(&sorted[k..n - k]) / full)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalStat {
    /// Mean of per-window ApEn.
    MeanApEn,
    /// Sample standard deviation of per-window SampEn.
    StdSampEn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalWindowParams {
    pub window_len: usize,
    pub n_windows: usize,
    pub seed: u64,
}

impl Default for LocalWindowParams {
    fn default() -> Self {
        Self {
            window_len: 200,
            n_windows: 100,
            seed: 0,
        }
    }
}

/// Window start positions drawn uniformly with replacement from
/// `0..=n - window_len`.
pub fn random_window_starts(n: usize, w: &LocalWindowParams) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(w.seed);
    (0..w.n_windows)
        .map(|_| rng.random_range(0..=n - w.window_len))
        .collect()
}

/// `SY_SpreadRandomLocal_*`: entropy statistic over randomly placed local
/// windows. Windows whose entropy is undefined are skipped; if more than
/// half are skipped the feature is not finite.
pub fn f_spread_random_local(
    xs: &[f64],
    w: &LocalWindowParams,
    p: EntropyParams,
    stat: LocalStat,
) -> Result<f64, FeatureError> {
    if w.window_len < 20 || w.n_windows < 2 {
        return Err(FeatureError::InvalidParameter(
            "window_len >= 20 and n_windows >= 2",
        ));
    }
    require_len(xs, w.window_len + 1)?;
    let estimator = match stat {
        LocalStat::MeanApEn => apen,
        LocalStat::StdSampEn => sampen,
    };
    let vals: Vec<f64> = random_window_starts(xs.len(), w)
        .into_iter()
        .filter_map(|s| estimator(&xs[s..s + w.window_len], p).ok())
        .filter(|v| v.is_finite())
        .collect();
    if 2 * vals.len() < w.n_windows || vals.len() < 2 {
        return Err(FeatureError::NotFinite);
    }
    Ok(match stat {
        LocalStat::MeanApEn => math::mean(&vals),
        LocalStat::StdSampEn => math::sample_std(&vals),
    })
}

/// `(alphabet size, minimum real eigenvalue part)` for alphabets
/// `2..=max_alphabet`.
pub fn dyntrans_min_eigenvalues(
    xs: &[f64],
    max_alphabet: usize,
) -> Result<Vec<(usize, f64)>, FeatureError> {
    (2..=max_alphabet)
        .map(|n| {
            let symbols = symbolize_equiprobable(xs, n)?;
            let t = transition_matrix(&symbols, n);
            Ok((n, min_eigenvalue(&t)?))
        })
        .collect()
}

/// `ST_dyntrans40_1_mineigfexp_adjr2`: adjusted R² of a decaying exponential
/// fitted to the minimum eigenvalues of the 1-step transition matrices for
/// alphabet sizes 2..=max_alphabet.
pub fn f_dyntrans_mineig_fexp(xs: &[f64], max_alphabet: usize) -> Result<f64, FeatureError> {
    if max_alphabet < 5 {
        return Err(FeatureError::InvalidParameter("max_alphabet >= 5"));
    }
    let pairs = dyntrans_min_eigenvalues(xs, max_alphabet)?;
    let ns: Vec<f64> = pairs.iter().map(|&(n, _)| n as f64).collect();
    let eigs: Vec<f64> = pairs.iter().map(|&(_, e)| e).collect();
    match fit_exp_decay(&ns, &eigs) {
        Ok(fit) => Ok(fit.adj_r2),
        Err(_) => Err(FeatureError::NotFinite),
    }
}

/// `coeff_var_2`: `(sample std / mean)^2`.
pub fn f_coeff_var_2(xs: &[f64]) -> Result<f64, FeatureError> {
    require_len(xs, 1)?;
    let mu = math::mean(xs);
    if mu == 0.0 {
        return Err(FeatureError::NotFinite);
    }
    let cv = math::sample_std(xs) / mu;
    Ok(cv * cv)
}

/// `median_absolute_deviation`: the mean absolute deviation from the median.
pub fn f_mean_abs_dev_median(xs: &[f64]) -> Result<f64, FeatureError> {
    require_len(xs, 1)?;
    let med = math::median(xs);
    Ok(xs.iter().map(|x| (x - med).abs()).sum::<f64>() / xs.len() as f64)
}

/// Density-normalised equiwidth histogram of `xs - min(xs)`:
/// `(bin centres, densities)`.
pub fn shifted_density_histogram(
    xs: &[f64],
    n_bins: usize,
) -> Result<(Vec<f64>, Vec<f64>), FeatureError> {
    let (lo, hi) = math::min_max(xs);
    let range = hi - lo;
    if !(range > 0.0) {
        return Err(FeatureError::Degenerate);
    }
    let width = range / n_bins as f64;
    let mut counts = alloc::vec![0usize; n_bins];
    for &x in xs {
        let k = math::floor((x - lo) / width);
        let k = if k <= 0.0 { 0 } else { (k as usize).min(n_bins - 1) };
        counts[k] += 1;
    }
    let norm = xs.len() as f64 * width;
    let centres = (0..n_bins).map(|k| (k as f64 + 0.5) * width).collect();
    let density = counts.iter().map(|&c| c as f64 / norm).collect();
    Ok((centres, density))
}

/// `DN_SimpleFit_exp1_rmse_h30`: RMS error of the least-squares exponential
/// density fitted to the histogram of the min-shifted values.
pub fn f_simplefit_exp1_rmse(xs: &[f64], n_bins: usize) -> Result<f64, FeatureError> {
    if n_bins < 2 {
        return Err(FeatureError::InvalidParameter("n_bins >= 2"));
    }
    require_len(xs, n_bins)?;
    let (centres, density) = shifted_density_histogram(xs, n_bins)?;
    let lo = math::min_max(xs).0;
    let mean_shift = xs.iter().map(|x| x - lo).sum::<f64>() / xs.len() as f64;
    let rate = fit_exp_density(&centres, &density, 1.0 / mean_shift)?;
    let mse = crate::fit::exp_density_sse(&centres, &density, rate) / n_bins as f64;
    Ok(math::sqrt(mse))
}

/// Area ratio of the convex hull of embedded points closer than the median
/// distance to the centroid, over the hull of all embedded points.
pub fn embed2_area_ratio(xs: &[f64], tau: usize) -> Result<f64, FeatureError> {
    if tau == 0 {
        return Err(FeatureError::InvalidParameter("tau must be positive"));
    }
    require_len(xs, tau + 3)?;
    let pts: Vec<Point> = xs.iter().zip(&xs[tau..]).map(|(&a, &b)| (a, b)).collect();
    let cx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let cy = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let dist: Vec<f64> = pts
        .iter()
        .map(|p| math::sqrt((p.0 - cx) * (p.0 - cx) + (p.1 - cy) * (p.1 - cy)))
        .collect();
    let med = math::median(&dist);
    let outer = hull_area(&pts);
    if outer == 0.0 {
        return Err(FeatureError::Degenerate);
    }
    let inner: Vec<Point> = pts
        .iter()
        .zip(&dist)
        .filter(|(_, &d)| d < med)
        .map(|(&p, _)| p)
        .collect();
    Ok(hull_area(&inner) / outer)
}

/// `CO_Embed2_tau_arearat`: [`embed2_area_ratio`] with the delay set to the
/// first zero crossing of the autocorrelation (searched up to `N - 3`).
pub fn f_embed2_arearat(xs: &[f64]) -> Result<f64, FeatureError> {
    require_len(xs, 4)?;
    let tau = first_zero_autocorr(xs, xs.len() - 3)?;
    embed2_area_ratio(xs, tau)
}
