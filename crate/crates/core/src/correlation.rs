//! Autocorrelation and histogram auto-mutual-information, with the
//! delay selectors built on them.
//!
//! All functions take the complete sample values of a series (see
//! [`TimeSeries::complete_values`](crate::TimeSeries::complete_values)).

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{self, min_max};
use crate::series::SeriesError;

/// Biased autocorrelation at `lag`: lagged products normalised by the
/// full-length sum of squared deviations from the global mean.
pub fn autocorr(xs: &[f64], lag: usize) -> Result<f64, SeriesError> {
    let n = xs.len();
    if lag >= n {
        return Err(SeriesError::LagTooLarge { lag, len: n });
    }
    let mu = math::mean(xs);
    let denom: f64 = xs.iter().map(|x| (x - mu) * (x - mu)).sum();
    if denom == 0.0 {
        return Err(SeriesError::DegenerateSeries);
    }
    let num: f64 = xs[..n - lag]
        .iter()
        .zip(&xs[lag..])
        .map(|(a, b)| (a - mu) * (b - mu))
        .sum();
    Ok(num / denom)
}

/// Smallest lag `>= 1` at which the autocorrelation is `<= 0`, or `max_lag`
/// if none is found up to `max_lag`.
pub fn first_zero_autocorr(xs: &[f64], max_lag: usize) -> Result<usize, SeriesError> {
    let max_lag = max_lag.max(1);
    for lag in 1..=max_lag {
        if autocorr(xs, lag)? <= 0.0 {
            return Ok(lag);
        }
    }
    Ok(max_lag)
}

/// Equiwidth bin assignment over the range of `xs`.
struct Binner {
    lo: f64,
    width: f64,
    n_bins: usize,
}

impl Binner {
    fn new(xs: &[f64], n_bins: usize) -> Result<Self, SeriesError> {
        let (lo, hi) = min_max(xs);
        if hi <= lo {
            return Err(SeriesError::DegenerateSeries);
        }
        Ok(Self {
            lo,
            width: (hi - lo) / n_bins as f64,
            n_bins,
        })
    }

    fn bin(&self, x: f64) -> usize {
        let k = math::floor((x - self.lo) / self.width);
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.n_bins - 1)
        }
    }
}

fn ami_from_bins(bins: &[usize], lag: usize, n_bins: usize) -> f64 {
    let pairs = bins.len() - lag;
    let mut joint = vec![0usize; n_bins * n_bins];
    for t in 0..pairs {
        joint[bins[t] * n_bins + bins[t + lag]] += 1;
    }
    let mut row = vec![0usize; n_bins];
    let mut col = vec![0usize; n_bins];
    for i in 0..n_bins {
        for j in 0..n_bins {
            let c = joint[i * n_bins + j];
            row[i] += c;
            col[j] += c;
        }
    }
    let total = pairs as f64;
    let mut mi = 0.0;
    for i in 0..n_bins {
        for j in 0..n_bins {
            let c = joint[i * n_bins + j];
            if c == 0 {
                continue;
            }
            let pij = c as f64 / total;
            let pi = row[i] as f64 / total;
            let pj = col[j] as f64 / total;
            mi += pij * math::ln(pij / (pi * pj));
        }
    }
    mi
}

fn check_ami_args(xs: &[f64], lag: usize, n_bins: usize) -> Result<(), SeriesError> {
    if n_bins < 2 {
        return Err(SeriesError::TooFewBins {
            needed: 2,
            got: n_bins,
        });
    }
    if lag >= xs.len() {
        return Err(SeriesError::LagTooLarge { lag, len: xs.len() });
    }
    Ok(())
}

/// Mutual information (nats) between `x_t` and `x_{t+lag}`, estimated from a
/// joint histogram with `n_bins` equiwidth bins per axis spanning the range
/// of the series. Marginals are taken from the joint counts.
pub fn auto_mutual_info(xs: &[f64], lag: usize, n_bins: usize) -> Result<f64, SeriesError> {
    check_ami_args(xs, lag, n_bins)?;
    let binner = Binner::new(xs, n_bins)?;
    let bins: Vec<usize> = xs.iter().map(|&x| binner.bin(x)).collect();
    Ok(ami_from_bins(&bins, lag, n_bins))
}

/// First local minimum of the auto-mutual-information profile: the smallest
/// `lag` in `1..=max_lag` with `AMI(lag) < AMI(lag-1)` and
/// `AMI(lag) <= AMI(lag+1)`. Plateaus do not count as a descent. Returns
/// `max_lag` when the profile has no such minimum.
pub fn first_min_auto_mutual_info(
    xs: &[f64],
    max_lag: usize,
    n_bins: usize,
) -> Result<usize, SeriesError> {
    let max_lag = max_lag.max(1);
    check_ami_args(xs, max_lag + 1, n_bins)?;
    let binner = Binner::new(xs, n_bins)?;
    let bins: Vec<usize> = xs.iter().map(|&x| binner.bin(x)).collect();
    let profile: Vec<f64> = (0..=max_lag + 1)
        .map(|lag| ami_from_bins(&bins, lag, n_bins))
        .collect();
    Ok((1..=max_lag)
        .find(|&l| profile[l] < profile[l - 1] && profile[l] <= profile[l + 1])
        .unwrap_or(max_lag))
}
