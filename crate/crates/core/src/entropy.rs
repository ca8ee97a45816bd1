//! Approximate Entropy and Sample Entropy with Chebyshev template matching.
//!
//! The tolerance is `r = r_frac * std(window)` using the sample standard
//! deviation of the window itself. Two templates match when every coordinate
//! differs by at most `r`. ApEn counts self-matches (Pincus); SampEn excludes
//! them (Richman and Moorman).

use alloc::vec;

use crate::features::FeatureError;
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyParams {
    /// Template length.
    pub m: usize,
    /// Tolerance as a fraction of the window standard deviation.
    pub r_frac: f64,
}

impl Default for EntropyParams {
    fn default() -> Self {
        Self { m: 1, r_frac: 0.2 }
    }
}

impl EntropyParams {
    fn check(&self, window: &[f64]) -> Result<f64, FeatureError> {
        if self.m < 1 || !(self.r_frac > 0.0) {
            return Err(FeatureError::InvalidParameter("m >= 1 and r_frac > 0"));
        }
        if window.len() < self.m + 2 {
            return Err(FeatureError::SeriesTooShort {
                needed: self.m + 2,
                got: window.len(),
            });
        }
        let sd = math::sample_std(window);
        if sd == 0.0 {
            return Err(FeatureError::Degenerate);
        }
        Ok(self.r_frac * sd)
    }
}

#[inline]
fn within(xs: &[f64], i: usize, j: usize, len: usize, r: f64) -> bool {
    (0..len).all(|k| (xs[i + k] - xs[j + k]).abs() <= r)
}

/// ApEn(m, r) = Φ^m − Φ^{m+1}.
pub fn apen(window: &[f64], p: EntropyParams) -> Result<f64, FeatureError> {
    let r = p.check(window)?;
    let n = window.len();
    let m = p.m;
    let nm = n - m + 1;
    let nm1 = n - m;
    // Match counts for length-m templates (nm of them) and length-(m+1)
    // templates (nm1 of them), self-matches included.
    let mut cm = vec![0usize; nm];
    let mut cm1 = vec![0usize; nm1];
    for i in 0..nm {
        for j in i..nm {
            if !within(window, i, j, m, r) {
                continue;
            }
            cm[i] += 1;
            if j != i {
                cm[j] += 1;
            }
            if j < nm1 && (window[i + m] - window[j + m]).abs() <= r {
                cm1[i] += 1;
                if j != i {
                    cm1[j] += 1;
                }
            }
        }
    }
    let phi = |counts: &[usize]| {
        let total = counts.len() as f64;
        counts
            .iter()
            .map(|&c| math::ln(c as f64 / total))
            .sum::<f64>()
            / total
    };
    Ok(phi(&cm) - phi(&cm1))
}

/// SampEn(m, r) = −ln(A / B) over the first `n - m` templates, where B counts
/// matching length-m pairs and A matching length-(m+1) pairs (i < j).
pub fn sampen(window: &[f64], p: EntropyParams) -> Result<f64, FeatureError> {
    let r = p.check(window)?;
    let n = window.len();
    let m = p.m;
    let templates = n - m;
    let mut b = 0u64;
    let mut a = 0u64;
    for i in 0..templates {
        for j in i + 1..templates {
            if within(window, i, j, m, r) {
                b += 1;
                if (window[i + m] - window[j + m]).abs() <= r {
                    a += 1;
                }
            }
        }
    }
    if a == 0 || b == 0 {
        return Err(FeatureError::NotFinite);
    }
    Ok(-math::ln(a as f64 / b as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn alternating() -> Vec<f64> {
        (0..500).map(|i| if i % 2 == 0 { 1.0 } else { 2.0 }).collect()
    }

    #[test]
    fn constant_window_is_degenerate() {
        let w = [4.0; 50];
        assert_eq!(apen(&w, EntropyParams::default()), Err(FeatureError::Degenerate));
        assert_eq!(sampen(&w, EntropyParams::default()), Err(FeatureError::Degenerate));
    }

    #[test]
    fn alternating_is_regular() {
        let w = alternating();
        assert!(apen(&w, EntropyParams::default()).unwrap() < 0.05);
        assert!(sampen(&w, EntropyParams::default()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn no_extension_matches_is_not_finite() {
        // Every length-1 match among the first n-1 templates is (0, 2) with
        // value 0; their successors 1 and 5 never match.
        let w = [0.0, 1.0, 0.0, 5.0, 10.0];
        let p = EntropyParams { m: 1, r_frac: 0.01 };
        assert_eq!(sampen(&w, p), Err(FeatureError::NotFinite));
    }

    #[test]
    fn too_short_window() {
        assert!(matches!(
            apen(&[1.0, 2.0], EntropyParams::default()),
            Err(FeatureError::SeriesTooShort { .. })
        ));
    }
}
