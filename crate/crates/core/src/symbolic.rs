//! Equiprobable symbolization and first-order transition matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::features::FeatureError;
use crate::math::SquareMatrix;

/// Maps each sample to the quantile bin of its rank: the sample of rank `k`
/// (0-based, ties broken by position) gets symbol `floor(k * alphabet / n)`.
/// Bin occupancies therefore differ by at most one.
pub fn symbolize_equiprobable(xs: &[f64], alphabet: usize) -> Result<Vec<usize>, FeatureError> {
    if alphabet < 2 {
        return Err(FeatureError::InvalidParameter("alphabet must be at least 2"));
    }
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
    let distinct = 1 + order
        .windows(2)
        .filter(|w| xs[w[0]] != xs[w[1]])
        .count();
    if xs.is_empty() || distinct < alphabet {
        return Err(FeatureError::Degenerate);
    }
    let n = xs.len();
    let mut symbols = vec![0usize; n];
    for (rank, &idx) in order.iter().enumerate() {
        symbols[idx] = rank * alphabet / n;
    }
    Ok(symbols)
}

/// Row-stochastic 1-step transition matrix. Rows of symbols that are never
/// followed by anything are set uniform.
pub fn transition_matrix(symbols: &[usize], alphabet: usize) -> SquareMatrix {
    let mut counts = SquareMatrix::zeros(alphabet);
    for w in symbols.windows(2) {
        counts.set(w[0], w[1], counts.get(w[0], w[1]) + 1.0);
    }
    let mut out = SquareMatrix::zeros(alphabet);
    for i in 0..alphabet {
        let total: f64 = counts.row(i).iter().sum();
        for j in 0..alphabet {
            let v = if total > 0.0 {
                counts.get(i, j) / total
            } else {
                1.0 / alphabet as f64
            };
            out.set(i, j, v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_split() {
        assert_eq!(
            symbolize_equiprobable(&[3.0, 1.0, 2.0, 4.0], 2).unwrap(),
            vec![1, 0, 0, 1]
        );
        assert_eq!(
            symbolize_equiprobable(&[1.0, 2.0, 3.0, 4.0], 4).unwrap(),
            vec![0, 1, 2, 3]
        );
        assert_eq!(
            symbolize_equiprobable(&[5.0; 8], 2),
            Err(FeatureError::Degenerate)
        );
    }

    #[test]
    fn alternating_transitions() {
        let t = transition_matrix(&[0, 1, 0, 1, 0], 2);
        assert_eq!(t.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        let t = transition_matrix(&[0, 0, 0], 1);
        assert_eq!(t.as_slice(), &[1.0]);
        let t = transition_matrix(&[0, 0, 1, 1], 2);
        assert_eq!(t.as_slice(), &[0.5, 0.5, 0.0, 1.0]);
    }

    #[test]
    fn unvisited_row_is_uniform() {
        let t = transition_matrix(&[0, 1], 3);
        assert_eq!(t.row(1), &[1.0 / 3.0; 3]);
        assert_eq!(t.row(2), &[1.0 / 3.0; 3]);
    }
}
