//! Linear correlation of features with a continuous outcome.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SelectionError;
use crate::math;
use crate::matrix::FeatureMatrix;

/// Pearson correlation coefficient.
pub fn pearson_r(values: &[f64], target: &[f64]) -> Result<f64, SelectionError> {
    if values.len() != target.len() {
        return Err(SelectionError::LengthMismatch {
            values: values.len(),
            labels: target.len(),
        });
    }
    math::pearson(values, target).ok_or(SelectionError::DegenerateColumn(String::new()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegressionEntry {
    pub name: String,
    pub r: f64,
    /// Target-shuffle permutation p-value for |R|.
    pub p_value: f64,
}

fn standardise(xs: &[f64]) -> Option<Vec<f64>> {
    let mu = math::mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - mu) * (x - mu)).sum();
    if ss == 0.0 {
        return None;
    }
    let s = math::sqrt(ss);
    Some(xs.iter().map(|x| (x - mu) / s).collect())
}

/// Ranks every column by |R| with `target` (descending, ties by name).
/// p-values are `(1 + #{|R_perm| >= |R|}) / (n_perm + 1)` over `n_perm`
/// seeded shuffles of the target shared by all features. Constant columns
/// get `R = 0` and `p = 1`.
pub fn rank_by_regression(
    m: &FeatureMatrix,
    target: &[f64],
    n_perm: usize,
    seed: u64,
) -> Result<Vec<RegressionEntry>, SelectionError> {
    if target.len() != m.n_rows() {
        return Err(SelectionError::LengthMismatch {
            values: m.n_rows(),
            labels: target.len(),
        });
    }
    if n_perm == 0 {
        return Err(SelectionError::InvalidPermutations);
    }
    let cols: Vec<Vec<f64>> = (0..m.n_cols())
        .map(|c| {
            m.finite_column(c)
                .ok_or_else(|| SelectionError::SpecialValuesPresent(m.columns()[c].name.clone()))
        })
        .collect::<Result<_, _>>()?;
    let z_target = standardise(target).ok_or(SelectionError::DegenerateColumn("target".into()))?;
    let z_cols: Vec<Option<Vec<f64>>> = cols.iter().map(|c| standardise(c)).collect();

    let observed: Vec<f64> = cols
        .iter()
        .zip(&z_cols)
        .map(|(c, z)| match z {
            Some(_) => math::pearson(c, target).unwrap_or(0.0),
            None => 0.0,
        })
        .collect();

    let mut exceed = alloc::vec![0usize; cols.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = z_target;
    for _ in 0..n_perm {
        shuffled.shuffle(&mut rng);
        for (c, z) in z_cols.iter().enumerate() {
            let Some(z) = z else { continue };
            let r: f64 = z.iter().zip(&shuffled).map(|(a, b)| a * b).sum();
            if r.abs() >= observed[c].abs() {
                exceed[c] += 1;
            }
        }
    }

    let mut out: Vec<RegressionEntry> = m
        .columns()
        .iter()
        .enumerate()
        .map(|(c, meta)| RegressionEntry {
            name: meta.name.clone(),
            r: observed[c],
            p_value: if z_cols[c].is_some() {
                (1 + exceed[c]) as f64 / (n_perm + 1) as f64
            } else {
                1.0
            },
        })
        .collect();
    out.sort_by(|a, b| b.r.abs().total_cmp(&a.r.abs()).then_with(|| a.name.cmp(&b.name)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureValue;
    use crate::matrix::ColumnMeta;
    use alloc::format;
    use alloc::vec;

    #[test]
    fn perfect_correlations() {
        assert_eq!(pearson_r(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0);
        assert_eq!(pearson_r(&[1.0, 2.0, 3.0], &[6.0, 4.0, 2.0]).unwrap(), -1.0);
        assert!(pearson_r(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn target_copy_ranks_first() {
        let n = 50;
        let target: Vec<f64> = (0..n).map(|i| ((i * 37) % 50) as f64).collect();
        let noise: Vec<f64> = (0..n).map(|i| ((i * 11 + 3) % 17) as f64).collect();
        let cols = ["copy", "noise", "flat"];
        let mut cells = Vec::new();
        for i in 0..n {
            cells.push(FeatureValue::Value(target[i]));
            cells.push(FeatureValue::Value(noise[i]));
            cells.push(FeatureValue::Value(1.0));
        }
        let m = FeatureMatrix::new(
            (0..n).map(|i| format!("s{i}")).collect(),
            cols.iter().map(|c| ColumnMeta { name: (*c).into(), params: vec![] }).collect(),
            cells,
            0,
        )
        .unwrap();
        let ranked = rank_by_regression(&m, &target, 199, 1).unwrap();
        assert_eq!(ranked[0].name, "copy");
        assert_eq!(ranked[0].r, 1.0);
        assert_eq!(ranked[0].p_value, 1.0 / 200.0);
        let flat = ranked.iter().find(|e| e.name == "flat").unwrap();
        assert_eq!((flat.r, flat.p_value), (0.0, 1.0));
    }
}
