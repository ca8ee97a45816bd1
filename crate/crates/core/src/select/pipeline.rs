//! Composed selection runs: classification (rates → FDR → |R| → linkage →
//! cut → representatives) and regression (ranking → top set → linkage →
//! cut → representatives).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::classify::{fit_threshold_classifier, misclassification_rate, permutation_null, PValueMethod, ThresholdClassifier};
use super::fdr::bh_fdr_select;
use super::linkage::{average_linkage, clusters_from_labels, cut_tree, Dendrogram};
use super::regression::{rank_by_regression, RegressionEntry};
use super::SelectionError;
use crate::math::{self, SquareMatrix};
use crate::matrix::{filter_special_features, special_columns, FeatureMatrix};
use crate::seed::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClusterCount {
    /// Cut at the largest gap between consecutive merge heights.
    Auto,
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionConfig {
    /// Benjamini–Hochberg level.
    pub q: f64,
    pub clusters: ClusterCount,
    pub n_perm: usize,
    pub seed: u64,
    pub pvalue: PValueMethod,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            q: 0.001,
            clusters: ClusterCount::Auto,
            n_perm: 1000,
            seed: 0,
            pvalue: PValueMethod::GaussianNull,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<(), SelectionError> {
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(SelectionError::InvalidFdr(self.q));
        }
        if self.clusters == ClusterCount::Fixed(0) {
            return Err(SelectionError::InvalidClusterCount);
        }
        if self.n_perm == 0 {
            return Err(SelectionError::InvalidPermutations);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureScore {
    pub name: String,
    pub classifier: ThresholdClassifier,
    /// In-sample misclassification rate.
    pub rate: f64,
    pub p_value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionStatus {
    Selected,
    EmptySelection,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport {
    pub status: SelectionStatus,
    /// Columns removed for holding special values.
    pub dropped_special: Vec<String>,
    /// One entry per surviving feature, in matrix column order.
    pub scores: Vec<FeatureScore>,
    pub selected: Vec<String>,
    /// |R| between selected features, in `selected` order.
    pub correlation: Option<SquareMatrix>,
    pub dendrogram: Option<Dendrogram>,
    pub clusters: Vec<Vec<String>>,
    pub representatives: Vec<String>,
}

/// |Pearson R| between the named columns; unit diagonal.
pub fn abs_corr_matrix<S: AsRef<str>>(
    m: &FeatureMatrix,
    features: &[S],
) -> Result<SquareMatrix, SelectionError> {
    let cols: Vec<Vec<f64>> = features
        .iter()
        .map(|name| {
            let name = name.as_ref();
            let c = m
                .column_index(name)
                .ok_or_else(|| SelectionError::UnknownFeature(name.into()))?;
            let v = m
                .finite_column(c)
                .ok_or_else(|| SelectionError::SpecialValuesPresent(name.into()))?;
            if math::sample_var(&v) == 0.0 {
                return Err(SelectionError::DegenerateColumn(name.into()));
            }
            Ok(v)
        })
        .collect::<Result<_, _>>()?;
    let k = cols.len();
    let mut out = SquareMatrix::zeros(k);
    for i in 0..k {
        out.set(i, i, 1.0);
        for j in i + 1..k {
            let r = math::pearson(&cols[i], &cols[j])
                .ok_or_else(|| SelectionError::DegenerateColumn(features[i].as_ref().into()))?
                .abs();
            out.set(i, j, r);
            out.set(j, i, r);
        }
    }
    Ok(out)
}

/// Number of clusters from cutting at the largest gap between consecutive
/// merge heights (first such gap on ties). Trees with fewer than two merges
/// give a single cluster.
pub fn auto_cluster_count(d: &Dendrogram) -> usize {
    let h = d.heights();
    if h.len() < 2 {
        return 1;
    }
    let mut best = 0;
    let mut best_gap = f64::NEG_INFINITY;
    for i in 0..h.len() - 1 {
        let gap = h[i + 1] - h[i];
        if gap > best_gap {
            best_gap = gap;
            best = i;
        }
    }
    d.n_leaves() - (best + 1)
}

/// Lowest-scoring member of each cluster; ties go to the smaller name.
pub fn select_representatives(clusters: &[Vec<String>], scores: &BTreeMap<String, f64>) -> Vec<String> {
    clusters
        .iter()
        .filter_map(|members| {
            members
                .iter()
                .map(|n| (scores.get(n).copied().unwrap_or(f64::INFINITY), n))
                .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)))
                .map(|(_, n)| n.clone())
        })
        .collect()
}

struct Clustering {
    correlation: SquareMatrix,
    dendrogram: Dendrogram,
    clusters: Vec<Vec<String>>,
}

fn cluster_features(
    m: &FeatureMatrix,
    names: &[String],
    count: ClusterCount,
) -> Result<Clustering, SelectionError> {
    let correlation = abs_corr_matrix(m, names)?;
    let n = names.len();
    let dist: Vec<f64> = correlation.as_slice().iter().map(|r| 1.0 - r).collect();
    let dist = SquareMatrix::from_row_major(n, dist).expect("square");
    let dendrogram = average_linkage(&dist, names)?;
    let k = match count {
        ClusterCount::Auto => auto_cluster_count(&dendrogram),
        ClusterCount::Fixed(k) => k.min(n),
    };
    let labels = cut_tree(&dendrogram, k)?;
    let clusters = clusters_from_labels(&labels)
        .into_iter()
        .map(|c| c.into_iter().map(|i| names[i].clone()).collect())
        .collect();
    Ok(Clustering {
        correlation,
        dendrogram,
        clusters,
    })
}

/// Per-feature classifier, in-sample rate and permutation p-value. The
/// matrix must be free of special values.
pub fn score_features(
    m: &FeatureMatrix,
    labels: &[bool],
    cfg: &SelectionConfig,
) -> Result<Vec<FeatureScore>, SelectionError> {
    if labels.len() != m.n_rows() {
        return Err(SelectionError::LengthMismatch {
            values: m.n_rows(),
            labels: labels.len(),
        });
    }
    (0..m.n_cols())
        .map(|c| {
            let name = &m.columns()[c].name;
            let values = m
                .finite_column(c)
                .ok_or_else(|| SelectionError::SpecialValuesPresent(name.clone()))?;
            let mut classifier = fit_threshold_classifier(&values, labels)?;
            classifier.trained_on = name.clone();
            let rate = misclassification_rate(&classifier, &values, labels);
            let seed = derive_seed(cfg.seed, "classification", name);
            let (observed, null) = permutation_null(&values, labels, cfg.n_perm, seed)?;
            debug_assert_eq!(observed, rate);
            Ok(FeatureScore {
                name: name.clone(),
                classifier,
                rate,
                p_value: cfg.pvalue.pvalue(observed, &null),
            })
        })
        .collect()
}

/// Drops special-valued columns, scores every remaining feature, keeps the
/// Benjamini–Hochberg selection at level `q`, clusters the selection by
/// `1 - |R|` with average linkage, and picks the lowest-rate member of each
/// cluster.
pub fn run_classification_selection(
    m: &FeatureMatrix,
    labels: &[bool],
    cfg: &SelectionConfig,
) -> Result<ClassificationReport, SelectionError> {
    cfg.validate()?;
    let dropped_special = special_columns(m);
    let m = filter_special_features(m);
    if m.n_cols() == 0 {
        return Err(SelectionError::NoFeatures);
    }
    let scores = score_features(&m, labels, cfg)?;
    let pvalues: Vec<(&str, f64)> = scores.iter().map(|s| (s.name.as_str(), s.p_value)).collect();
    let selected = bh_fdr_select(&pvalues, cfg.q);
    if selected.is_empty() {
        return Ok(ClassificationReport {
            status: SelectionStatus::EmptySelection,
            dropped_special,
            scores,
            selected,
            correlation: None,
            dendrogram: None,
            clusters: Vec::new(),
            representatives: Vec::new(),
        });
    }
    let clustering = cluster_features(&m, &selected, cfg.clusters)?;
    let rates: BTreeMap<String, f64> = scores.iter().map(|s| (s.name.clone(), s.rate)).collect();
    let representatives = select_representatives(&clustering.clusters, &rates);
    Ok(ClassificationReport {
        status: SelectionStatus::Selected,
        dropped_special,
        scores,
        selected,
        correlation: Some(clustering.correlation),
        dendrogram: Some(clustering.dendrogram),
        clusters: clustering.clusters,
        representatives,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegressionReport {
    pub dropped_special: Vec<String>,
    /// All features, descending |R|.
    pub ranking: Vec<RegressionEntry>,
    /// The `top` strongest features that were clustered.
    pub top: Vec<String>,
    pub correlation: Option<SquareMatrix>,
    pub dendrogram: Option<Dendrogram>,
    pub clusters: Vec<Vec<String>>,
    /// Strongest |R| member of each cluster.
    pub representatives: Vec<String>,
}

/// Regression counterpart of [`run_classification_selection`]: the `top`
/// features by |R| with the target are clustered and each cluster is
/// represented by its strongest correlate.
pub fn run_regression_selection(
    m: &FeatureMatrix,
    target: &[f64],
    top: usize,
    clusters: ClusterCount,
    n_perm: usize,
    seed: u64,
) -> Result<RegressionReport, SelectionError> {
    if clusters == ClusterCount::Fixed(0) {
        return Err(SelectionError::InvalidClusterCount);
    }
    let dropped_special = special_columns(m);
    let m = filter_special_features(m);
    if m.n_cols() == 0 {
        return Err(SelectionError::NoFeatures);
    }
    let ranking = rank_by_regression(&m, target, n_perm, seed)?;
    let top: Vec<String> = ranking
        .iter()
        .filter(|e| e.r != 0.0)
        .take(top)
        .map(|e| e.name.clone())
        .collect();
    if top.is_empty() {
        return Ok(RegressionReport {
            dropped_special,
            ranking,
            top,
            correlation: None,
            dendrogram: None,
            clusters: Vec::new(),
            representatives: Vec::new(),
        });
    }
    let clustering = cluster_features(&m, &top, clusters)?;
    let scores: BTreeMap<String, f64> = ranking.iter().map(|e| (e.name.clone(), -e.r.abs())).collect();
    let representatives = select_representatives(&clustering.clusters, &scores);
    Ok(RegressionReport {
        dropped_special,
        ranking,
        top,
        correlation: Some(clustering.correlation),
        dendrogram: Some(clustering.dendrogram),
        clusters: clustering.clusters,
        representatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureValue, SpecialKind};
    use crate::matrix::ColumnMeta;
    use alloc::string::ToString;
    use alloc::{format, vec};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn representatives_rule() {
        let scores: BTreeMap<String, f64> =
            [("f1", 0.26), ("f2", 0.29), ("g", 0.3), ("h2", 0.27), ("h1", 0.27)]
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect();
        let clusters = vec![names(&["f1", "f2"]), names(&["g"]), names(&["h2", "h1"])];
        assert_eq!(select_representatives(&clusters, &scores), names(&["f1", "g", "h1"]));
    }

    #[test]
    fn corr_matrix_properties() {
        let n = 20;
        let x: Vec<f64> = (0..n).map(|i| (i * 7 % 13) as f64).collect();
        let mut cells = Vec::new();
        for &v in &x {
            cells.push(FeatureValue::Value(v));
            cells.push(FeatureValue::Value(-3.0 * v));
            cells.push(FeatureValue::Value(2.0));
        }
        let m = FeatureMatrix::new(
            (0..n).map(|i| format!("r{i}")).collect(),
            ["x", "y", "c"].iter().map(|c| ColumnMeta { name: (*c).into(), params: vec![] }).collect(),
            cells,
            0,
        )
        .unwrap();
        let r = abs_corr_matrix(&m, &["x", "y"]).unwrap();
        assert_eq!(r.get(0, 0), 1.0);
        assert!((r.get(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(
            abs_corr_matrix(&m, &["x", "c"]),
            Err(SelectionError::DegenerateColumn("c".into()))
        );
    }

    #[test]
    fn empty_and_invalid() {
        let m = FeatureMatrix::new(
            vec!["a".into(), "b".into()],
            vec![ColumnMeta { name: "x".into(), params: vec![] }],
            vec![FeatureValue::Special(SpecialKind::NotFinite), FeatureValue::Value(1.0)],
            0,
        )
        .unwrap();
        let cfg = SelectionConfig::default();
        assert_eq!(
            run_classification_selection(&m, &[true, false], &cfg),
            Err(SelectionError::NoFeatures)
        );
        let bad = SelectionConfig { q: -0.1, ..cfg };
        assert_eq!(
            run_classification_selection(&m, &[true, false], &bad),
            Err(SelectionError::InvalidFdr(-0.1))
        );
    }
}
