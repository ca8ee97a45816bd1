//! Feature selection: threshold classification with permutation p-values,
//! Benjamini–Hochberg control, average-linkage clustering of correlated
//! features, and correlation ranking against a continuous outcome.

use alloc::string::String;

use thiserror::Error;

pub mod classify;
pub mod fdr;
pub mod linkage;
pub mod pipeline;
pub mod regression;

pub use classify::{
    fit_threshold_classifier, misclassification_rate, permutation_null, permutation_pvalue,
    PValueMethod, Side, ThresholdClassifier,
};
pub use fdr::bh_fdr_select;
pub use linkage::{average_linkage, cut_tree, Dendrogram, Merge};
pub use pipeline::{
    abs_corr_matrix, auto_cluster_count, run_classification_selection, run_regression_selection,
    select_representatives, ClassificationReport, ClusterCount, FeatureScore, RegressionReport,
    SelectionConfig, SelectionStatus,
};
pub use regression::{pearson_r, rank_by_regression, RegressionEntry};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SelectionError {
    #[error("both classes need at least one sample")]
    MissingClass,
    #[error("{values} values but {labels} labels")]
    LengthMismatch { values: usize, labels: usize },
    #[error("no features left to select from")]
    NoFeatures,
    #[error("feature {0:?} is constant")]
    DegenerateColumn(String),
    #[error("feature {0:?} contains special values; filter the matrix first")]
    SpecialValuesPresent(String),
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("false discovery rate must lie in (0, 1], got {0}")]
    InvalidFdr(f64),
    #[error("cluster count must be at least 1")]
    InvalidClusterCount,
    #[error("permutation count must be at least 1")]
    InvalidPermutations,
    #[error("distance matrix must be square, finite and non-negative")]
    InvalidDistances,
    #[error("cut must produce between 1 and {leaves} clusters, got {k}")]
    InvalidCut { k: usize, leaves: usize },
}
