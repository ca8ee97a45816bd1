//! Versioned JSON reports. Every report carries the catalog provenance and
//! the seed so that results can be traced back to their inputs.

use ctgfeat_core::everest::EverestResult;
use ctgfeat_core::math::SquareMatrix;
use ctgfeat_core::select::{ClassificationReport, Dendrogram, RegressionReport, Side};
use serde::Serialize;

use crate::io::{FeatureProvenance, SCHEMA_VERSION};

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: u64,
    pub matrix: String,
    pub features: Vec<FeatureProvenance>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MergeOut {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DendrogramOut {
    pub leaves: Vec<String>,
    pub merges: Vec<MergeOut>,
}

impl From<&Dendrogram> for DendrogramOut {
    fn from(d: &Dendrogram) -> Self {
        Self {
            leaves: d.leaves.clone(),
            merges: d
                .merges
                .iter()
                .map(|m| MergeOut {
                    left: m.left,
                    right: m.right,
                    height: m.height,
                    size: m.size,
                })
                .collect(),
        }
    }
}

pub fn matrix_rows(m: &SquareMatrix) -> Vec<Vec<f64>> {
    (0..m.dim()).map(|i| m.row(i).to_vec()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SelectConfigOut {
    pub fdr: f64,
    pub clusters: String,
    pub n_perm: usize,
    pub pvalue: String,
    pub ph_threshold: f64,
    pub split: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScoreOut {
    pub name: String,
    pub threshold: f64,
    pub positive_side: &'static str,
    pub misclassification: f64,
    pub p_value: f64,
    pub selected: bool,
    /// Rate of the same classifier on held-out rows, when any.
    pub test_misclassification: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelectReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub provenance: Provenance,
    pub config: SelectConfigOut,
    pub n_rows: usize,
    pub n_low_ph: usize,
    pub n_test_rows: usize,
    pub status: &'static str,
    pub dropped_special: Vec<String>,
    pub scores: Vec<ScoreOut>,
    pub selected: Vec<String>,
    pub clusters: Vec<Vec<String>>,
    pub representatives: Vec<String>,
    pub correlation: Option<Vec<Vec<f64>>>,
    pub dendrogram: Option<DendrogramOut>,
}

pub fn side_str(s: Side) -> &'static str {
    match s {
        Side::Above => "above",
        Side::Below => "below",
    }
}

impl SelectReport {
    pub fn new(
        provenance: Provenance,
        config: SelectConfigOut,
        n_low_ph: usize,
        n_rows: usize,
        test_rates: &[(String, f64)],
        n_test_rows: usize,
        r: &ClassificationReport,
    ) -> Self {
        let scores = r
            .scores
            .iter()
            .map(|s| ScoreOut {
                name: s.name.clone(),
                threshold: s.classifier.threshold,
                positive_side: side_str(s.classifier.positive_side),
                misclassification: s.rate,
                p_value: s.p_value,
                selected: r.selected.contains(&s.name),
                test_misclassification: test_rates
                    .iter()
                    .find(|(n, _)| n == &s.name)
                    .map(|(_, v)| *v),
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            command: "select",
            provenance,
            config,
            n_rows,
            n_low_ph,
            n_test_rows,
            status: match r.status {
                ctgfeat_core::select::SelectionStatus::Selected => "selected",
                ctgfeat_core::select::SelectionStatus::EmptySelection => "empty_selection",
            },
            dropped_special: r.dropped_special.clone(),
            scores,
            selected: r.selected.clone(),
            clusters: r.clusters.clone(),
            representatives: r.representatives.clone(),
            correlation: r.correlation.as_ref().map(matrix_rows),
            dendrogram: r.dendrogram.as_ref().map(DendrogramOut::from),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RankingOut {
    pub name: String,
    pub r: f64,
    pub abs_r: f64,
    pub p_value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegressReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub provenance: Provenance,
    pub target: &'static str,
    pub n_rows: usize,
    pub n_perm: usize,
    pub top: usize,
    pub clusters_rule: String,
    pub dropped_special: Vec<String>,
    pub ranking: Vec<RankingOut>,
    pub top_features: Vec<String>,
    pub clusters: Vec<Vec<String>>,
    pub representatives: Vec<String>,
    pub correlation: Option<Vec<Vec<f64>>>,
    pub dendrogram: Option<DendrogramOut>,
}

impl RegressReport {
    pub fn new(
        provenance: Provenance,
        n_rows: usize,
        n_perm: usize,
        top: usize,
        clusters_rule: String,
        r: &RegressionReport,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: "regress",
            provenance,
            target: "cord_ph",
            n_rows,
            n_perm,
            top,
            clusters_rule,
            dropped_special: r.dropped_special.clone(),
            ranking: r
                .ranking
                .iter()
                .map(|e| RankingOut {
                    name: e.name.clone(),
                    r: e.r,
                    abs_r: e.r.abs(),
                    p_value: e.p_value,
                })
                .collect(),
            top_features: r.top.clone(),
            clusters: r.clusters.clone(),
            representatives: r.representatives.clone(),
            correlation: r.correlation.as_ref().map(matrix_rows),
            dendrogram: r.dendrogram.as_ref().map(DendrogramOut::from),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OutcomeOut {
    pub name: String,
    pub overall_rate: f64,
    pub group_events: Vec<usize>,
    pub group_rates: Vec<f64>,
    /// Last-group rate over the overall rate; absent when there are no events.
    pub top_group_risk_ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EverestReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub provenance: Provenance,
    pub feature: String,
    pub ph_threshold: f64,
    pub n_rows: usize,
    pub n_group: usize,
    pub group_sizes: Vec<usize>,
    pub group_boundaries: Vec<f64>,
    pub outcomes: Vec<OutcomeOut>,
}

impl EverestReport {
    pub fn new(provenance: Provenance, ph_threshold: f64, r: &EverestResult) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: "everest",
            provenance,
            feature: r.feature.clone(),
            ph_threshold,
            n_rows: r.group_sizes.iter().sum(),
            n_group: r.n_group,
            group_sizes: r.group_sizes.clone(),
            group_boundaries: r.group_boundaries.clone(),
            outcomes: r
                .outcomes
                .iter()
                .map(|o| OutcomeOut {
                    name: o.name.clone(),
                    overall_rate: o.overall_rate,
                    group_events: o.group_events.clone(),
                    group_rates: o.group_rates.clone(),
                    top_group_risk_ratio: ctgfeat_core::top_group_risk_ratio(r, &o.name).ok(),
                })
                .collect(),
        }
    }
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    serde_json::to_string_pretty(report).expect("reports are serialisable") + "\n"
}
