//! The `extract`, `select`, `regress`, `everest`, `synth` and `preprocess`
//! commands. Each command validates all inputs and computes every output in
//! memory before the first file is written, so a validation failure leaves
//! the output location untouched.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ctgfeat_core::catalog::catalog_default;
use ctgfeat_core::matrix::evaluate_cell;
use ctgfeat_core::select::{
    fit_threshold_classifier, misclassification_rate, run_classification_selection,
    run_regression_selection, ClusterCount, PValueMethod, SelectionConfig,
};
use ctgfeat_core::series::preprocess;
use ctgfeat_core::{
    everest, FeatureDescriptor, FeatureMatrix, LabeledDataset, Outcome, OutcomeDefinition,
    PreprocessConfig, Split,
};
use rayon::prelude::*;
use thiserror::Error;

use crate::io::{self, IoError, ManifestRecord, MatrixProvenance, RejectedSeries};
use crate::report::{self, EverestReport, Provenance, RegressReport, SelectConfigOut, SelectReport};
use crate::svg;
use crate::synth::{self, SynthConfig};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or input files; exit code 2.
    #[error("{0}")]
    Validation(String),
    /// Anything else; exit code 1.
    #[error(transparent)]
    Internal(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn input(e: IoError) -> CliError {
    invalid(e.to_string())
}

/// Files to write once everything has been computed.
#[derive(Default)]
pub struct Outputs(Vec<(PathBuf, Vec<u8>)>);

impl Outputs {
    fn add(&mut self, path: PathBuf, bytes: impl Into<Vec<u8>>) {
        self.0.push((path, bytes.into()));
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.0.iter().map(|(p, _)| p.as_path())
    }

    fn commit(self) -> Result<(), CliError> {
        for (path, bytes) in self.0 {
            io::write_file(&path, bytes).map_err(|e| CliError::Internal(e.into()))?;
        }
        Ok(())
    }
}

fn safe_name(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect()
}

/// Evaluates the catalog on every series, one parallel task per series.
/// Results do not depend on the thread schedule.
pub fn extract_matrix(data: &LabeledDataset, catalog: &[FeatureDescriptor], seed: u64) -> FeatureMatrix {
    let rows: Vec<Vec<_>> = data
        .series()
        .par_iter()
        .map(|s| catalog.iter().map(|d| evaluate_cell(s, d, seed)).collect())
        .collect();
    FeatureMatrix::new(
        data.ids().into_iter().map(String::from).collect(),
        catalog.iter().map(Into::into).collect(),
        rows.into_iter().flatten().collect(),
        seed,
    )
    .expect("dataset ids are unique and catalog names distinct")
}

/// Applies gap interpolation, edge trimming and rejection to every series.
pub fn preprocess_dataset(
    data: &LabeledDataset,
    cfg: &PreprocessConfig,
) -> (LabeledDataset, Vec<RejectedSeries>) {
    let mut rejected = Vec::new();
    let mut series = Vec::new();
    let mut outcomes = Vec::new();
    for (s, o) in data.iter() {
        match preprocess(s, cfg) {
            Ok(clean) => {
                series.push(clean);
                outcomes.push(o.clone());
            }
            Err(r) => rejected.push(RejectedSeries {
                id: s.id().to_string(),
                missing_fraction: r.missing_fraction,
            }),
        }
    }
    let kept = LabeledDataset::new(series, outcomes).expect("subset of a valid dataset");
    (kept, rejected)
}

fn check_preprocess(cfg: &PreprocessConfig) -> Result<(), CliError> {
    cfg.validate().map_err(invalid)
}

pub struct ExtractArgs {
    pub dataset: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    /// `None` evaluates the raw series.
    pub preprocess: Option<PreprocessConfig>,
}

#[derive(Debug)]
pub struct ExtractSummary {
    pub rows: usize,
    pub columns: usize,
    pub rejected: Vec<RejectedSeries>,
    pub special_columns: Vec<String>,
}

pub fn run_extract(a: &ExtractArgs) -> Result<ExtractSummary, CliError> {
    if let Some(cfg) = &a.preprocess {
        check_preprocess(cfg)?;
    }
    let data = io::ingest_dataset(&a.dataset).map_err(input)?;
    let (data, rejected) = match &a.preprocess {
        Some(cfg) => preprocess_dataset(&data, cfg),
        None => (data, Vec::new()),
    };
    if data.is_empty() {
        return Err(invalid("every series was rejected by preprocessing"));
    }
    let catalog = catalog_default();
    let m = extract_matrix(&data, &catalog, a.seed);
    let provenance = MatrixProvenance {
        schema_version: io::SCHEMA_VERSION,
        generator: io::generator(),
        seed: a.seed,
        max_interp_gap_samples: a.preprocess.map(|c| c.max_interp_gap_samples),
        max_missing_fraction: a.preprocess.map(|c| c.max_missing_fraction),
        features: io::column_provenance(m.columns()),
        rejected: rejected.clone(),
    };
    let mut out = Outputs::default();
    out.add(a.out.clone(), io::format_matrix(&m));
    out.add(
        io::sidecar_path(&a.out),
        serde_json::to_string_pretty(&provenance).expect("serialisable") + "\n",
    );
    out.commit()?;
    Ok(ExtractSummary {
        rows: m.n_rows(),
        columns: m.n_cols(),
        rejected,
        special_columns: ctgfeat_core::matrix::special_columns(&m),
    })
}

fn provenance(matrix_path: &Path, m: &FeatureMatrix, seed: u64) -> Provenance {
    Provenance {
        generator: io::generator(),
        seed,
        matrix: matrix_path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        features: io::column_provenance(m.columns()),
    }
}

/// Outcome row for every matrix row, matched by id.
fn join_outcomes(m: &FeatureMatrix, manifest: &Path) -> Result<Vec<Outcome>, CliError> {
    let records = io::read_manifest(manifest).map_err(input)?;
    let by_id: BTreeMap<&str, &ManifestRecord> = records.iter().map(|r| (r.id.as_str(), r)).collect();
    m.row_ids()
        .iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .map(|r| r.outcome.clone())
                .ok_or_else(|| invalid(format!("matrix row {id:?} is not in the manifest")))
        })
        .collect()
}

fn rows_where(outcomes: &[Outcome], keep: impl Fn(&Outcome) -> bool) -> Vec<usize> {
    (0..outcomes.len()).filter(|&i| keep(&outcomes[i])).collect()
}

fn check_ph_threshold(t: f64) -> Result<(), CliError> {
    if t.is_finite() && t > 6.5 && t < 8.0 {
        Ok(())
    } else {
        Err(invalid(format!("pH threshold must lie in (6.5, 8.0), got {t}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitChoice {
    All,
    /// Fit on training rows and report held-out rates on test rows.
    Train,
    Test,
}

impl SplitChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitChoice::All => "all",
            SplitChoice::Train => "train",
            SplitChoice::Test => "test",
        }
    }

    fn admits(&self, s: Split) -> bool {
        match self {
            SplitChoice::All => true,
            SplitChoice::Train => s == Split::Train,
            SplitChoice::Test => s == Split::Test,
        }
    }
}

pub fn cluster_rule(c: ClusterCount) -> String {
    match c {
        ClusterCount::Auto => "auto".into(),
        ClusterCount::Fixed(k) => k.to_string(),
    }
}

pub struct SelectArgs {
    pub matrix: PathBuf,
    pub dataset: PathBuf,
    pub out: PathBuf,
    pub fdr: f64,
    pub clusters: ClusterCount,
    pub n_perm: usize,
    /// Defaults to the seed recorded with the matrix.
    pub seed: Option<u64>,
    pub ph_threshold: f64,
    pub pvalue: PValueMethod,
    pub split: SplitChoice,
}

pub fn run_select(a: &SelectArgs) -> Result<SelectReport, CliError> {
    let (report, outputs) = plan_select(a)?;
    outputs.commit()?;
    Ok(report)
}

pub fn plan_select(a: &SelectArgs) -> Result<(SelectReport, Outputs), CliError> {
    check_ph_threshold(a.ph_threshold)?;
    let m = io::read_matrix(&a.matrix).map_err(input)?;
    let seed = a.seed.unwrap_or(m.seed());
    let cfg = SelectionConfig {
        q: a.fdr,
        clusters: a.clusters,
        n_perm: a.n_perm,
        seed,
        pvalue: a.pvalue,
    };
    cfg.validate().map_err(|e| invalid(e.to_string()))?;
    let outcomes = join_outcomes(&m, &a.dataset)?;

    let rows = rows_where(&outcomes, |o| o.cord_ph.is_some() && a.split.admits(o.split));
    if rows.is_empty() {
        return Err(invalid("no rows with a cord pH in the chosen split"));
    }
    let fit_m = m.select_rows(&rows);
    let labels: Vec<bool> = rows.iter().map(|&i| outcomes[i].is_low_ph(a.ph_threshold)).collect();
    let result = run_classification_selection(&fit_m, &labels, &cfg).map_err(|e| invalid(e.to_string()))?;

    let test_rows = if a.split == SplitChoice::Train {
        rows_where(&outcomes, |o| o.cord_ph.is_some() && o.split == Split::Test)
    } else {
        Vec::new()
    };
    let mut test_rates = Vec::new();
    if !test_rows.is_empty() {
        let test_m = m.select_rows(&test_rows);
        let test_labels: Vec<bool> =
            test_rows.iter().map(|&i| outcomes[i].is_low_ph(a.ph_threshold)).collect();
        for s in &result.scores {
            let c = test_m.column_index(&s.name).expect("same columns");
            if let Some(v) = test_m.finite_column(c) {
                test_rates.push((s.name.clone(), misclassification_rate(&s.classifier, &v, &test_labels)));
            }
        }
    }

    let report = SelectReport::new(
        provenance(&a.matrix, &m, seed),
        SelectConfigOut {
            fdr: a.fdr,
            clusters: cluster_rule(a.clusters),
            n_perm: a.n_perm,
            pvalue: a.pvalue.as_str().into(),
            ph_threshold: a.ph_threshold,
            split: a.split.as_str().into(),
        },
        labels.iter().filter(|&&l| l).count(),
        rows.len(),
        &test_rates,
        test_rows.len(),
        &result,
    );

    let mut out = Outputs::default();
    out.add(a.out.join("report.json"), report::to_json(&report));
    if let (Some(d), Some(r)) = (&result.dendrogram, &result.correlation) {
        out.add(a.out.join("dendrogram.svg"), svg::dendrogram(d, "Selected features"));
        out.add(a.out.join("correlation.svg"), svg::heatmap(&result.selected, r, "|R| between selected features"));
    }
    for name in &result.representatives {
        let c = fit_m.column_index(name).expect("representative is a column");
        let v = fit_m.finite_column(c).expect("filtered matrix");
        let low: Vec<f64> = v.iter().zip(&labels).filter(|(_, &l)| l).map(|(x, _)| *x).collect();
        let normal: Vec<f64> = v.iter().zip(&labels).filter(|(_, &l)| !l).map(|(x, _)| *x).collect();
        let threshold = fit_threshold_classifier(&v, &labels)
            .map(|c| c.threshold)
            .map_err(|e| CliError::Internal(e.into()))?;
        out.add(
            a.out.join(format!("dist_{}.svg", safe_name(name))),
            svg::distribution_pair(name, &low, &normal, threshold),
        );
    }
    Ok((report, out))
}

pub struct RegressArgs {
    pub matrix: PathBuf,
    pub dataset: PathBuf,
    pub out: PathBuf,
    pub n_perm: usize,
    pub seed: Option<u64>,
    pub top: usize,
    pub clusters: ClusterCount,
}

pub fn run_regress(a: &RegressArgs) -> Result<RegressReport, CliError> {
    if a.n_perm == 0 {
        return Err(invalid("permutation count must be at least 1"));
    }
    if a.top == 0 {
        return Err(invalid("--top must be at least 1"));
    }
    if a.clusters == ClusterCount::Fixed(0) {
        return Err(invalid("cluster count must be at least 1"));
    }
    let m = io::read_matrix(&a.matrix).map_err(input)?;
    let seed = a.seed.unwrap_or(m.seed());
    let outcomes = join_outcomes(&m, &a.dataset)?;
    let rows = rows_where(&outcomes, |o| o.cord_ph.is_some());
    if rows.len() < 3 {
        return Err(invalid("need at least 3 rows with a cord pH"));
    }
    let sub = m.select_rows(&rows);
    let target: Vec<f64> = rows.iter().map(|&i| outcomes[i].cord_ph.expect("filtered")).collect();
    let result = run_regression_selection(&sub, &target, a.top, a.clusters, a.n_perm, seed)
        .map_err(|e| invalid(e.to_string()))?;
    let report = RegressReport::new(provenance(&a.matrix, &m, seed), rows.len(), a.n_perm, a.top, cluster_rule(a.clusters), &result);

    let mut out = Outputs::default();
    out.add(a.out.join("report.json"), report::to_json(&report));
    if let (Some(d), Some(r)) = (&result.dendrogram, &result.correlation) {
        out.add(a.out.join("dendrogram.svg"), svg::dendrogram(d, "Top features by |R| with cord pH"));
        out.add(a.out.join("correlation.svg"), svg::heatmap(&result.top, r, "|R| between top features"));
    }
    out.commit()?;
    Ok(report)
}

pub struct EverestArgs {
    pub matrix: PathBuf,
    pub dataset: PathBuf,
    pub out: PathBuf,
    pub feature: String,
    pub groups: usize,
    pub ph_threshold: f64,
}

pub fn run_everest(a: &EverestArgs) -> Result<EverestReport, CliError> {
    check_ph_threshold(a.ph_threshold)?;
    let m = io::read_matrix(&a.matrix).map_err(input)?;
    let c = m
        .column_index(&a.feature)
        .ok_or_else(|| invalid(format!("feature {:?} is not in the matrix", a.feature)))?;
    let outcomes = join_outcomes(&m, &a.dataset)?;
    let values: Vec<f64> = m.column(c).map(|v| v.value().unwrap_or(f64::NAN)).collect();
    let defs = OutcomeDefinition::standard(a.ph_threshold);
    let r = everest(&a.feature, &values, m.row_ids(), &outcomes, &defs, a.groups)
        .map_err(|e| invalid(e.to_string()))?;
    let report = EverestReport::new(provenance(&a.matrix, &m, m.seed()), a.ph_threshold, &r);

    let mut out = Outputs::default();
    out.add(a.out.join("report.json"), report::to_json(&report));
    out.add(a.out.join("everest.svg"), svg::everest(&r));
    out.commit()?;
    Ok(report)
}

/// Writes a synthetic cohort; returns the manifest path.
pub fn run_synth(out: &Path, cfg: &SynthConfig) -> Result<PathBuf, CliError> {
    cfg.validate().map_err(invalid)?;
    let cohort = synth::generate_synthetic(cfg);
    synth::write_cohort(out, &cohort).map_err(|e| CliError::Internal(e.into()))
}

#[derive(Debug)]
pub struct PreprocessSummary {
    pub kept: usize,
    pub rejected: Vec<RejectedSeries>,
}

/// Writes cleaned series, a manifest of the kept series and
/// `rejected.json` under `out`.
pub fn run_preprocess(dataset: &Path, out: &Path, cfg: &PreprocessConfig) -> Result<PreprocessSummary, CliError> {
    check_preprocess(cfg)?;
    let records = io::read_manifest(dataset).map_err(input)?;
    let data = io::ingest_dataset(dataset).map_err(input)?;
    let (kept, rejected) = preprocess_dataset(&data, cfg);

    let mut outputs = Outputs::default();
    let mut manifest = Vec::new();
    for (s, o) in kept.iter() {
        let rel = PathBuf::from("series").join(format!("{}.txt", safe_name(s.id())));
        outputs.add(out.join(&rel), io::format_series(s));
        manifest.push(ManifestRecord {
            id: s.id().to_string(),
            series_file: rel,
            outcome: o.clone(),
        });
    }
    debug_assert!(manifest.len() <= records.len());
    outputs.add(
        out.join("rejected.json"),
        serde_json::to_string_pretty(&rejected).expect("serialisable") + "\n",
    );
    outputs.commit()?;
    io::write_manifest(&out.join(synth::MANIFEST_NAME), &manifest).map_err(|e| CliError::Internal(e.into()))?;
    Ok(PreprocessSummary {
        kept: kept.len(),
        rejected,
    })
}
