//! Time-series feature extraction and feature-selection machinery for
//! fetal heart rate (FHR) recordings.
//!
//! Every feature is a map from a series to one real number, or to a tagged
//! special value when the algorithm does not apply to that series. On top of
//! the catalog sit the selection stages: special-value filtering, threshold
//! classification with permutation p-values and Benjamini–Hochberg control,
//! average-linkage clustering of correlated features, regression ranking
//! against a continuous outcome, and event-rate (EveREst) analysis.
//!
//! The crate is `no_std` with `alloc`; file formats and the command line live
//! in the `ctgfeat` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod catalog;
pub mod correlation;
pub mod dataset;
pub mod eigen;
pub mod entropy;
pub mod everest;
pub mod features;
pub mod fit;
pub mod hull;
pub mod math;
pub mod matrix;
pub mod seed;
pub mod select;
pub mod series;
pub mod symbolic;

pub use catalog::{catalog_default, FeatureDescriptor, FeatureKind};
pub use dataset::{LabeledDataset, Outcome, Split};
pub use everest::{everest, top_group_risk_ratio, EverestError, EverestResult, OutcomeDefinition, Predicate};
pub use features::{FeatureError, FeatureValue, SpecialKind};
pub use matrix::{build_feature_matrix, filter_special_features, FeatureMatrix};
pub use series::{PreprocessConfig, SeriesError, TimeSeries};
