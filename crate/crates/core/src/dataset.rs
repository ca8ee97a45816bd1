//! Series with per-record clinical outcomes.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;

use thiserror::Error;

use crate::series::TimeSeries;

/// Class boundary used for the balanced classification task: low pH is
/// `cord_ph <= 7.1`.
pub const CLASSIFICATION_PH_THRESHOLD: f64 = 7.1;
/// Stricter boundary used for event-rate outcomes.
pub const EVEREST_PH_THRESHOLD: f64 = 7.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Test,
    Unassigned,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
            Split::Unassigned => "unassigned",
        }
    }
}

impl FromStr for Split {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            "unassigned" | "" => Ok(Split::Unassigned),
            other => Err(DatasetError::UnknownSplit(other.into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub cord_ph: Option<f64>,
    pub compromise: bool,
    pub split: Split,
}

impl Outcome {
    /// `cord_ph <= threshold`; records without a pH are not low.
    pub fn is_low_ph(&self, threshold: f64) -> bool {
        self.cord_ph.is_some_and(|ph| ph <= threshold)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DatasetError {
    #[error("{series} series but {outcomes} outcome rows")]
    LengthMismatch { series: usize, outcomes: usize },
    #[error("duplicate series id {0:?}")]
    DuplicateId(String),
    #[error("cord pH {ph} for {id:?} is outside (6.5, 8.0)")]
    PhOutOfRange { id: String, ph: f64 },
    #[error("unknown split {0:?}; expected train, test or unassigned")]
    UnknownSplit(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    series: Vec<TimeSeries>,
    outcomes: Vec<Outcome>,
}

impl LabeledDataset {
    pub fn new(series: Vec<TimeSeries>, outcomes: Vec<Outcome>) -> Result<Self, DatasetError> {
        if series.len() != outcomes.len() {
            return Err(DatasetError::LengthMismatch {
                series: series.len(),
                outcomes: outcomes.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for (s, o) in series.iter().zip(&outcomes) {
            if !seen.insert(s.id()) {
                return Err(DatasetError::DuplicateId(s.id().into()));
            }
            if let Some(ph) = o.cord_ph {
                if !(ph > 6.5 && ph < 8.0) {
                    return Err(DatasetError::PhOutOfRange {
                        id: s.id().into(),
                        ph,
                    });
                }
            }
        }
        Ok(Self { series, outcomes })
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TimeSeries, &Outcome)> {
        self.series.iter().zip(&self.outcomes)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.series.iter().map(TimeSeries::id).collect()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.series.iter().position(|s| s.id() == id)
    }

    pub fn outcome(&self, id: &str) -> Option<&Outcome> {
        self.position(id).map(|i| &self.outcomes[i])
    }

    /// Low-pH class labels (`true` = low pH) under the given threshold.
    pub fn class_labels(&self, threshold: f64) -> Vec<bool> {
        self.outcomes.iter().map(|o| o.is_low_ph(threshold)).collect()
    }

    /// Keeps only records for which `keep` holds.
    pub fn filter(&self, mut keep: impl FnMut(&TimeSeries, &Outcome) -> bool) -> Self {
        let (series, outcomes) = self
            .iter()
            .filter(|(s, o)| keep(s, o))
            .map(|(s, o)| (s.clone(), o.clone()))
            .unzip();
        Self { series, outcomes }
    }

    /// Replaces the series (same order and ids), e.g. after preprocessing.
    pub fn map_series(&self, mut f: impl FnMut(&TimeSeries) -> TimeSeries) -> Self {
        Self {
            series: self.series.iter().map(&mut f).collect(),
            outcomes: self.outcomes.clone(),
        }
    }
}
