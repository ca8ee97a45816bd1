//! Event rate estimates: order a cohort by one feature, split it into
//! equally populated groups and report the event proportion in each group.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::dataset::{Outcome, EVEREST_PH_THRESHOLD};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EverestError {
    #[error("{patients} patients cannot fill {groups} groups (need at least 2 groups and one patient per group)")]
    TooFewPatients { patients: usize, groups: usize },
    #[error("patient {0:?} has a special feature value")]
    SpecialValuePresent(String),
    #[error("{values} values, {ids} ids and {outcomes} outcome rows")]
    LengthMismatch { values: usize, ids: usize, outcomes: usize },
    #[error("unknown outcome {0:?}")]
    UnknownOutcome(String),
    #[error("overall event rate is zero")]
    NotFinite,
}

#[derive(Clone, Copy, Debug)]
pub enum Predicate {
    /// `cord_ph <= threshold`.
    LowPh { threshold: f64 },
    Compromise,
    LowPhAndCompromise { threshold: f64 },
    Custom(fn(&Outcome) -> bool),
}

#[derive(Clone, Debug)]
pub struct OutcomeDefinition {
    pub name: String,
    pub predicate: Predicate,
}

impl OutcomeDefinition {
    pub fn new(name: impl Into<String>, predicate: Predicate) -> Self {
        Self {
            name: name.into(),
            predicate,
        }
    }

    pub fn holds(&self, o: &Outcome) -> bool {
        match self.predicate {
            Predicate::LowPh { threshold } => o.is_low_ph(threshold),
            Predicate::Compromise => o.compromise,
            Predicate::LowPhAndCompromise { threshold } => o.is_low_ph(threshold) && o.compromise,
            Predicate::Custom(f) => f(o),
        }
    }

    /// Low pH, compromised, and both, at the given pH cut.
    pub fn standard(ph_threshold: f64) -> Vec<Self> {
        alloc::vec![
            Self::new("low_ph", Predicate::LowPh { threshold: ph_threshold }),
            Self::new("compromised", Predicate::Compromise),
            Self::new(
                "low_ph_and_compromised",
                Predicate::LowPhAndCompromise { threshold: ph_threshold },
            ),
        ]
    }

    pub fn standard_default() -> Vec<Self> {
        Self::standard(EVEREST_PH_THRESHOLD)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeRates {
    pub name: String,
    pub group_events: Vec<usize>,
    pub group_rates: Vec<f64>,
    pub overall_rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EverestResult {
    pub feature: String,
    pub n_group: usize,
    /// `n_group - 1` cut values between neighbouring groups.
    pub group_boundaries: Vec<f64>,
    pub group_sizes: Vec<usize>,
    /// Patient indices of each group, ascending feature value.
    pub groups: Vec<Vec<usize>>,
    pub outcomes: Vec<OutcomeRates>,
}

impl EverestResult {
    pub fn rates(&self, outcome: &str) -> Option<&OutcomeRates> {
        self.outcomes.iter().find(|o| o.name == outcome)
    }
}

/// Sizes of `n_group` contiguous groups over `n` items, larger groups first.
pub fn group_sizes(n: usize, n_group: usize) -> Vec<usize> {
    let base = n / n_group;
    let extra = n % n_group;
    (0..n_group).map(|g| base + usize::from(g < extra)).collect()
}

/// Sorts patients by `(value, id)`, splits them into `n_group` equally
/// populated groups and computes each outcome's event rate per group.
pub fn everest<S: AsRef<str>>(
    feature: &str,
    values: &[f64],
    ids: &[S],
    outcomes: &[Outcome],
    defs: &[OutcomeDefinition],
    n_group: usize,
) -> Result<EverestResult, EverestError> {
    let n = values.len();
    if ids.len() != n || outcomes.len() != n {
        return Err(EverestError::LengthMismatch {
            values: n,
            ids: ids.len(),
            outcomes: outcomes.len(),
        });
    }
    if n_group < 2 || n < n_group {
        return Err(EverestError::TooFewPatients {
            patients: n,
            groups: n_group,
        });
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(EverestError::SpecialValuePresent(ids[i].as_ref().into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .total_cmp(&values[b])
            .then_with(|| ids[a].as_ref().cmp(ids[b].as_ref()))
    });

    let sizes = group_sizes(n, n_group);
    let mut groups = Vec::with_capacity(n_group);
    let mut start = 0;
    for &size in &sizes {
        groups.push(order[start..start + size].to_vec());
        start += size;
    }

    let group_boundaries = groups
        .windows(2)
        .map(|w| {
            let hi = values[*w[0].last().expect("non-empty group")];
            let lo = values[w[1][0]];
            0.5 * (hi + lo)
        })
        .collect();

    let outcomes = defs
        .iter()
        .map(|def| {
            let group_events: Vec<usize> = groups
                .iter()
                .map(|g| g.iter().filter(|&&i| def.holds(&outcomes[i])).count())
                .collect();
            let group_rates = group_events
                .iter()
                .zip(&sizes)
                .map(|(&e, &s)| e as f64 / s as f64)
                .collect();
            let total: usize = group_events.iter().sum();
            OutcomeRates {
                name: def.name.clone(),
                group_events,
                group_rates,
                overall_rate: total as f64 / n as f64,
            }
        })
        .collect();

    Ok(EverestResult {
        feature: feature.into(),
        n_group,
        group_boundaries,
        group_sizes: sizes,
        groups,
        outcomes,
    })
}

/// Event rate in the last (highest-valued) group relative to the overall
/// rate.
pub fn top_group_risk_ratio(r: &EverestResult, outcome: &str) -> Result<f64, EverestError> {
    let o = r
        .rates(outcome)
        .ok_or_else(|| EverestError::UnknownOutcome(outcome.into()))?;
    if o.overall_rate == 0.0 {
        return Err(EverestError::NotFinite);
    }
    let last = *o.group_rates.last().expect("at least two groups");
    Ok(last / o.overall_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Split;
    use alloc::format;
    use alloc::vec;

    fn outcome(compromise: bool) -> Outcome {
        Outcome {
            cord_ph: Some(7.2),
            compromise,
            split: Split::Unassigned,
        }
    }

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i:03}")).collect()
    }

    fn compromised() -> Vec<OutcomeDefinition> {
        vec![OutcomeDefinition::new("c", Predicate::Compromise)]
    }

    #[test]
    fn direct_binning() {
        let values: Vec<f64> = (1..=10).map(f64::from).collect();
        let outcomes: Vec<Outcome> = (1..=10).map(|v| outcome(v == 10)).collect();
        let r = everest("f", &values, &ids(10), &outcomes, &compromised(), 10).unwrap();
        let mut expected = vec![0.0; 10];
        expected[9] = 1.0;
        assert_eq!(r.outcomes[0].group_rates, expected);
        assert_eq!(r.group_boundaries[0], 1.5);
        assert_eq!(top_group_risk_ratio(&r, "c").unwrap(), 10.0);
    }

    #[test]
    fn all_events() {
        let values = [3.0, 1.0, 2.0, 5.0];
        let outcomes: Vec<Outcome> = (0..4).map(|_| outcome(true)).collect();
        let r = everest("f", &values, &ids(4), &outcomes, &compromised(), 2).unwrap();
        assert_eq!(r.outcomes[0].group_rates, vec![1.0, 1.0]);
        assert_eq!(top_group_risk_ratio(&r, "c").unwrap(), 1.0);
    }

    #[test]
    fn sizes_larger_first() {
        assert_eq!(group_sizes(7, 3), vec![3, 2, 2]);
        assert_eq!(group_sizes(95, 10), vec![10, 10, 10, 10, 10, 9, 9, 9, 9, 9]);
    }

    #[test]
    fn zero_events() {
        let values = [1.0, 2.0];
        let outcomes = vec![outcome(false), outcome(false)];
        let r = everest("f", &values, &ids(2), &outcomes, &compromised(), 2).unwrap();
        assert_eq!(top_group_risk_ratio(&r, "c"), Err(EverestError::NotFinite));
    }

    #[test]
    fn ties_broken_by_id() {
        let values = [1.0, 1.0, 1.0, 1.0];
        let outcomes = vec![outcome(false), outcome(true), outcome(false), outcome(true)];
        let ids = ["d", "c", "b", "a"];
        let r = everest("f", &values, &ids, &outcomes, &compromised(), 2).unwrap();
        assert_eq!(r.groups, vec![vec![3, 2], vec![1, 0]]);
        assert_eq!(r.outcomes[0].group_rates, vec![0.5, 0.5]);
    }

    #[test]
    fn errors() {
        let o = vec![outcome(true); 3];
        assert!(matches!(
            everest("f", &[1.0, 2.0, 3.0], &ids(3), &o, &compromised(), 4),
            Err(EverestError::TooFewPatients { .. })
        ));
        assert!(matches!(
            everest("f", &[1.0, 2.0, 3.0], &ids(3), &o, &compromised(), 1),
            Err(EverestError::TooFewPatients { .. })
        ));
        assert_eq!(
            everest("f", &[1.0, f64::NAN, 3.0], &ids(3), &o, &compromised(), 2),
            Err(EverestError::SpecialValuePresent("p001".into()))
        );
    }

    #[test]
    fn standard_definitions() {
        let defs = OutcomeDefinition::standard_default();
        let o = Outcome {
            cord_ph: Some(7.05),
            compromise: true,
            split: Split::Test,
        };
        assert!(defs.iter().all(|d| d.holds(&o)));
        let o = Outcome {
            cord_ph: Some(7.06),
            ..o
        };
        assert_eq!(defs.iter().map(|d| d.holds(&o)).collect::<Vec<_>>(), vec![false, true, false]);
    }
}
