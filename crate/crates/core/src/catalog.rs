//! Feature registry: named, parameterised scalar maps.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::correlation::{auto_mutual_info, autocorr, first_min_auto_mutual_info, first_zero_autocorr};
use crate::entropy::EntropyParams;
use crate::features::{self as f, FeatureError, FeatureValue, LocalStat, LocalWindowParams};
use crate::math;
use crate::series::TimeSeries;

/// A user-supplied feature: complete series values and a seed in, value out.
pub type CustomFeature = fn(&[f64], u64) -> FeatureValue;

#[derive(Clone, Copy, Debug)]
pub enum FeatureKind {
    TrevMiNum { max_lag: usize, n_bins: usize },
    OutlierTestStd { trim_percent: usize },
    SpreadRandomLocal {
        window_len: usize,
        n_windows: usize,
        entropy: EntropyParams,
        stat: LocalStat,
    },
    DynTransMinEigFexp { max_alphabet: usize },
    CoeffVar2,
    MeanAbsDevMedian,
    SimpleFitExp1Rmse { n_bins: usize },
    Embed2AreaRatio,
    Mean,
    Std,
    Median,
    AutoCorr { lag: usize },
    FirstZeroAutoCorr,
    AutoMutualInfo { lag: usize, n_bins: usize },
    FirstMinAutoMutualInfo { max_lag: usize, n_bins: usize },
    Custom(CustomFeature),
}

impl FeatureKind {
    /// Numeric parameters, for provenance records.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        use FeatureKind::*;
        match *self {
            TrevMiNum { max_lag, n_bins } => vec![("max_lag", max_lag as f64), ("n_bins", n_bins as f64)],
            OutlierTestStd { trim_percent } => vec![("trim_percent", trim_percent as f64)],
            SpreadRandomLocal {
                window_len,
                n_windows,
                entropy,
                ..
            } => vec![
                ("window_len", window_len as f64),
                ("n_windows", n_windows as f64),
                ("m", entropy.m as f64),
                ("r_frac", entropy.r_frac),
            ],
            DynTransMinEigFexp { max_alphabet } => vec![("max_alphabet", max_alphabet as f64)],
            SimpleFitExp1Rmse { n_bins } => vec![("n_bins", n_bins as f64)],
            AutoCorr { lag } => vec![("lag", lag as f64)],
            AutoMutualInfo { lag, n_bins } => vec![("lag", lag as f64), ("n_bins", n_bins as f64)],
            FirstMinAutoMutualInfo { max_lag, n_bins } => {
                vec![("max_lag", max_lag as f64), ("n_bins", n_bins as f64)]
            }
            CoeffVar2 | MeanAbsDevMedian | Embed2AreaRatio | Mean | Std | Median
            | FirstZeroAutoCorr | Custom(_) => Vec::new(),
        }
    }

    /// Evaluates on complete values. `seed` is used only by randomised
    /// features.
    pub fn evaluate(&self, xs: &[f64], seed: u64) -> FeatureValue {
        use FeatureKind::*;
        let r: Result<f64, FeatureError> = match *self {
            TrevMiNum { max_lag, n_bins } => f::f_trev_mi_num(xs, max_lag, n_bins),
            OutlierTestStd { trim_percent } => f::f_outliertest_std(xs, trim_percent),
            SpreadRandomLocal {
                window_len,
                n_windows,
                entropy,
                stat,
            } => {
                let w = LocalWindowParams {
                    window_len,
                    n_windows,
                    seed,
                };
                f::f_spread_random_local(xs, &w, entropy, stat)
            }
            DynTransMinEigFexp { max_alphabet } => f::f_dyntrans_mineig_fexp(xs, max_alphabet),
            CoeffVar2 => f::f_coeff_var_2(xs),
            MeanAbsDevMedian => f::f_mean_abs_dev_median(xs),
            SimpleFitExp1Rmse { n_bins } => f::f_simplefit_exp1_rmse(xs, n_bins),
            Embed2AreaRatio => f::f_embed2_arearat(xs),
            Mean if !xs.is_empty() => Ok(math::mean(xs)),
            Std if xs.len() > 1 => Ok(math::sample_std(xs)),
            Median if !xs.is_empty() => Ok(math::median(xs)),
            Mean | Std | Median => Err(FeatureError::SeriesTooShort { needed: 2, got: xs.len() }),
            AutoCorr { lag } => autocorr(xs, lag).map_err(Into::into),
            FirstZeroAutoCorr if xs.len() > 3 => first_zero_autocorr(xs, xs.len() - 3)
                .map(|l| l as f64)
                .map_err(Into::into),
            FirstZeroAutoCorr => Err(FeatureError::SeriesTooShort { needed: 4, got: xs.len() }),
            AutoMutualInfo { lag, n_bins } => auto_mutual_info(xs, lag, n_bins).map_err(Into::into),
            FirstMinAutoMutualInfo { max_lag, n_bins } => first_min_auto_mutual_info(xs, max_lag, n_bins)
                .map(|l| l as f64)
                .map_err(Into::into),
            Custom(func) => return func(xs, seed),
        };
        FeatureValue::from_result(r)
    }
}

#[derive(Clone, Debug)]
pub struct FeatureDescriptor {
    pub name: String,
    pub params: Vec<(&'static str, f64)>,
    pub kind: FeatureKind,
}

impl FeatureDescriptor {
    pub fn new(name: impl Into<String>, kind: FeatureKind) -> Self {
        Self {
            name: name.into(),
            params: kind.params(),
            kind,
        }
    }

    pub fn custom(name: impl Into<String>, func: CustomFeature) -> Self {
        Self::new(name, FeatureKind::Custom(func))
    }

    /// Series with missing samples evaluate to `NotFinite`.
    pub fn evaluate(&self, series: &TimeSeries, seed: u64) -> FeatureValue {
        match series.complete_values() {
            Ok(xs) => self.kind.evaluate(xs, seed),
            Err(e) => FeatureValue::from_result(Err(e.into())),
        }
    }
}

pub const CO_TREV_MI_NUM: &str = "CO_trev_mi_num";
pub const DN_OUTLIERTEST2_STD: &str = "DN_OutlierTest2_std";
pub const SY_SPREADRANDOMLOCAL_MEANAPEN: &str = "SY_SpreadRandomLocal_200_meanapen1_02";
pub const ST_DYNTRANS_MINEIGFEXP: &str = "ST_dyntrans40_1_mineigfexp_adjr2";
pub const SY_SPREADRANDOMLOCAL_STDSAMPEN: &str = "SY_SpreadRandomLocal_200_stdsampen1_02";
pub const COEFF_VAR_2: &str = "coeff_var_2";
pub const MEDIAN_ABSOLUTE_DEVIATION: &str = "median_absolute_deviation";
pub const DN_SIMPLEFIT_EXP1_RMSE: &str = "DN_SimpleFit_exp1_rmse_h30";
pub const CO_EMBED2_AREARAT: &str = "CO_Embed2_tau_arearat";

/// The nine selected FHR features, classification set first.
pub const SELECTED_FEATURES: [&str; 9] = [
    CO_TREV_MI_NUM,
    DN_OUTLIERTEST2_STD,
    SY_SPREADRANDOMLOCAL_MEANAPEN,
    ST_DYNTRANS_MINEIGFEXP,
    SY_SPREADRANDOMLOCAL_STDSAMPEN,
    COEFF_VAR_2,
    MEDIAN_ABSOLUTE_DEVIATION,
    DN_SIMPLEFIT_EXP1_RMSE,
    CO_EMBED2_AREARAT,
];

/// The nine selected features followed by generic summary features so that
/// filtering and clustering have more columns to work with.
pub fn catalog_default() -> Vec<FeatureDescriptor> {
    use FeatureKind::*;
    let entropy = EntropyParams { m: 1, r_frac: 0.2 };
    let local = |stat| SpreadRandomLocal {
        window_len: 200,
        n_windows: 100,
        entropy,
        stat,
    };
    let d = FeatureDescriptor::new;
    vec![
        d(CO_TREV_MI_NUM, TrevMiNum { max_lag: 40, n_bins: 10 }),
        d(DN_OUTLIERTEST2_STD, OutlierTestStd { trim_percent: 2 }),
        d(SY_SPREADRANDOMLOCAL_MEANAPEN, local(LocalStat::MeanApEn)),
        d(ST_DYNTRANS_MINEIGFEXP, DynTransMinEigFexp { max_alphabet: 40 }),
        d(SY_SPREADRANDOMLOCAL_STDSAMPEN, local(LocalStat::StdSampEn)),
        d(COEFF_VAR_2, CoeffVar2),
        d(MEDIAN_ABSOLUTE_DEVIATION, MeanAbsDevMedian),
        d(DN_SIMPLEFIT_EXP1_RMSE, SimpleFitExp1Rmse { n_bins: 30 }),
        d(CO_EMBED2_AREARAT, Embed2AreaRatio),
        d("DN_Mean", Mean),
        d("DN_Std", Std),
        d("DN_Median", Median),
        d("CO_AutoCorr_1", AutoCorr { lag: 1 }),
        d("CO_AutoCorr_2", AutoCorr { lag: 2 }),
        d("CO_AutoCorr_3", AutoCorr { lag: 3 }),
        d("CO_FirstZero_ac", FirstZeroAutoCorr),
        d("CO_HistogramAMI_1_10", AutoMutualInfo { lag: 1, n_bins: 10 }),
        d("CO_FirstMin_ami_10", FirstMinAutoMutualInfo { max_lag: 40, n_bins: 10 }),
    ]
}

/// Looks up a descriptor by name.
pub fn find<'a>(catalog: &'a [FeatureDescriptor], name: &str) -> Option<&'a FeatureDescriptor> {
    catalog.iter().find(|d| d.name == name)
}

/// Names in catalog order.
pub fn names(catalog: &[FeatureDescriptor]) -> Vec<String> {
    catalog.iter().map(|d| d.name.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    #[test]
    fn contains_the_nine_features_once() {
        let cat = catalog_default();
        for name in SELECTED_FEATURES {
            assert!(find(&cat, name).is_some(), "{name}");
        }
        let unique: BTreeSet<_> = cat.iter().map(|d| d.name.as_str()).collect();
        assert_eq!(unique.len(), cat.len());
        assert!(cat.len() > 9);
    }

    #[test]
    fn params_recorded() {
        let cat = catalog_default();
        let d = find(&cat, SY_SPREADRANDOMLOCAL_STDSAMPEN).unwrap();
        assert!(d.params.contains(&("window_len", 200.0)));
        assert!(d.params.contains(&("r_frac", 0.2)));
        let d = find(&cat, ST_DYNTRANS_MINEIGFEXP).unwrap();
        assert_eq!(d.params, vec![("max_alphabet", 40.0)]);
    }

    #[test]
    fn missing_samples_evaluate_not_finite() {
        let s = TimeSeries::from_samples("m", &[Some(1.0), None, Some(2.0)], 4.0).unwrap();
        let cat = catalog_default();
        assert!(cat[5].evaluate(&s, 0).is_special());
    }
}
