//! Seeded FHR-like test cohorts: baseline plus AR(1) noise, with amplitude
//! spikes planted in the low-pH half.

use std::path::{Path, PathBuf};

use ctgfeat_core::seed::derive_seed;
use ctgfeat_core::series::FHR_SAMPLE_RATE_HZ;
use ctgfeat_core::{LabeledDataset, Outcome, Split, TimeSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::io::{self, IoError, ManifestRecord};

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub n_series: usize,
    /// Samples per series; 7200 is 30 min at 4 Hz.
    pub length: usize,
    pub baseline_bpm: f64,
    /// Between-series spread of the baseline.
    pub baseline_sd: f64,
    pub ar_coeff: f64,
    /// Innovation standard deviation is drawn uniformly from this range per
    /// series.
    pub noise_sd: (f64, f64),
    /// Fraction of series that carry the planted effect (and low pH).
    pub planted_fraction: f64,
    /// Expected spikes per sample in planted series.
    pub spike_rate: f64,
    /// Spike height in units of the series' stationary standard deviation.
    pub spike_amplitude: (f64, f64),
    /// Spike duration in samples.
    pub spike_len: (usize, usize),
    /// Added to the AR coefficient in planted series.
    pub regularity_shift: f64,
    /// Chance that a series gets a few short missing stretches.
    pub gap_probability: f64,
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_series: 120,
            length: 7200,
            baseline_bpm: 140.0,
            baseline_sd: 8.0,
            ar_coeff: 0.95,
            noise_sd: (0.4, 2.4),
            planted_fraction: 0.5,
            spike_rate: 0.002,
            spike_amplitude: (6.0, 10.0),
            spike_len: (4, 12),
            regularity_shift: 0.0,
            gap_probability: 0.3,
            train_fraction: 0.7,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.n_series < 4 {
            return Err(format!("n_series must be at least 4, got {}", self.n_series));
        }
        if self.length < 400 {
            return Err(format!("length must be at least 400, got {}", self.length));
        }
        if !(0.0..1.0).contains(&self.ar_coeff) || self.ar_coeff + self.regularity_shift >= 1.0 {
            return Err("AR coefficients must lie in [0, 1)".into());
        }
        if !(self.noise_sd.0 > 0.0 && self.noise_sd.0 <= self.noise_sd.1) {
            return Err("noise_sd range must be positive and ordered".into());
        }
        if !(0.0..=1.0).contains(&self.planted_fraction) || !(0.0..=1.0).contains(&self.train_fraction) {
            return Err("fractions must lie in [0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.gap_probability) || !(self.spike_rate >= 0.0) {
            return Err("gap_probability must lie in [0, 1] and spike_rate be non-negative".into());
        }
        if self.spike_len.0 < 1 || self.spike_len.0 > self.spike_len.1 {
            return Err("spike_len range must be positive and ordered".into());
        }
        if self.spike_amplitude.0 > self.spike_amplitude.1 || self.baseline_sd < 0.0 {
            return Err("spike_amplitude range must be ordered and baseline_sd non-negative".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSeries {
    pub series: TimeSeries,
    pub outcome: Outcome,
    pub planted: bool,
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn series_id(i: usize) -> String {
    format!("s{i:04}")
}

fn generate_one(cfg: &SynthConfig, i: usize, planted: bool) -> SynthSeries {
    let id = series_id(i);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "synth", &id));
    let baseline = cfg.baseline_bpm + cfg.baseline_sd * rng.sample::<f64, _>(rand_distr::StandardNormal);
    let sd = rng.random_range(cfg.noise_sd.0..=cfg.noise_sd.1);
    let phi = cfg.ar_coeff + if planted { cfg.regularity_shift } else { 0.0 };
    let innovation = Normal::new(0.0, sd).expect("positive sd");
    let stationary_sd = sd / (1.0 - phi * phi).sqrt();

    let mut x = stationary_sd * rng.sample::<f64, _>(rand_distr::StandardNormal);
    let mut values: Vec<f64> = (0..cfg.length)
        .map(|_| {
            x = phi * x + innovation.sample(&mut rng);
            baseline + x
        })
        .collect();

    if planted {
        let n_spikes = (cfg.spike_rate * cfg.length as f64).round() as usize;
        for _ in 0..n_spikes {
            let len = rng.random_range(cfg.spike_len.0..=cfg.spike_len.1);
            let start = rng.random_range(0..cfg.length - len);
            let height = stationary_sd * rng.random_range(cfg.spike_amplitude.0..=cfg.spike_amplitude.1);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            for k in 0..len {
                // Trapezoid: one-sample ramps at each end.
                let edge = k == 0 || k + 1 == len;
                values[start + k] += sign * height * if edge { 0.5 } else { 1.0 };
            }
        }
    }

    let mut samples: Vec<Option<f64>> = values.into_iter().map(|v| Some(round2(v))).collect();
    if rng.random_bool(cfg.gap_probability) {
        for _ in 0..rng.random_range(1..=3) {
            let len = rng.random_range(1..=40).min(cfg.length / 10);
            let start = rng.random_range(1..cfg.length - len - 1);
            for s in &mut samples[start..start + len] {
                *s = None;
            }
        }
    }

    let cord_ph = if planted {
        round2(rng.random_range(6.95..=7.10))
    } else {
        round2(rng.random_range(7.11..=7.40))
    };
    let compromise = rng.random_bool(if planted { 0.6 } else { 0.2 });
    let split = if rng.random_bool(cfg.train_fraction) {
        Split::Train
    } else {
        Split::Test
    };
    SynthSeries {
        series: TimeSeries::from_samples(id, &samples, FHR_SAMPLE_RATE_HZ).expect("finite samples"),
        outcome: Outcome {
            cord_ph: Some(cord_ph),
            compromise,
            split,
        },
        planted,
    }
}

/// Planted series are spread evenly through the cohort.
pub fn generate_synthetic(cfg: &SynthConfig) -> Vec<SynthSeries> {
    let n_planted = (cfg.planted_fraction * cfg.n_series as f64).round() as usize;
    (0..cfg.n_series)
        .map(|i| {
            // Bresenham-style interleaving of planted and control series.
            let planted = (i + 1) * n_planted / cfg.n_series > i * n_planted / cfg.n_series;
            generate_one(cfg, i, planted)
        })
        .collect()
}

pub fn to_dataset(cohort: &[SynthSeries]) -> LabeledDataset {
    LabeledDataset::new(
        cohort.iter().map(|s| s.series.clone()).collect(),
        cohort.iter().map(|s| s.outcome.clone()).collect(),
    )
    .expect("generated ids are unique and pH in range")
}

pub const MANIFEST_NAME: &str = "manifest.csv";

/// Writes `manifest.csv` and `series/<id>.txt` under `dir`; returns the
/// manifest path.
pub fn write_cohort(dir: &Path, cohort: &[SynthSeries]) -> Result<PathBuf, IoError> {
    let mut records = Vec::with_capacity(cohort.len());
    for s in cohort {
        let rel = PathBuf::from("series").join(format!("{}.txt", s.series.id()));
        io::write_series_file(&dir.join(&rel), &s.series)?;
        records.push(ManifestRecord {
            id: s.series.id().to_string(),
            series_file: rel,
            outcome: s.outcome.clone(),
        });
    }
    let manifest = dir.join(MANIFEST_NAME);
    io::write_manifest(&manifest, &records)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SynthConfig {
        SynthConfig {
            n_series: 10,
            length: 800,
            seed: 5,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn reproducible() {
        assert_eq!(generate_synthetic(&small()), generate_synthetic(&small()));
        let other = SynthConfig { seed: 6, ..small() };
        assert_ne!(generate_synthetic(&small()), generate_synthetic(&other));
    }

    #[test]
    fn planted_half_has_low_ph() {
        let cohort = generate_synthetic(&small());
        assert_eq!(cohort.iter().filter(|s| s.planted).count(), 5);
        for s in &cohort {
            let ph = s.outcome.cord_ph.unwrap();
            assert_eq!(s.planted, ph <= 7.1, "{ph}");
        }
    }

    #[test]
    fn values_are_rounded() {
        for s in generate_synthetic(&small()) {
            for v in s.series.samples().flatten() {
                assert_eq!(round2(v), v);
            }
        }
    }

    #[test]
    fn validation() {
        assert!(SynthConfig { n_series: 3, ..small() }.validate().is_err());
        assert!(SynthConfig { length: 399, ..small() }.validate().is_err());
        assert!(small().validate().is_ok());
    }
}
