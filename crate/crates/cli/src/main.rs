use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctgfeat::commands::{self, CliError, EverestArgs, ExtractArgs, RegressArgs, SelectArgs, SplitChoice};
use ctgfeat::synth::SynthConfig;
use ctgfeat_core::dataset::{CLASSIFICATION_PH_THRESHOLD, EVEREST_PH_THRESHOLD};
use ctgfeat_core::select::{ClusterCount, PValueMethod};
use ctgfeat_core::PreprocessConfig;

#[derive(Parser)]
#[command(name = "ctgfeat", version, about = "Time-series feature extraction and selection for fetal heart rate recordings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the feature catalog on every series of a dataset.
    Extract {
        #[arg(long)]
        dataset: PathBuf,
        /// Matrix CSV to write.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        pre: PreprocessArgs,
        /// Skip gap interpolation, trimming and rejection.
        #[arg(long)]
        raw: bool,
    },
    /// Classification-based feature selection with FDR control and clustering.
    Select {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.001, allow_negative_numbers = true)]
        fdr: f64,
        /// Number of clusters, or `auto`.
        #[arg(long, default_value = "auto", value_parser = parse_clusters)]
        clusters: ClusterCount,
        #[arg(long, default_value_t = 1000)]
        n_perm: usize,
        /// Defaults to the seed stored with the matrix.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = CLASSIFICATION_PH_THRESHOLD)]
        ph_threshold: f64,
        #[arg(long, value_enum, default_value_t = PValue::Gaussian)]
        pvalue: PValue,
        #[arg(long, value_enum, default_value_t = SplitArg::All)]
        split: SplitArg,
    },
    /// Rank features by |R| with cord pH and cluster the strongest.
    Regress {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        n_perm: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// How many of the strongest features to cluster.
        #[arg(long, default_value_t = 20)]
        top: usize,
        #[arg(long, default_value = "auto", value_parser = parse_clusters)]
        clusters: ClusterCount,
    },
    /// Event rates across equally populated groups of one feature.
    Everest {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        feature: String,
        #[arg(long, default_value_t = 10)]
        groups: usize,
        #[arg(long, default_value_t = EVEREST_PH_THRESHOLD)]
        ph_threshold: f64,
    },
    /// Write a seeded synthetic cohort.
    Synth {
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 120)]
        n_series: usize,
        #[arg(long, default_value_t = 7200)]
        length: usize,
        #[arg(long, default_value_t = 0.5)]
        planted_fraction: f64,
        #[arg(long, default_value_t = 0.002)]
        spike_rate: f64,
    },
    /// Interpolate short gaps, trim and reject series; write the cleaned dataset.
    Preprocess {
        #[arg(long)]
        dataset: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        pre: PreprocessArgs,
    },
}

#[derive(Args)]
struct PreprocessArgs {
    /// Longest interior gap (samples) to interpolate.
    #[arg(long, default_value_t = 60)]
    max_gap: usize,
    /// Reject series missing more than this fraction after trimming.
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    max_missing_frac: f64,
}

impl PreprocessArgs {
    fn config(&self) -> PreprocessConfig {
        PreprocessConfig {
            max_interp_gap_samples: self.max_gap,
            max_missing_fraction: self.max_missing_frac,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PValue {
    Gaussian,
    Empirical,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    All,
    Train,
    Test,
}

fn parse_clusters(s: &str) -> Result<ClusterCount, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(ClusterCount::Auto);
    }
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(ClusterCount::Fixed(k)),
        _ => Err(format!("expected a positive integer or `auto`, got {s:?}")),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Extract { dataset, out, seed, pre, raw } => {
            let s = commands::run_extract(&ExtractArgs {
                dataset,
                out: out.clone(),
                seed,
                preprocess: (!raw).then(|| pre.config()),
            })?;
            println!("wrote {} ({} series x {} features)", out.display(), s.rows, s.columns);
            for r in &s.rejected {
                println!("rejected {} (missing fraction {:.3})", r.id, r.missing_fraction);
            }
            if !s.special_columns.is_empty() {
                println!("columns with special values: {}", s.special_columns.join(", "));
            }
        }
        Command::Select { matrix, dataset, out, fdr, clusters, n_perm, seed, ph_threshold, pvalue, split } => {
            let r = commands::run_select(&SelectArgs {
                matrix,
                dataset,
                out: out.clone(),
                fdr,
                clusters,
                n_perm,
                seed,
                ph_threshold,
                pvalue: match pvalue {
                    PValue::Gaussian => PValueMethod::GaussianNull,
                    PValue::Empirical => PValueMethod::Empirical,
                },
                split: match split {
                    SplitArg::All => SplitChoice::All,
                    SplitArg::Train => SplitChoice::Train,
                    SplitArg::Test => SplitChoice::Test,
                },
            })?;
            println!(
                "{}: {} of {} features selected, {} clusters; representatives: {}",
                r.status,
                r.selected.len(),
                r.scores.len(),
                r.clusters.len(),
                r.representatives.join(", ")
            );
            println!("report in {}", out.display());
        }
        Command::Regress { matrix, dataset, out, n_perm, seed, top, clusters } => {
            let r = commands::run_regress(&RegressArgs { matrix, dataset, out: out.clone(), n_perm, seed, top, clusters })?;
            for e in r.ranking.iter().take(5) {
                println!("{:<45} R = {:+.3}  p = {:.4}", e.name, e.r, e.p_value);
            }
            println!("representatives: {}", r.representatives.join(", "));
            println!("report in {}", out.display());
        }
        Command::Everest { matrix, dataset, out, feature, groups, ph_threshold } => {
            let r = commands::run_everest(&EverestArgs { matrix, dataset, out: out.clone(), feature, groups, ph_threshold })?;
            for o in &r.outcomes {
                let ratio = o.top_group_risk_ratio.map_or("n/a".into(), |v| format!("{v:.2}"));
                println!("{:<24} overall {:.3}  top-group risk ratio {}", o.name, o.overall_rate, ratio);
            }
            println!("report in {}", out.display());
        }
        Command::Synth { out, seed, n_series, length, planted_fraction, spike_rate } => {
            let cfg = SynthConfig { n_series, length, planted_fraction, spike_rate, seed, ..SynthConfig::default() };
            let manifest = commands::run_synth(&out, &cfg)?;
            println!("wrote {}", manifest.display());
        }
        Command::Preprocess { dataset, out, pre } => {
            let s = commands::run_preprocess(&dataset, &out, &pre.config())?;
            println!("kept {} series, rejected {}", s.kept, s.rejected.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
