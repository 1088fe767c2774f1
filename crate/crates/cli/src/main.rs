//! `vq360`: viewport-based quality estimation pipeline for 360-degree
//! video. Subcommands cover feature extraction, temporal pooling,
//! model training/prediction, evaluation, repeated cross-validation,
//! feature selection, and the viewport-sampling sweep.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vq360_core::geometry::PatternKind;
use vq360_core::pooling::PoolingKind;
use vq360_core::regress::ModelKind;
use vq360_core::tensor::FeatureMode;

mod commands;

#[derive(Parser)]
#[command(
    name = "vq360",
    version,
    about = "Full-reference quality estimation for 360-degree video",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Run configuration file (JSON); flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Render viewports and write per-video feature caches.
    Features {
        #[command(flatten)]
        config: ConfigArg,
        /// Dataset manifest (JSON).
        #[arg(long)]
        manifest: PathBuf,
        /// Output directory for feature caches.
        #[arg(long)]
        out: PathBuf,
        /// Where metrics are computed: projection, collage, or vp.
        #[arg(long)]
        mode: Option<FeatureMode>,
        /// Viewport sampling pattern: uniform, tropical, or equatorial.
        #[arg(long)]
        pattern: Option<PatternKind>,
        /// Field of view in degrees.
        #[arg(long)]
        fov: Option<f64>,
        /// Worker parallelism across videos (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Pool cached per-frame features into the per-video table.
    Pool {
        #[command(flatten)]
        config: ConfigArg,
        /// Feature cache directory written by `features`.
        #[arg(long)]
        cache: PathBuf,
        /// Dataset manifest (JSON).
        #[arg(long)]
        manifest: PathBuf,
        /// Output pooled table (CSV).
        #[arg(long)]
        out: PathBuf,
        /// Pooling kind: hvs, mean, minkowski, or percentile.
        #[arg(long)]
        pooling: Option<PoolingKind>,
        /// Recency time constant in frames (default: F/3).
        #[arg(long)]
        tau: Option<f64>,
        /// Minkowski order.
        #[arg(long)]
        p: Option<f64>,
        /// Percentile pooling keeps the worst k percent.
        #[arg(long)]
        k_percent: Option<f64>,
    },
    /// Tune hyper-parameters on grouped shuffles and train a model.
    Train {
        /// Pooled table (CSV).
        #[arg(long)]
        table: PathBuf,
        /// Regressor kind: rfr, gbr, or svr.
        #[arg(long, default_value = "rfr")]
        kind: ModelKind,
        /// Hyper-parameter grid file (JSON array); default built-in grid.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Grouped shuffles per grid point.
        #[arg(long, default_value_t = 10)]
        tune_repeats: usize,
        /// Validation fraction per shuffle.
        #[arg(long, default_value_t = 0.2)]
        tune_fraction: f64,
        /// RNG seed.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output model file (JSON); the tuning report lands next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply a trained model to a pooled table.
    Predict {
        /// Trained model (JSON).
        #[arg(long)]
        model: PathBuf,
        /// Pooled table (CSV).
        #[arg(long)]
        table: PathBuf,
        /// Output predictions (CSV: video_id,prediction).
        #[arg(long)]
        out: PathBuf,
    },
    /// Correlation/error report for predictions or a raw metric column.
    Evaluate {
        /// Input CSV holding the score column (predictions CSV or
        /// pooled table).
        #[arg(long)]
        input: PathBuf,
        /// Column to evaluate.
        #[arg(long, default_value = "prediction")]
        score_col: String,
        /// Pooled table supplying dmos/groups when the input has none.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Fit the 4-parameter logistic map before scoring (the
        /// non-learned-baseline protocol).
        #[arg(long)]
        logistic_fit: bool,
        /// Split file; fit on [train], report on [test].
        #[arg(long)]
        split: Option<PathBuf>,
        /// Output report (JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeated grouped-shuffle cross-validation.
    Cv {
        /// Pooled table (CSV).
        #[arg(long)]
        table: PathBuf,
        /// Regressor kind: rfr, gbr, or svr.
        #[arg(long, default_value = "rfr")]
        kind: ModelKind,
        /// Reuse the hyper-parameters stored in a trained model.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Hyper-parameters file (JSON); default per-kind defaults.
        #[arg(long)]
        hyperparams: Option<PathBuf>,
        /// Number of grouped shuffles.
        #[arg(long, default_value_t = 1000)]
        repeats: usize,
        /// Test fraction per shuffle.
        #[arg(long, default_value_t = 0.2)]
        fraction: f64,
        /// RNG seed.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output directory (report JSON + per-repeat CSV).
        #[arg(long)]
        out: PathBuf,
    },
    /// Sequential forward feature selection trace.
    Sffs {
        /// Pooled table (CSV).
        #[arg(long)]
        table: PathBuf,
        /// Maximum number of feature ids to select.
        #[arg(long, default_value_t = 4)]
        max_features: usize,
        /// Regressor kind: rfr, gbr, or svr.
        #[arg(long, default_value = "rfr")]
        kind: ModelKind,
        /// Grouped shuffles per candidate.
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        /// Validation fraction per shuffle.
        #[arg(long, default_value_t = 0.2)]
        fraction: f64,
        /// RNG seed.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Output directory (trace JSON + CSV).
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a small deterministic synthetic dataset (videos +
    /// manifest) for smoke runs.
    Synth {
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Number of reference contents.
        #[arg(long, default_value_t = 12)]
        contents: usize,
        /// Distortion levels per content.
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Frames per video.
        #[arg(long, default_value_t = 4)]
        frames: usize,
        /// ERP width (height is width/2).
        #[arg(long, default_value_t = 64)]
        width: usize,
        /// RNG seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Per-metric correlation sweep over sampling patterns and FoVs.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// Dataset manifest (JSON) with dmos.
        #[arg(long)]
        manifest: PathBuf,
        /// Patterns to sweep, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "uniform,tropical")]
        patterns: Vec<PatternKind>,
        /// FoVs in degrees, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "30,40,50")]
        fovs: Vec<f64>,
        /// Also evaluate the raw projection domain.
        #[arg(long, default_value_t = true)]
        include_projection: bool,
        /// Worker parallelism across videos.
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
