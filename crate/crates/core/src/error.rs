//! Error type shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field of view {0} deg, must be strictly inside (0, 180)")]
    InvalidFov(f64),
    #[error("invalid viewport size {0}x{1}, both sides must be >= 2")]
    InvalidViewportSize(usize, usize),
    #[error("frame too small: {width}x{height}, need at least {min}x{min}")]
    FrameTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("bit depth mismatch: {0} vs {1}")]
    BitDepthMismatch(u8, u8),
    #[error("empty series")]
    EmptySeries,
    #[error("empty tensor")]
    EmptyTensor,
    #[error("negative input not allowed for Minkowski pooling with non-integer p = {0}")]
    NegativeInput(f64),
    #[error("non-finite value in {0}")]
    NonFiniteInput(String),
    #[error("feature layout mismatch: model expects {expected:?}, got {got:?}")]
    LayoutMismatch { expected: String, got: String },
    #[error("too few groups: have {have}, need at least {need}")]
    TooFewGroups { have: usize, need: usize },
    #[error("zero variance in {0}, correlation undefined")]
    ZeroVariance(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("train/test splits overlap on {0:?}")]
    OverlapBetweenSplits(Vec<String>),
    #[error("split file does not cover manifest: {0}")]
    SplitMismatch(String),
    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("missing field `{field}` in {path}")]
    MissingField { path: PathBuf, field: String },
    #[error("dangling path for video `{video_id}`: {path} does not exist")]
    DanglingPath { video_id: String, path: PathBuf },
    #[error("duplicate video id `{0}` in manifest")]
    DuplicateVideoId(String),
    #[error("truncated file {path} at frame {frame}")]
    TruncatedFile { path: PathBuf, frame: usize },
    #[error("unknown frame format for {0}")]
    FormatUnknown(PathBuf),
    #[error("feature cache provenance mismatch: {0}")]
    ProvenanceMismatch(String),
    #[error("frame count mismatch: reference has {0}, distorted has {1}")]
    FrameCountMismatch(usize, usize),
    #[error("feature {0} is only defined on ERP frames (projection mode)")]
    FeatureNotApplicable(String),
    #[error("unknown feature name `{0}`")]
    UnknownFeature(String),
    #[error("invalid pooling config: {0}")]
    InvalidPoolingConfig(String),
    #[error("empty hyperparameter grid")]
    EmptyGrid,
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
