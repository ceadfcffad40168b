//! Technical-debt (TD) mining over peer-review issue threads.
//!
//! The crate covers the whole path from raw review comments to corpus-level
//! analytics:
//!
//! * [`corpus`]: GitHub issue crawling, JSONL persistence, sentence splitting,
//!   benchmark derivation and synonym-based augmentation.
//! * [`textfeat`]: tokenization, vocabulary and sparse BoW / TF-IDF vectors.
//! * [`learn`]: native multinomial and linear max-margin classifiers plus
//!   cross-validated confusion matrices.
//! * [`hierarchy`]: confusion-matrix normalization, class distances, spectral
//!   clustering with eigengap selection of the cluster count.
//! * [`pipeline`]: the two-stage detector (TD gate, cluster router, per-cluster
//!   leaf models).
//! * [`eval`]: stratified splits and A/P/R/F1 reports.
//! * [`analytics`]: distribution, Spearman correlation, trend, CAGR, impact.
//! * [`report`]: per-package JSON / static HTML reports.
//!
//! The `tdlens` binary wraps these behind subcommands (see [`cli`]).

pub mod analytics;
pub mod cli;
pub mod corpus;
pub mod eval;
pub mod hierarchy;
pub mod learn;
pub mod pipeline;
pub mod report;
pub mod synth;
pub mod textfeat;

mod floatstr;

pub use corpus::{LabeledSentence, RawComment, SentenceLabel, TdType};
pub use hierarchy::{ConfusionMatrix, DistanceMatrix, TypeHierarchy};
pub use learn::{ClassifierSpec, Prediction, TrainedClassifier};
pub use pipeline::{PipelineModel, TdInstance};
pub use textfeat::{SparseVector, Vocabulary};

/// Crate-wide error, wrapping the per-module errors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Crawl(#[from] corpus::crawl::CrawlError),
    #[error(transparent)]
    Feature(#[from] textfeat::FeatError),
    #[error(transparent)]
    Learn(#[from] learn::LearnError),
    #[error(transparent)]
    Hierarchy(#[from] hierarchy::HierarchyError),
    #[error(transparent)]
    Pipeline(#[from] pipeline::PipelineError),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
    #[error(transparent)]
    Analytics(#[from] analytics::AnalyticsError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Stable machine-readable category used in CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Corpus(_) => "corpus",
            Error::Crawl(_) => "crawl",
            Error::Feature(_) => "feature",
            Error::Learn(_) => "learn",
            Error::Hierarchy(_) => "hierarchy",
            Error::Pipeline(_) => "pipeline",
            Error::Eval(_) => "eval",
            Error::Analytics(_) => "analytics",
            Error::Io(_) => "io",
            Error::Usage(_) => "usage",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
