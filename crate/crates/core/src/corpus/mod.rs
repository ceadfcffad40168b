//! Review-comment corpus: ingestion, persistence, sentence splitting, the
//! labeled benchmark and its augmentation.

pub mod augment;
pub mod benchmark;
pub mod crawl;
pub mod io;
pub mod sentences;

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use augment::{augment, default_targets, PartOfSpeech, SynonymLexicon};
pub use benchmark::{derive_benchmark, BenchmarkOutput, LabeledPhrase};
pub use io::{
    load_corpus, load_dataset, load_lexicon, load_phrases, persist_corpus, read_jsonl,
    read_jsonl_from, write_dataset, write_jsonl, CorpusWriter,
};
pub use sentences::split_sentences;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization error at {path}:{line}: {message}")]
    Serialization {
        path: String,
        line: usize,
        message: String,
    },
    #[error("duplicate comment_id {0}")]
    DuplicateCommentId(String),
    #[error("unknown TD type {0:?}")]
    UnknownType(String),
    #[error("unknown sentence label {0:?}")]
    UnknownLabel(String),
    #[error("invalid lexicon entry for {word:?}: {reason}")]
    InvalidLexicon { word: String, reason: String },
    #[error("augmentation target for {td_type} ({target}) is below its current count ({current})")]
    TargetBelowCurrent {
        td_type: TdType,
        target: usize,
        current: usize,
    },
    #[error("no {0} sentence has a replaceable adjective or verb")]
    InsufficientLexicon(TdType),
}

/// The ten technical-debt categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TdType {
    Documentation,
    Code,
    Design,
    Defect,
    Requirement,
    Test,
    Architecture,
    Build,
    Usability,
    Versioning,
}

impl TdType {
    pub const ALL: [TdType; 10] = [
        TdType::Documentation,
        TdType::Code,
        TdType::Design,
        TdType::Defect,
        TdType::Requirement,
        TdType::Test,
        TdType::Architecture,
        TdType::Build,
        TdType::Usability,
        TdType::Versioning,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TdType::Documentation => "documentation",
            TdType::Code => "code",
            TdType::Design => "design",
            TdType::Defect => "defect",
            TdType::Requirement => "requirement",
            TdType::Test => "test",
            TdType::Architecture => "architecture",
            TdType::Build => "build",
            TdType::Usability => "usability",
            TdType::Versioning => "versioning",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// All type names in canonical order.
    pub fn names() -> Vec<String> {
        Self::ALL.iter().map(|t| t.name().to_string()).collect()
    }
}

impl fmt::Display for TdType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TdType {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        TdType::ALL
            .into_iter()
            .find(|t| t.name() == lower)
            .ok_or_else(|| CorpusError::UnknownType(s.to_string()))
    }
}

/// Sentence-level label: not technical debt, or one of the ten types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SentenceLabel {
    NonTd,
    Td(TdType),
}

impl SentenceLabel {
    pub const NON_TD: &'static str = "non_td";

    /// The 11 label values, non-TD first.
    pub fn all() -> Vec<SentenceLabel> {
        std::iter::once(SentenceLabel::NonTd)
            .chain(TdType::ALL.into_iter().map(SentenceLabel::Td))
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            SentenceLabel::NonTd => Self::NON_TD,
            SentenceLabel::Td(t) => t.name(),
        }
    }

    pub fn td_type(self) -> Option<TdType> {
        match self {
            SentenceLabel::NonTd => None,
            SentenceLabel::Td(t) => Some(t),
        }
    }

    pub fn is_td(self) -> bool {
        matches!(self, SentenceLabel::Td(_))
    }
}

impl fmt::Display for SentenceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SentenceLabel {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case(Self::NON_TD) {
            return Ok(SentenceLabel::NonTd);
        }
        s.parse::<TdType>()
            .map(SentenceLabel::Td)
            .map_err(|_| CorpusError::UnknownLabel(s.to_string()))
    }
}

impl Serialize for SentenceLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for SentenceLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// One comment of a review thread, with provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawComment {
    pub platform: String,
    pub package: String,
    pub issue_number: u64,
    pub comment_id: String,
    pub created_at: DateTime<Utc>,
    pub body: String,
    pub url: String,
}

/// A labeled sentence of the benchmark dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub text: String,
    pub label: SentenceLabel,
    pub comment_id: String,
    pub package: String,
    pub platform: String,
    pub created_at: DateTime<Utc>,
    #[serde(default)]
    pub augmented: bool,
}
