//! Tokenization, vocabulary construction and sparse BoW / TF-IDF vectors.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FeatError {
    #[error("no documents to build a vocabulary from")]
    NoDocuments,
    #[error("vocabulary is empty after filtering")]
    EmptyVocabulary,
    #[error("invalid sparse vector: {0}")]
    InvalidVector(String),
}

/// Short English function-word list. Deliberately excludes domain words
/// such as "via", "test" or "version".
pub const STOP_WORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
    "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for",
    "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself",
    "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it", "it's", "its", "itself",
    "just", "me", "more", "most", "my", "myself", "no", "nor", "not", "now", "of", "off", "on",
    "once", "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same", "she",
    "should", "so", "some", "such", "than", "that", "the", "their", "theirs", "them",
    "themselves", "then", "there", "these", "they", "this", "those", "through", "to", "too",
    "under", "until", "up", "very", "was", "we", "were", "what", "when", "where", "which",
    "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours", "yourself",
    "yourselves",
];

fn is_stop_word(token: &str) -> bool {
    STOP_WORDS.binary_search(&token).is_ok()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    pub stop_words: bool,
    pub min_token_len: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            lowercase: true,
            stop_words: true,
            min_token_len: 2,
        }
    }
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Tokenizes with the default configuration.
pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_with(text, &TokenizerConfig::default())
}

/// Splits on anything but alphanumerics, `_` and internal apostrophes.
pub fn tokenize_with(text: &str, config: &TokenizerConfig) -> Vec<String> {
    let text = if config.lowercase {
        text.to_lowercase()
    } else {
        text.to_string()
    };
    text.split(|c: char| !is_token_char(c))
        .map(|t| t.trim_matches('\''))
        .filter(|t| t.chars().count() >= config.min_token_len.max(1))
        .filter(|t| !(config.stop_words && is_stop_word(&t.to_lowercase())))
        .map(str::to_string)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureScheme {
    Counts,
    Tfidf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabConfig {
    pub tokenizer: TokenizerConfig,
    pub min_df: usize,
    pub max_features: Option<usize>,
}

impl Default for VocabConfig {
    fn default() -> Self {
        VocabConfig {
            tokenizer: TokenizerConfig::default(),
            min_df: 1,
            max_features: None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    config: VocabConfig,
    n_docs: usize,
    tokens: Vec<String>,
    doc_freq: Vec<usize>,
}

/// Token index with document frequencies. Tokens are sorted, so index
/// assignment is deterministic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "VocabularyRepr", try_from = "VocabularyRepr")]
pub struct Vocabulary {
    config: VocabConfig,
    n_docs: usize,
    tokens: Vec<String>,
    doc_freq: Vec<usize>,
    index: HashMap<String, usize>,
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        VocabularyRepr {
            config: v.config,
            n_docs: v.n_docs,
            tokens: v.tokens,
            doc_freq: v.doc_freq,
        }
    }
}

impl TryFrom<VocabularyRepr> for Vocabulary {
    type Error = String;

    fn try_from(r: VocabularyRepr) -> Result<Self, Self::Error> {
        if r.tokens.len() != r.doc_freq.len() {
            return Err("tokens and doc_freq lengths differ".into());
        }
        if r.tokens.windows(2).any(|w| w[0] >= w[1]) {
            return Err("vocabulary tokens are not strictly sorted".into());
        }
        if r.doc_freq.iter().any(|&df| df == 0 || df > r.n_docs) {
            return Err("document frequency out of range".into());
        }
        let index = r
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocabulary {
            config: r.config,
            n_docs: r.n_docs,
            tokens: r.tokens,
            doc_freq: r.doc_freq,
            index,
        })
    }
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn config(&self) -> &VocabConfig {
        &self.config
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn doc_freq(&self, index: usize) -> usize {
        self.doc_freq[index]
    }

    /// Smoothed inverse document frequency `ln((1+N)/(1+df)) + 1`.
    pub fn idf(&self, index: usize) -> f64 {
        ((1.0 + self.n_docs as f64) / (1.0 + self.doc_freq[index] as f64)).ln() + 1.0
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        tokenize_with(text, &self.config.tokenizer)
    }

    /// Tokenizes with this vocabulary's configuration, then vectorizes.
    pub fn vectorize_text(&self, text: &str, scheme: FeatureScheme) -> SparseVector {
        vectorize(&self.tokenize(text), self, scheme)
    }
}

/// Builds a vocabulary from pre-tokenized documents.
pub fn build_vocabulary(docs: &[Vec<String>], config: VocabConfig) -> Result<Vocabulary, FeatError> {
    if docs.is_empty() {
        return Err(FeatError::NoDocuments);
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let unique: BTreeSet<&str> = doc.iter().map(String::as_str).collect();
        for t in unique {
            *df.entry(t).or_default() += 1;
        }
    }
    let mut kept: Vec<(&str, usize)> = df
        .into_iter()
        .filter(|&(_, n)| n >= config.min_df.max(1))
        .collect();
    if let Some(max) = config.max_features {
        kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        kept.truncate(max);
        kept.sort_by(|a, b| a.0.cmp(b.0));
    }
    if kept.is_empty() {
        return Err(FeatError::EmptyVocabulary);
    }
    let tokens: Vec<String> = kept.iter().map(|(t, _)| t.to_string()).collect();
    let doc_freq = kept.iter().map(|&(_, n)| n).collect();
    let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(Vocabulary {
        config,
        n_docs: docs.len(),
        tokens,
        doc_freq,
        index,
    })
}

/// Sparse vector with strictly increasing indices and positive weights.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, f64)>", into = "Vec<(usize, f64)>")]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl TryFrom<Vec<(usize, f64)>> for SparseVector {
    type Error = FeatError;

    fn try_from(entries: Vec<(usize, f64)>) -> Result<Self, Self::Error> {
        Self::new(entries)
    }
}

impl From<SparseVector> for Vec<(usize, f64)> {
    fn from(v: SparseVector) -> Self {
        v.entries
    }
}

impl SparseVector {
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self, FeatError> {
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(FeatError::InvalidVector("indices not strictly increasing".into()));
        }
        if entries.iter().any(|&(_, w)| !(w > 0.0 && w.is_finite())) {
            return Err(FeatError::InvalidVector("weights must be finite and positive".into()));
        }
        Ok(SparseVector { entries })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// One past the largest stored index (0 when empty).
    pub fn min_dim(&self) -> usize {
        self.entries.last().map_or(0, |&(i, _)| i + 1)
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, w)| w * dense[i]).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }
}

/// Maps tokens onto `vocab`; out-of-vocabulary tokens are ignored.
pub fn vectorize<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary, scheme: FeatureScheme) -> SparseVector {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for t in tokens {
        if let Some(i) = vocab.index_of(t.as_ref()) {
            *counts.entry(i).or_default() += 1.0;
        }
    }
    let mut entries: Vec<(usize, f64)> = counts.into_iter().collect();
    if scheme == FeatureScheme::Tfidf {
        for (i, w) in entries.iter_mut() {
            *w *= vocab.idf(*i);
        }
        let norm = entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, w) in entries.iter_mut() {
                *w /= norm;
            }
        }
    }
    SparseVector { entries }
}
