//! Two-stage TD detector.
//!
//! Stage 1 is a binary gate (`non_td` / `td`). Sentences passing the gate go
//! to a router choosing one cluster of the [`TypeHierarchy`], then to that
//! cluster's leaf model choosing the final [`TdType`]. Single-type clusters
//! skip the leaf step, and a one-cluster hierarchy skips the router.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{split_sentences, LabeledSentence, RawComment, SentenceLabel, TdType};
use crate::hierarchy::{induce_hierarchy_detailed, HierarchyError, Induction, TypeHierarchy};
use crate::learn::{
    argmax, cv_confusion, derive_seed, train, ClassifierSpec, LearnError, TrainedClassifier,
};
use crate::textfeat::{
    build_vocabulary, vectorize, FeatError, FeatureScheme, SparseVector, VocabConfig, Vocabulary,
};

pub const MODEL_SCHEMA_VERSION: u32 = 1;
pub const NON_TD: &str = "non_td";
pub const TD: &str = "td";

// Sub-seed streams, one per trained component.
const STREAM_GATE: u64 = 1;
const STREAM_ROUTER: u64 = 2;
const STREAM_CV: u64 = 3;
const STREAM_SPECTRAL: u64 = 4;
const STREAM_LEAF: u64 = 100;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("dataset has no non_td sentences")]
    NoNonTd,
    #[error("dataset needs at least 2 TD types, found {0}")]
    TooFewTypes(usize),
    #[error("cluster {cluster} has no sentences of type {td_type}")]
    MissingClusterData { cluster: String, td_type: TdType },
    #[error("model schema version {0} is not supported (expected {MODEL_SCHEMA_VERSION})")]
    SchemaMismatch(u64),
    #[error("corrupt model: {0}")]
    CorruptModel(String),
    #[error("model file {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Feature(#[from] FeatError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}

/// Where the type hierarchy comes from.
#[derive(Clone, Debug)]
pub enum HierarchySource {
    /// Cross-validated confusion on the TD subset, then spectral clustering.
    Induce { k_max: usize, folds: usize },
    Preset(TypeHierarchy),
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub spec: ClassifierSpec,
    pub vocab: VocabConfig,
    pub hierarchy: HierarchySource,
    pub seed: u64,
    /// Probability cut-off for the gate; `None` is plain argmax.
    pub gate_threshold: Option<f64>,
}

impl PipelineConfig {
    pub fn new(spec: ClassifierSpec, hierarchy: HierarchySource, seed: u64) -> Self {
        PipelineConfig {
            spec,
            vocab: VocabConfig::default(),
            hierarchy,
            seed,
            gate_threshold: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub seed: u64,
    /// Latest timestamp in the training data, so retrains stay byte-identical.
    pub created_at: DateTime<Utc>,
    pub spec_sha256: String,
    pub dataset_sha256: String,
    pub training_sentences: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineModel {
    pub schema_version: u32,
    pub metadata: ModelMetadata,
    pub vocabulary: Vocabulary,
    pub hierarchy: TypeHierarchy,
    #[serde(with = "crate::floatstr::option")]
    pub gate_threshold: Option<f64>,
    pub stage1: TrainedClassifier,
    pub router: Option<TrainedClassifier>,
    pub leaf_models: BTreeMap<String, TrainedClassifier>,
}

/// Per-stage scores, keyed by label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageScores {
    pub gate: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub router: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf: Option<BTreeMap<String, f64>>,
}

/// A detected TD sentence with provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TdInstance {
    pub sentence: String,
    pub td_type: TdType,
    pub cluster: String,
    pub scores: StageScores,
    pub comment_id: String,
    pub url: String,
    pub platform: String,
    pub package: String,
    pub created_at: Option<DateTime<Utc>>,
    /// Index of the sentence within its comment.
    pub position: usize,
}

/// Everything the detector computed for one sentence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SentenceTrace {
    pub is_td: bool,
    pub gate_scores: Vec<f64>,
    /// Present only when the gate passed the sentence.
    pub stage2: Option<Stage2Trace>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stage2Trace {
    pub cluster: String,
    pub td_type: TdType,
    pub router_scores: Option<Vec<f64>>,
    pub leaf_scores: Option<Vec<f64>>,
}

/// Per-stage training summary.
#[derive(Clone, Debug, Serialize)]
pub struct TrainReport {
    pub vocabulary_size: usize,
    pub sentences: usize,
    pub td_sentences: usize,
    pub k: usize,
    pub stage_examples: BTreeMap<String, usize>,
    pub training_accuracy: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub induction: Option<Induction>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn labels_of(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn gate_label(s: &LabeledSentence) -> &'static str {
    if s.label.is_td() {
        TD
    } else {
        NON_TD
    }
}

fn accuracy(model: &TrainedClassifier, examples: &[(SparseVector, String)]) -> f64 {
    let hits = examples
        .iter()
        .filter(|(v, l)| model.predict(v).map(|p| &p.label == l).unwrap_or(false))
        .count();
    hits as f64 / examples.len().max(1) as f64
}

/// Trains the full detector.
pub fn train_pipeline(
    dataset: &[LabeledSentence],
    config: &PipelineConfig,
) -> Result<PipelineModel, PipelineError> {
    train_pipeline_with_report(dataset, config).map(|(m, _)| m)
}

pub fn train_pipeline_with_report(
    dataset: &[LabeledSentence],
    config: &PipelineConfig,
) -> Result<(PipelineModel, TrainReport), PipelineError> {
    config.spec.validate()?;
    if !dataset.iter().any(|s| !s.label.is_td()) {
        return Err(PipelineError::NoNonTd);
    }
    let mut present = [0usize; 10];
    for s in dataset {
        if let Some(t) = s.label.td_type() {
            present[t.index()] += 1;
        }
    }
    let n_types = present.iter().filter(|&&c| c > 0).count();
    if n_types < 2 {
        return Err(PipelineError::TooFewTypes(n_types));
    }

    let tokens: Vec<Vec<String>> = dataset
        .iter()
        .map(|s| crate::textfeat::tokenize_with(&s.text, &config.vocab.tokenizer))
        .collect();
    let vocabulary = build_vocabulary(&tokens, config.vocab.clone())?;
    let dim = vocabulary.len();
    let scheme = config.spec.scheme;
    let vectors: Vec<SparseVector> = tokens
        .iter()
        .map(|t| vectorize(t, &vocabulary, scheme))
        .collect();
    let seed = config.seed;
    let spec_for = |stream: u64| config.spec.with_seed(derive_seed(seed, stream));
    let mut stage_examples = BTreeMap::new();
    let mut training_accuracy = BTreeMap::new();

    // Stage 1: gate on every sentence.
    let gate_examples: Vec<(SparseVector, String)> = vectors
        .iter()
        .zip(dataset)
        .map(|(v, s)| (v.clone(), gate_label(s).to_string()))
        .collect();
    let stage1 = train(&gate_examples, &spec_for(STREAM_GATE), &labels_of(&[NON_TD, TD]), dim)?;
    stage_examples.insert("stage1".to_string(), gate_examples.len());
    training_accuracy.insert("stage1".to_string(), accuracy(&stage1, &gate_examples));

    // TD-only subset with gold types.
    let td: Vec<(SparseVector, TdType)> = vectors
        .iter()
        .zip(dataset)
        .filter_map(|(v, s)| s.label.td_type().map(|t| (v.clone(), t)))
        .collect();

    let (hierarchy, induction) = match &config.hierarchy {
        HierarchySource::Preset(h) => (h.clone(), None),
        HierarchySource::Induce { k_max, folds } => {
            let ind = induce_from_vectors(&td, &config.spec, *k_max, *folds, seed)?;
            (ind.hierarchy.clone(), Some(ind))
        }
    };
    for cluster in hierarchy.clusters() {
        for &t in &cluster.types {
            if present[t.index()] == 0 {
                return Err(PipelineError::MissingClusterData {
                    cluster: cluster.name.clone(),
                    td_type: t,
                });
            }
        }
    }

    // Router over cluster names.
    let router = if hierarchy.k() > 1 {
        let examples: Vec<(SparseVector, String)> = td
            .iter()
            .map(|(v, t)| (v.clone(), hierarchy.cluster_of(*t).name.clone()))
            .collect();
        let r = train(&examples, &spec_for(STREAM_ROUTER), &hierarchy.cluster_names(), dim)?;
        stage_examples.insert("router".to_string(), examples.len());
        training_accuracy.insert("router".to_string(), accuracy(&r, &examples));
        Some(r)
    } else {
        None
    };

    // Leaf models on each multi-type cluster's own sentences.
    let mut leaf_models = BTreeMap::new();
    for (i, cluster) in hierarchy.clusters().iter().enumerate() {
        if cluster.types.len() < 2 {
            continue;
        }
        let examples: Vec<(SparseVector, String)> = td
            .iter()
            .filter(|(_, t)| cluster.types.contains(t))
            .map(|(v, t)| (v.clone(), t.name().to_string()))
            .collect();
        let labels: Vec<String> = cluster.types.iter().map(|t| t.name().to_string()).collect();
        let leaf = train(&examples, &spec_for(STREAM_LEAF + i as u64), &labels, dim)?;
        stage_examples.insert(cluster.name.clone(), examples.len());
        training_accuracy.insert(cluster.name.clone(), accuracy(&leaf, &examples));
        leaf_models.insert(cluster.name.clone(), leaf);
    }

    let mut dataset_hasher = Sha256::new();
    for s in dataset {
        dataset_hasher.update(serde_json::to_vec(s).expect("sentence serializes"));
        dataset_hasher.update(b"\n");
    }
    let metadata = ModelMetadata {
        seed,
        created_at: dataset.iter().map(|s| s.created_at).max().unwrap_or_default(),
        spec_sha256: sha256_hex(&serde_json::to_vec(&config.spec).expect("spec serializes")),
        dataset_sha256: hex::encode(dataset_hasher.finalize()),
        training_sentences: dataset.len(),
    };
    let report = TrainReport {
        vocabulary_size: dim,
        sentences: dataset.len(),
        td_sentences: td.len(),
        k: hierarchy.k(),
        stage_examples,
        training_accuracy,
        induction,
    };
    let model = PipelineModel {
        schema_version: MODEL_SCHEMA_VERSION,
        metadata,
        vocabulary,
        hierarchy,
        gate_threshold: config.gate_threshold,
        stage1,
        router,
        leaf_models,
    };
    model.validate()?;
    Ok((model, report))
}

/// Cross-validated 10-type confusion on the TD vectors, then spectral
/// induction. Seeds match those used by [`train_pipeline`].
fn induce_from_vectors(
    td: &[(SparseVector, TdType)],
    spec: &ClassifierSpec,
    k_max: usize,
    folds: usize,
    seed: u64,
) -> Result<Induction, PipelineError> {
    let examples: Vec<(SparseVector, String)> = td
        .iter()
        .map(|(v, t)| (v.clone(), t.name().to_string()))
        .collect();
    let cv_seed = derive_seed(seed, STREAM_CV);
    let m = cv_confusion(&examples, &spec.with_seed(cv_seed), &TdType::names(), folds, cv_seed)?;
    Ok(induce_hierarchy_detailed(&m, k_max, derive_seed(seed, STREAM_SPECTRAL))?)
}

/// Induces the type hierarchy from a labeled dataset alone, exactly as
/// training with [`HierarchySource::Induce`] would.
pub fn induce_for_dataset(
    dataset: &[LabeledSentence],
    spec: &ClassifierSpec,
    vocab: &VocabConfig,
    k_max: usize,
    folds: usize,
    seed: u64,
) -> Result<Induction, PipelineError> {
    spec.validate()?;
    let tokens: Vec<Vec<String>> = dataset
        .iter()
        .map(|s| crate::textfeat::tokenize_with(&s.text, &vocab.tokenizer))
        .collect();
    let vocabulary = build_vocabulary(&tokens, vocab.clone())?;
    let td: Vec<(SparseVector, TdType)> = tokens
        .iter()
        .zip(dataset)
        .filter_map(|(t, s)| {
            s.label
                .td_type()
                .map(|ty| (vectorize(t, &vocabulary, spec.scheme), ty))
        })
        .collect();
    induce_from_vectors(&td, spec, k_max, folds, seed)
}

fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = exp.iter().sum();
    exp.iter().map(|e| e / z).collect()
}

fn score_map(labels: &[String], scores: &[f64]) -> BTreeMap<String, f64> {
    labels.iter().cloned().zip(scores.iter().copied()).collect()
}

impl PipelineModel {
    /// Checks every cross-model invariant.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::CorruptModel(m));
        if self.schema_version != MODEL_SCHEMA_VERSION {
            return Err(PipelineError::SchemaMismatch(self.schema_version.into()));
        }
        self.hierarchy.validate()?;
        let dim = self.vocabulary.len();
        let mut models: Vec<(&str, &TrainedClassifier)> = vec![("stage1", &self.stage1)];
        if self.stage1.labels() != labels_of(&[NON_TD, TD]).as_slice() {
            return bad("stage1 labels must be [non_td, td]".into());
        }
        match (&self.router, self.hierarchy.k()) {
            (None, 1) => {}
            (Some(r), k) if k > 1 => {
                if r.labels() != self.hierarchy.cluster_names().as_slice() {
                    return bad("router labels differ from cluster names".into());
                }
                models.push(("router", r));
            }
            _ => return bad("router presence does not match the cluster count".into()),
        }
        let expected: Vec<&str> = self
            .hierarchy
            .clusters()
            .iter()
            .filter(|c| c.types.len() > 1)
            .map(|c| c.name.as_str())
            .collect();
        let keys: Vec<&str> = self.leaf_models.keys().map(String::as_str).collect();
        let mut sorted_expected = expected.clone();
        sorted_expected.sort();
        if keys != sorted_expected {
            return bad("leaf models do not match the multi-type clusters".into());
        }
        for (name, leaf) in &self.leaf_models {
            let cluster = self.hierarchy.cluster(name).expect("checked above");
            let labels: Vec<String> = cluster.types.iter().map(|t| t.name().to_string()).collect();
            if leaf.labels() != labels.as_slice() {
                return bad(format!("leaf {name} labels differ from its cluster types"));
            }
            models.push((name, leaf));
        }
        for (name, m) in models {
            m.check().map_err(|e| PipelineError::CorruptModel(format!("{name}: {e}")))?;
            if m.dim() != dim {
                return bad(format!("{name} dimension {} != vocabulary size {dim}", m.dim()));
            }
        }
        if let Some(t) = self.gate_threshold {
            if !(0.0..=1.0).contains(&t) {
                return bad(format!("gate threshold {t} outside [0,1]"));
            }
        }
        Ok(())
    }

    fn vector(&self, text: &str, scheme: FeatureScheme) -> SparseVector {
        vectorize(&self.vocabulary.tokenize(text), &self.vocabulary, scheme)
    }

    fn scores(model: &TrainedClassifier, v: &SparseVector) -> Vec<f64> {
        model
            .scores(v)
            .expect("vectors come from the shared vocabulary")
    }

    /// Runs the detector on one sentence, recording every consulted stage.
    pub fn trace_sentence(&self, text: &str) -> SentenceTrace {
        let mut cache: BTreeMap<u8, SparseVector> = BTreeMap::new();
        let mut vector_for = |m: &TrainedClassifier| {
            let scheme = m.spec().scheme;
            cache
                .entry(scheme as u8)
                .or_insert_with(|| self.vector(text, scheme))
                .clone()
        };

        let gate_scores = Self::scores(&self.stage1, &vector_for(&self.stage1));
        let is_td = match self.gate_threshold {
            None => argmax(&gate_scores) == 1,
            Some(t) => softmax(&gate_scores)[1] >= t,
        };
        if !is_td {
            return SentenceTrace {
                is_td,
                gate_scores,
                stage2: None,
            };
        }

        let (cluster, router_scores) = match &self.router {
            Some(r) => {
                let s = Self::scores(r, &vector_for(r));
                (&self.hierarchy.clusters()[argmax(&s)], Some(s))
            }
            None => (&self.hierarchy.clusters()[0], None),
        };
        let (td_type, leaf_scores) = match self.leaf_models.get(&cluster.name) {
            Some(leaf) => {
                let s = Self::scores(leaf, &vector_for(leaf));
                (cluster.types[argmax(&s)], Some(s))
            }
            None => (cluster.types[0], None),
        };
        SentenceTrace {
            is_td,
            gate_scores,
            stage2: Some(Stage2Trace {
                cluster: cluster.name.clone(),
                td_type,
                router_scores,
                leaf_scores,
            }),
        }
    }

    /// Final 11-way decision for a sentence.
    pub fn predict_label(&self, text: &str) -> SentenceLabel {
        match self.trace_sentence(text).stage2 {
            Some(s) => SentenceLabel::Td(s.td_type),
            None => SentenceLabel::NonTd,
        }
    }

    fn instance(&self, text: &str, trace: SentenceTrace) -> Option<TdInstance> {
        let s2 = trace.stage2?;
        let router = match (&self.router, &s2.router_scores) {
            (Some(r), Some(s)) => Some(score_map(r.labels(), s)),
            _ => None,
        };
        let leaf = match (self.leaf_models.get(&s2.cluster), &s2.leaf_scores) {
            (Some(m), Some(s)) => Some(score_map(m.labels(), s)),
            _ => None,
        };
        Some(TdInstance {
            sentence: text.to_string(),
            td_type: s2.td_type,
            cluster: s2.cluster,
            scores: StageScores {
                gate: score_map(self.stage1.labels(), &trace.gate_scores),
                router,
                leaf,
            },
            comment_id: String::new(),
            url: String::new(),
            platform: String::new(),
            package: String::new(),
            created_at: None,
            position: 0,
        })
    }
}

/// `None` when the gate discards the sentence.
pub fn classify_sentence(model: &PipelineModel, text: &str) -> Option<TdInstance> {
    model.instance(text, model.trace_sentence(text))
}

/// Splits the comment into sentences and classifies each, in order.
pub fn classify_comment(model: &PipelineModel, comment: &RawComment) -> Vec<TdInstance> {
    split_sentences(&comment.body)
        .into_iter()
        .enumerate()
        .filter_map(|(position, sentence)| {
            let mut inst = classify_sentence(model, &sentence)?;
            inst.comment_id = comment.comment_id.clone();
            inst.url = comment.url.clone();
            inst.platform = comment.platform.clone();
            inst.package = comment.package.clone();
            inst.created_at = Some(comment.created_at);
            inst.position = position;
            Some(inst)
        })
        .collect()
}

/// Classifies many comments on up to `workers` threads; output order
/// follows input order.
pub fn classify_comments(
    model: &PipelineModel,
    comments: &[RawComment],
    workers: usize,
) -> Vec<TdInstance> {
    let workers = workers.clamp(1, comments.len().max(1));
    let chunk = comments.len().div_ceil(workers).max(1);
    std::thread::scope(|scope| {
        let handles: Vec<_> = comments
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .flat_map(|c| classify_comment(model, c))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("classification worker panicked"))
            .collect()
    })
}

pub fn model_to_json(model: &PipelineModel) -> String {
    let mut s = serde_json::to_string_pretty(model).expect("model serializes");
    s.push('\n');
    s
}

pub fn model_from_json(text: &str) -> Result<PipelineModel, PipelineError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| PipelineError::CorruptModel(e.to_string()))?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == u64::from(MODEL_SCHEMA_VERSION) => {}
        Some(v) => return Err(PipelineError::SchemaMismatch(v)),
        None => return Err(PipelineError::CorruptModel("missing schema_version".into())),
    }
    let model: PipelineModel =
        serde_json::from_value(value).map_err(|e| PipelineError::CorruptModel(e.to_string()))?;
    model.validate()?;
    Ok(model)
}

pub fn save_model(model: &PipelineModel, path: &Path) -> Result<(), PipelineError> {
    std::fs::write(path, model_to_json(model)).map_err(|e| PipelineError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_model(path: &Path) -> Result<PipelineModel, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    model_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{keyword_corpus, SynthConfig};

    fn small_corpus() -> Vec<LabeledSentence> {
        keyword_corpus(&SynthConfig {
            per_label: 12,
            seed: 5,
            ..SynthConfig::default()
        })
    }

    fn preset_config() -> PipelineConfig {
        PipelineConfig::new(
            ClassifierSpec::linear(1),
            HierarchySource::Preset(TypeHierarchy::paper_preset()),
            3,
        )
    }

    #[test]
    fn preset_gives_gate_router_and_three_leaves() {
        let m = train_pipeline(&small_corpus(), &preset_config()).unwrap();
        assert!(m.router.is_some());
        let sizes: Vec<usize> = m.leaf_models.values().map(|l| l.labels().len()).collect();
        assert_eq!(sizes, vec![5, 3, 2]);
    }

    #[test]
    fn keyword_corpus_fits_perfectly() {
        let data = small_corpus();
        let m = train_pipeline(&data, &preset_config()).unwrap();
        for s in &data {
            assert_eq!(m.predict_label(&s.text), s.label, "{}", s.text);
            if let Some(inst) = classify_sentence(&m, &s.text) {
                assert!(m.hierarchy.cluster(&inst.cluster).unwrap().types.contains(&inst.td_type));
            }
        }
    }

    #[test]
    fn discarded_sentences_have_no_stage2_scores() {
        let m = train_pipeline(&small_corpus(), &preset_config()).unwrap();
        let t = m.trace_sentence("zzzz qqqq");
        if !t.is_td {
            assert!(t.stage2.is_none());
        }
        let none = small_corpus().into_iter().find(|s| !s.label.is_td()).unwrap();
        let t = m.trace_sentence(&none.text);
        assert!(!t.is_td);
        assert!(t.stage2.is_none());
    }

    #[test]
    fn retrain_is_byte_identical() {
        let data = small_corpus();
        let cfg = PipelineConfig::new(
            ClassifierSpec::linear(1),
            HierarchySource::Preset(TypeHierarchy::paper_preset()),
            9,
        );
        let a = model_to_json(&train_pipeline(&data, &cfg).unwrap());
        let b = model_to_json(&train_pipeline(&data, &cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn missing_type_is_reported() {
        let data: Vec<_> = small_corpus()
            .into_iter()
            .filter(|s| s.label != SentenceLabel::Td(TdType::Usability))
            .collect();
        assert!(matches!(
            train_pipeline(&data, &preset_config()),
            Err(PipelineError::MissingClusterData {
                td_type: TdType::Usability,
                ..
            })
        ));
    }

    #[test]
    fn load_rejects_bad_files() {
        let m = train_pipeline(&small_corpus(), &preset_config()).unwrap();
        let json = model_to_json(&m);
        let back = model_from_json(&json).unwrap();
        assert_eq!(back, m);
        let v0 = json.replacen("\"schema_version\": 1", "\"schema_version\": 0", 1);
        assert!(matches!(model_from_json(&v0), Err(PipelineError::SchemaMismatch(0))));
        assert!(matches!(
            model_from_json(&json[..json.len() / 2]),
            Err(PipelineError::CorruptModel(_))
        ));
    }

    #[test]
    fn comment_positions_and_code_blocks() {
        let m = train_pipeline(&small_corpus(), &preset_config()).unwrap();
        let c = RawComment {
            platform: "p".into(),
            package: "pkg".into(),
            issue_number: 1,
            comment_id: "c1".into(),
            created_at: Utc::now(),
            body: "```r\nx <- 1\n```".into(),
            url: "u".into(),
        };
        assert!(classify_comment(&m, &c).is_empty());
        let c = RawComment { body: String::new(), ..c };
        assert!(classify_comment(&m, &c).is_empty());
    }
}
