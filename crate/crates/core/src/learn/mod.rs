//! Native text classifiers behind a small pluggable seam.
//!
//! Two learners ship: a multinomial probabilistic model with additive
//! smoothing and a one-vs-rest linear max-margin model trained by seeded
//! stochastic subgradient descent on the L2-regularized hinge loss. Both
//! produce a [`TrainedClassifier`] scoring `bias[c] + w[c] · x`.

mod cv;
mod linear;
mod naive_bayes;

use serde::{Deserialize, Serialize};

use crate::textfeat::{FeatureScheme, SparseVector};

pub use cv::{cv_confusion, cv_confusion_with, stratified_folds};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LearnError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training data has fewer than two distinct classes")]
    SingleClassData,
    #[error("dimension mismatch: expected < {expected}, got index {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("label {0:?} is not in the label list")]
    UnknownLabel(String),
    #[error("label {0:?} has no training examples")]
    EmptyClass(String),
    #[error("label list must be non-empty and unique")]
    InvalidLabels,
    #[error("invalid classifier spec: {0}")]
    InvalidSpec(String),
    #[error("class {0:?} has fewer examples than folds")]
    TooFewExamples(String),
    #[error("folds must be at least 2")]
    TooFewFolds,
}

/// Learner family and its hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LearnerKind {
    Probabilistic {
        alpha: f64,
    },
    Linear {
        epochs: usize,
        learning_rate: f64,
        lambda: f64,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    #[serde(flatten)]
    pub kind: LearnerKind,
    pub scheme: FeatureScheme,
}

impl ClassifierSpec {
    pub fn probabilistic(alpha: f64) -> Self {
        ClassifierSpec {
            kind: LearnerKind::Probabilistic { alpha },
            scheme: FeatureScheme::Counts,
        }
    }

    pub fn linear(seed: u64) -> Self {
        ClassifierSpec {
            kind: LearnerKind::Linear {
                epochs: 20,
                learning_rate: 0.5,
                lambda: 1e-4,
                seed,
            },
            scheme: FeatureScheme::Tfidf,
        }
    }

    pub fn validate(&self) -> Result<(), LearnError> {
        let bad = |m: &str| Err(LearnError::InvalidSpec(m.to_string()));
        match self.kind {
            LearnerKind::Probabilistic { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                bad("alpha must be > 0")
            }
            LearnerKind::Linear { epochs, .. } if epochs < 1 => bad("epochs must be >= 1"),
            LearnerKind::Linear { learning_rate, .. }
                if !(learning_rate > 0.0 && learning_rate.is_finite()) =>
            {
                bad("learning rate must be > 0")
            }
            LearnerKind::Linear { lambda, .. } if !(lambda >= 0.0 && lambda.is_finite()) => {
                bad("lambda must be >= 0")
            }
            _ => Ok(()),
        }
    }

    /// Copy with the seed replaced (no-op for seedless learners).
    pub fn with_seed(&self, new_seed: u64) -> Self {
        let mut out = self.clone();
        if let LearnerKind::Linear { seed, .. } = &mut out.kind {
            *seed = new_seed;
        }
        out
    }
}

/// Derives an independent sub-seed from a base seed and a stream tag.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedClassifier {
    labels: Vec<String>,
    dim: usize,
    #[serde(with = "crate::floatstr::matrix")]
    weights: Vec<Vec<f64>>,
    #[serde(with = "crate::floatstr::vec")]
    bias: Vec<f64>,
    spec: ClassifierSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: String,
    pub index: usize,
    pub scores: Vec<f64>,
}

/// Index of the maximum score; the lowest index wins ties.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

impl TrainedClassifier {
    pub(crate) fn from_parts(
        labels: Vec<String>,
        dim: usize,
        weights: Vec<Vec<f64>>,
        bias: Vec<f64>,
        spec: ClassifierSpec,
    ) -> Self {
        TrainedClassifier {
            labels,
            dim,
            weights,
            bias,
            spec,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> &ClassifierSpec {
        &self.spec
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// Adds `delta` to every class bias (shifts all scores uniformly).
    pub fn shift_bias(&mut self, delta: f64) {
        for b in &mut self.bias {
            *b += delta;
        }
    }

    /// Structural invariants; used after deserialization.
    pub fn check(&self) -> Result<(), LearnError> {
        check_labels(&self.labels)?;
        if self.weights.len() != self.labels.len()
            || self.bias.len() != self.labels.len()
            || self.weights.iter().any(|w| w.len() != self.dim)
        {
            return Err(LearnError::InvalidSpec("parameter shapes disagree".into()));
        }
        self.spec.validate()
    }

    pub fn scores(&self, v: &SparseVector) -> Result<Vec<f64>, LearnError> {
        if v.min_dim() > self.dim {
            return Err(LearnError::DimensionMismatch {
                expected: self.dim,
                found: v.min_dim() - 1,
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| b + v.dot(w))
            .collect())
    }

    pub fn predict(&self, v: &SparseVector) -> Result<Prediction, LearnError> {
        let scores = self.scores(v)?;
        let index = argmax(&scores);
        Ok(Prediction {
            label: self.labels[index].clone(),
            index,
            scores,
        })
    }
}

/// A trained model usable for prediction.
pub trait Classifier {
    fn labels(&self) -> &[String];
    fn scores(&self, v: &SparseVector) -> Result<Vec<f64>, LearnError>;

    fn predict(&self, v: &SparseVector) -> Result<Prediction, LearnError> {
        let scores = self.scores(v)?;
        let index = argmax(&scores);
        Ok(Prediction {
            label: self.labels()[index].clone(),
            index,
            scores,
        })
    }
}

impl Classifier for TrainedClassifier {
    fn labels(&self) -> &[String] {
        &self.labels
    }

    fn scores(&self, v: &SparseVector) -> Result<Vec<f64>, LearnError> {
        TrainedClassifier::scores(self, v)
    }
}

/// Anything that can fit a [`Classifier`] from labeled sparse vectors.
pub trait Learner {
    type Model: Classifier;

    fn fit(
        &self,
        examples: &[(SparseVector, String)],
        labels: &[String],
        dim: usize,
    ) -> Result<Self::Model, LearnError>;

    /// Copy of this learner reseeded for an independent run.
    fn reseeded(&self, seed: u64) -> Self
    where
        Self: Sized;
}

impl Learner for ClassifierSpec {
    type Model = TrainedClassifier;

    fn fit(
        &self,
        examples: &[(SparseVector, String)],
        labels: &[String],
        dim: usize,
    ) -> Result<TrainedClassifier, LearnError> {
        train(examples, self, labels, dim)
    }

    fn reseeded(&self, seed: u64) -> Self {
        self.with_seed(seed)
    }
}

fn check_labels(labels: &[String]) -> Result<(), LearnError> {
    let mut sorted: Vec<&String> = labels.iter().collect();
    sorted.sort();
    sorted.dedup();
    if labels.is_empty() || sorted.len() != labels.len() {
        return Err(LearnError::InvalidLabels);
    }
    Ok(())
}

/// Trains a classifier over `labels` on vectors of dimension `dim`.
pub fn train(
    examples: &[(SparseVector, String)],
    spec: &ClassifierSpec,
    labels: &[String],
    dim: usize,
) -> Result<TrainedClassifier, LearnError> {
    spec.validate()?;
    check_labels(labels)?;
    if examples.is_empty() {
        return Err(LearnError::EmptyTrainingSet);
    }
    let mut targets = Vec::with_capacity(examples.len());
    let mut seen = vec![0usize; labels.len()];
    for (v, label) in examples {
        let k = labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| LearnError::UnknownLabel(label.clone()))?;
        if v.min_dim() > dim {
            return Err(LearnError::DimensionMismatch {
                expected: dim,
                found: v.min_dim() - 1,
            });
        }
        seen[k] += 1;
        targets.push(k);
    }
    if seen.iter().filter(|&&n| n > 0).count() < 2 {
        return Err(LearnError::SingleClassData);
    }
    if let Some(k) = seen.iter().position(|&n| n == 0) {
        return Err(LearnError::EmptyClass(labels[k].clone()));
    }
    let vectors: Vec<&SparseVector> = examples.iter().map(|(v, _)| v).collect();
    let (weights, bias) = match spec.kind {
        LearnerKind::Probabilistic { alpha } => {
            naive_bayes::fit(&vectors, &targets, labels.len(), dim, alpha)
        }
        LearnerKind::Linear {
            epochs,
            learning_rate,
            lambda,
            seed,
        } => linear::fit(
            &vectors,
            &targets,
            labels.len(),
            dim,
            linear::SgdParams {
                epochs,
                learning_rate,
                lambda,
                seed,
            },
        ),
    };
    Ok(TrainedClassifier::from_parts(
        labels.to_vec(),
        dim,
        weights,
        bias,
        spec.clone(),
    ))
}

/// Predicts with a trained classifier.
pub fn predict(model: &TrainedClassifier, v: &SparseVector) -> Result<Prediction, LearnError> {
    model.predict(v)
}
