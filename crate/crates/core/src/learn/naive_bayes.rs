//! Multinomial model with additive smoothing, parameters in log space.

use crate::textfeat::SparseVector;

/// Returns per-class log feature likelihoods and log priors.
pub(super) fn fit(
    vectors: &[&SparseVector],
    targets: &[usize],
    n_classes: usize,
    dim: usize,
    alpha: f64,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut feature_mass = vec![vec![0.0f64; dim]; n_classes];
    let mut class_count = vec![0usize; n_classes];
    for (v, &c) in vectors.iter().zip(targets) {
        class_count[c] += 1;
        for &(j, w) in v.entries() {
            feature_mass[c][j] += w;
        }
    }
    let n = vectors.len() as f64;
    let weights = feature_mass
        .iter()
        .map(|row| {
            let total: f64 = row.iter().sum();
            let denom = (total + alpha * dim as f64).ln();
            row.iter().map(|&f| (f + alpha).ln() - denom).collect()
        })
        .collect();
    let bias = class_count
        .iter()
        .map(|&k| (k as f64 / n).ln())
        .collect();
    (weights, bias)
}
