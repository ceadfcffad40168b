//! One-vs-rest linear max-margin model: L2-regularized hinge loss minimized
//! by stochastic subgradient steps over seeded per-epoch shuffles.
//!
//! Each weight vector is stored as `scale * v` so the regularization decay
//! costs O(1) per step instead of O(dim).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::derive_seed;
use crate::textfeat::SparseVector;

pub(super) struct SgdParams {
    pub epochs: usize,
    pub learning_rate: f64,
    pub lambda: f64,
    pub seed: u64,
}

struct ScaledVector {
    scale: f64,
    v: Vec<f64>,
}

impl ScaledVector {
    fn dot(&self, x: &SparseVector) -> f64 {
        self.scale * x.dot(&self.v)
    }

    fn decay(&mut self, factor: f64) {
        self.scale *= factor;
        if self.scale < 1e-9 {
            for w in &mut self.v {
                *w *= self.scale;
            }
            self.scale = 1.0;
        }
    }

    fn add(&mut self, x: &SparseVector, step: f64) {
        let k = step / self.scale;
        for &(j, w) in x.entries() {
            self.v[j] += k * w;
        }
    }

    fn into_dense(self) -> Vec<f64> {
        self.v.into_iter().map(|w| w * self.scale).collect()
    }
}

pub(super) fn fit(
    vectors: &[&SparseVector],
    targets: &[usize],
    n_classes: usize,
    dim: usize,
    p: SgdParams,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut w: Vec<ScaledVector> = (0..n_classes)
        .map(|_| ScaledVector {
            scale: 1.0,
            v: vec![0.0; dim],
        })
        .collect();
    let mut bias = vec![0.0f64; n_classes];
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    let mut t = 0u64;

    for epoch in 0..p.epochs {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(p.seed, epoch as u64));
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = p.learning_rate / (1.0 + p.learning_rate * p.lambda * t as f64);
            t += 1;
            let decay = (1.0 - eta * p.lambda).max(0.0);
            let x = vectors[i];
            for c in 0..n_classes {
                let y = if targets[i] == c { 1.0 } else { -1.0 };
                let margin = y * (w[c].dot(x) + bias[c]);
                if decay < 1.0 {
                    if decay == 0.0 {
                        w[c].v.iter_mut().for_each(|v| *v = 0.0);
                        w[c].scale = 1.0;
                    } else {
                        w[c].decay(decay);
                    }
                }
                if margin < 1.0 {
                    w[c].add(x, eta * y);
                    bias[c] += eta * y;
                }
            }
        }
    }
    (w.into_iter().map(ScaledVector::into_dense).collect(), bias)
}
