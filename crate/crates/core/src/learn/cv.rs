//! Seeded stratified k-fold cross-validated predictions.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{derive_seed, Classifier, ClassifierSpec, LearnError, Learner};
use crate::hierarchy::ConfusionMatrix;
use crate::textfeat::SparseVector;

/// Assigns every example a fold in `0..folds`, stratified by class.
///
/// Within each class the example order is shuffled with `seed` and folds are
/// dealt round-robin, so per-class fold sizes differ by at most one.
pub fn stratified_folds(
    classes: &[usize],
    n_classes: usize,
    folds: usize,
    seed: u64,
) -> Vec<usize> {
    let mut assignment = vec![0usize; classes.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for c in 0..n_classes {
        let mut members: Vec<usize> = (0..classes.len()).filter(|&i| classes[i] == c).collect();
        members.shuffle(&mut rng);
        for (pos, i) in members.into_iter().enumerate() {
            assignment[i] = pos % folds;
        }
    }
    assignment
}

/// Cross-validated confusion matrix for the built-in learners.
pub fn cv_confusion(
    examples: &[(SparseVector, String)],
    spec: &ClassifierSpec,
    labels: &[String],
    folds: usize,
    seed: u64,
) -> Result<ConfusionMatrix, LearnError> {
    cv_confusion_with(examples, spec, labels, folds, seed)
}

/// Each example is predicted exactly once, by a model trained on the other
/// folds. Fold `k` trains with seed `derive_seed(seed, k)`.
pub fn cv_confusion_with<L>(
    examples: &[(SparseVector, String)],
    learner: &L,
    labels: &[String],
    folds: usize,
    seed: u64,
) -> Result<ConfusionMatrix, LearnError>
where
    L: Learner + Sync,
{
    if folds < 2 {
        return Err(LearnError::TooFewFolds);
    }
    let classes: Vec<usize> = examples
        .iter()
        .map(|(_, l)| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| LearnError::UnknownLabel(l.clone()))
        })
        .collect::<Result<_, _>>()?;
    for (c, label) in labels.iter().enumerate() {
        if classes.iter().filter(|&&k| k == c).count() < folds {
            return Err(LearnError::TooFewExamples(label.clone()));
        }
    }
    let dim = examples.iter().map(|(v, _)| v.min_dim()).max().unwrap_or(0);
    let assignment = stratified_folds(&classes, labels.len(), folds, seed);

    let fold_results: Vec<Result<Vec<(usize, usize)>, LearnError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..folds)
            .map(|k| {
                let assignment = &assignment;
                let classes = &classes;
                scope.spawn(move || {
                    let train: Vec<(SparseVector, String)> = examples
                        .iter()
                        .zip(assignment)
                        .filter(|(_, &f)| f != k)
                        .map(|(e, _)| e.clone())
                        .collect();
                    let model = learner
                        .reseeded(derive_seed(seed, k as u64))
                        .fit(&train, labels, dim)?;
                    let mut pairs = Vec::new();
                    for (i, (v, _)) in examples.iter().enumerate() {
                        if assignment[i] == k {
                            pairs.push((classes[i], model.predict(v)?.index));
                        }
                    }
                    Ok(pairs)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("fold worker panicked")).collect()
    });

    let n = labels.len();
    let mut counts = vec![vec![0u64; n]; n];
    for pairs in fold_results {
        for (truth, pred) in pairs? {
            counts[truth][pred] += 1;
        }
    }
    Ok(ConfusionMatrix::new(labels.to_vec(), counts).expect("square by construction"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::train;

    fn sv(entries: &[(usize, f64)]) -> SparseVector {
        SparseVector::new(entries.to_vec()).unwrap()
    }

    fn labels() -> Vec<String> {
        vec!["A".into(), "B".into()]
    }

    fn separable(n: usize) -> Vec<(SparseVector, String)> {
        let mut ex = Vec::new();
        for i in 0..n {
            ex.push((sv(&[(0, 1.0 + i as f64)]), "A".to_string()));
            ex.push((sv(&[(1, 1.0 + i as f64)]), "B".to_string()));
        }
        ex
    }

    #[test]
    fn separable_data_gives_diagonal() {
        let m = cv_confusion(&separable(6), &ClassifierSpec::probabilistic(1.0), &labels(), 3, 1)
            .unwrap();
        assert_eq!(m.counts(), &[vec![6, 0], vec![0, 6]]);
    }

    #[test]
    fn folds_partition_each_class() {
        let classes = vec![0, 1, 0, 1, 0, 1, 0, 0, 1, 1, 0];
        let a = stratified_folds(&classes, 2, 3, 9);
        assert_eq!(a, stratified_folds(&classes, 2, 3, 9));
        for c in 0..2 {
            let mut sizes = [0usize; 3];
            for (i, &k) in a.iter().enumerate() {
                if classes[i] == c {
                    sizes[k] += 1;
                }
            }
            assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn mislabeled_point_matches_refit_oracle() {
        let mut ex = separable(5);
        // token 0 is A's signature; this point claims B
        ex.push((sv(&[(0, 3.0)]), "B".to_string()));
        let spec = ClassifierSpec::probabilistic(1.0);
        let folds = 3;
        let seed = 4;
        let m = cv_confusion(&ex, &spec, &labels(), folds, seed).unwrap();

        // Oracle: refit every fold by hand from the same assignment.
        let classes: Vec<usize> = ex.iter().map(|(_, l)| usize::from(l == "B")).collect();
        let assignment = stratified_folds(&classes, 2, folds, seed);
        let mut oracle = vec![vec![0u64; 2]; 2];
        for k in 0..folds {
            let train_set: Vec<_> = ex
                .iter()
                .zip(&assignment)
                .filter(|(_, &f)| f != k)
                .map(|(e, _)| e.clone())
                .collect();
            let model = train(&train_set, &spec, &labels(), 2).unwrap();
            for (i, (v, _)) in ex.iter().enumerate() {
                if assignment[i] == k {
                    oracle[classes[i]][model.predict(v).unwrap().index] += 1;
                }
            }
        }
        assert_eq!(m.counts(), oracle.as_slice());
        let off: u64 = m.counts()[0][1] + m.counts()[1][0];
        assert_eq!(off, 1);
        assert_eq!(m.counts()[1][0], 1);
        assert_eq!(m.total(), ex.len() as u64);
    }

    #[test]
    fn too_few_examples() {
        let ex = separable(2);
        assert_eq!(
            cv_confusion(&ex, &ClassifierSpec::probabilistic(1.0), &labels(), 3, 0),
            Err(LearnError::TooFewExamples("A".into()))
        );
        assert_eq!(
            cv_confusion(&ex, &ClassifierSpec::probabilistic(1.0), &labels(), 1, 0),
            Err(LearnError::TooFewFolds)
        );
    }

    #[test]
    fn deterministic_and_row_sums_match_support() {
        let mut ex = separable(8);
        ex.push((sv(&[(0, 1.0), (1, 1.0)]), "A".into()));
        ex.push((sv(&[(0, 1.0), (1, 1.2)]), "B".into()));
        let spec = ClassifierSpec::linear(2);
        let a = cv_confusion(&ex, &spec, &labels(), 4, 77).unwrap();
        let b = cv_confusion(&ex, &spec, &labels(), 4, 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.row_sums(), vec![9, 9]);
    }
}
