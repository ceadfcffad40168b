//! Normalized-Laplacian spectral clustering with eigengap model selection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eigen::{symmetric_eigen, SymmetricEigen};
use super::{DistanceMatrix, HierarchyError};

/// Ties between eigengaps closer than this resolve to the smaller `k`.
const GAP_TIE_TOLERANCE: f64 = 1e-9;
const KMEANS_MAX_ITER: usize = 100;
const KMEANS_MAX_RESEEDS: usize = 10;

/// `S = 1 - D` with a unit diagonal.
pub fn similarity(d: &DistanceMatrix) -> Vec<Vec<f64>> {
    let n = d.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 1.0 } else { 1.0 - d.values()[i][j] })
                .collect()
        })
        .collect()
}

/// `L = I - Deg^{-1/2} S Deg^{-1/2}` with `Deg = diag(row sums of S)`.
pub fn normalized_laplacian(s: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, HierarchyError> {
    let n = s.len();
    let degree: Vec<f64> = s.iter().map(|row| row.iter().sum()).collect();
    if let Some(i) = degree.iter().position(|&d| !(d > 0.0)) {
        return Err(HierarchyError::DegenerateSimilarity(i));
    }
    let inv_sqrt: Vec<f64> = degree.iter().map(|d| 1.0 / d.sqrt()).collect();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let id = if i == j { 1.0 } else { 0.0 };
                    id - inv_sqrt[i] * s[i][j] * inv_sqrt[j]
                })
                .collect()
        })
        .collect())
}

/// Eigen-decomposition of the normalized Laplacian built from `d`.
pub fn laplacian_spectrum(d: &DistanceMatrix) -> Result<SymmetricEigen, HierarchyError> {
    let l = normalized_laplacian(&similarity(d))?;
    Ok(symmetric_eigen(&l))
}

/// Picks `k ∈ [2, k_max]` maximizing `λ_{k+1} - λ_k` over ascending
/// eigenvalues (1-based), preferring the smaller `k` on ties.
pub fn eigengap_from_values(values: &[f64], k_max: usize) -> usize {
    let mut best_k = 2;
    let mut best_gap = f64::NEG_INFINITY;
    for k in 2..=k_max {
        let gap = values[k] - values[k - 1];
        if gap > best_gap + GAP_TIE_TOLERANCE {
            best_gap = gap;
            best_k = k;
        }
    }
    best_k
}

/// Number of clusters by the eigengap heuristic.
pub fn eigengap_k(d: &DistanceMatrix, k_max: usize) -> Result<usize, HierarchyError> {
    let n = d.len();
    if k_max < 2 || k_max + 1 > n {
        return Err(HierarchyError::InvalidKMax { k_max, n });
    }
    let spectrum = laplacian_spectrum(d)?;
    Ok(eigengap_from_values(&spectrum.values, k_max))
}

/// Rows of the bottom-`k` eigenvectors, each scaled to unit length (zero
/// rows are left as they are).
pub fn spectral_embedding(spectrum: &SymmetricEigen, k: usize) -> Vec<Vec<f64>> {
    spectrum
        .vectors
        .iter()
        .map(|row| {
            let mut r: Vec<f64> = row[..k].to_vec();
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                r.iter_mut().for_each(|x| *x /= norm);
            }
            r
        })
        .collect()
}

/// Partitions the labels of `d` into `k` non-empty clusters. Returns label
/// indices per cluster, each ascending.
pub fn spectral_cluster(
    d: &DistanceMatrix,
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, HierarchyError> {
    let n = d.len();
    if k == 0 || k > n {
        return Err(HierarchyError::KTooLarge { k, n });
    }
    if k == 1 {
        return Ok(vec![(0..n).collect()]);
    }
    if k == n {
        return Ok((0..n).map(|i| vec![i]).collect());
    }
    let spectrum = laplacian_spectrum(d)?;
    let points = spectral_embedding(&spectrum, k);
    let assignment = kmeans(&points, k, seed);
    let mut clusters = vec![Vec::new(); k];
    for (i, &c) in assignment.iter().enumerate() {
        clusters[c].push(i);
    }
    Ok(clusters)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, center) in centers.iter().enumerate() {
        let d = dist2(p, center);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// Farthest-first initialization from a seeded start point.
pub fn farthest_first(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.gen_range(0..points.len());
    let mut centers = vec![points[start].clone()];
    let mut min_d: Vec<f64> = points.iter().map(|p| dist2(p, &centers[0])).collect();
    while centers.len() < k {
        let mut far = 0;
        for i in 1..points.len() {
            if min_d[i] > min_d[far] {
                far = i;
            }
        }
        centers.push(points[far].clone());
        for (i, p) in points.iter().enumerate() {
            min_d[i] = min_d[i].min(dist2(p, &points[far]));
        }
    }
    centers
}

/// Lloyd's k-means; every returned cluster is non-empty when `k <= n`.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<usize> {
    let n = points.len();
    let dim = points.first().map_or(0, Vec::len);
    let mut centers = farthest_first(points, k, seed);
    let mut assignment: Vec<usize> = points.iter().map(|p| nearest(p, &centers)).collect();
    let mut reseeds = 0;

    for _ in 0..KMEANS_MAX_ITER {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut sizes = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assignment) {
            sizes[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if sizes[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / sizes[c] as f64).collect();
            } else if reseeds < KMEANS_MAX_RESEEDS {
                reseeds += 1;
                let far = farthest_from_own_center(points, &assignment, &centers);
                centers[c] = points[far].clone();
            }
        }
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centers)).collect();
        if next == assignment {
            break;
        }
        assignment = next;
    }

    // Guarantee non-empty clusters by moving outliers out of shared clusters.
    loop {
        let mut sizes = vec![0usize; k];
        for &c in &assignment {
            sizes[c] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            break;
        };
        let candidate = (0..n)
            .filter(|&i| sizes[assignment[i]] > 1)
            .max_by(|&a, &b| {
                let da = dist2(&points[a], &centers[assignment[a]]);
                let db = dist2(&points[b], &centers[assignment[b]]);
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .expect("k <= n leaves a shared cluster");
        assignment[candidate] = empty;
        centers[empty] = points[candidate].clone();
    }
    assignment
}

fn farthest_from_own_center(points: &[Vec<f64>], assignment: &[usize], centers: &[Vec<f64>]) -> usize {
    let mut far = 0;
    let mut far_d = f64::NEG_INFINITY;
    for (i, p) in points.iter().enumerate() {
        let d = dist2(p, &centers[assignment[i]]);
        if d > far_d {
            far_d = d;
            far = i;
        }
    }
    far
}
