//! TD type hierarchy induced from a classifier's confusion matrix.
//!
//! Counts are row-normalized, turned into pairwise class distances
//! `D(i,j) = 1 - (M̄ij + M̄ji)/2`, and the classes are grouped by spectral
//! clustering on `S = 1 - D`, with the cluster count chosen by the largest
//! eigengap of the normalized Laplacian.

pub mod eigen;
pub mod spectral;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::TdType;

pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use spectral::{
    eigengap_k, kmeans, laplacian_spectrum, normalized_laplacian, similarity, spectral_cluster,
};

pub const HIERARCHY_SCHEMA_VERSION: u32 = 1;

const PAPER_PRESET: &str = include_str!("../../presets/paper_hierarchy.json");

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum HierarchyError {
    #[error("matrix is not square with one label per row")]
    NotSquare,
    #[error("row {0} of the confusion matrix sums to zero")]
    ZeroRow(usize),
    #[error("invalid distance matrix: {0}")]
    InvalidDistance(String),
    #[error("similarity degree of row {0} is not positive")]
    DegenerateSimilarity(usize),
    #[error("k_max {k_max} outside [2, {}]", n.saturating_sub(1))]
    InvalidKMax { k_max: usize, n: usize },
    #[error("cannot form {k} clusters from {n} labels")]
    KTooLarge { k: usize, n: usize },
    #[error("labels must be exactly the ten TD types: {0}")]
    NotTdLabels(String),
    #[error("invalid hierarchy: {0}")]
    InvalidHierarchy(String),
    #[error("hierarchy schema version {0} is not supported")]
    SchemaMismatch(u32),
    #[error("hierarchy file {path}: {message}")]
    Io { path: String, message: String },
}

/// Square count matrix: row = true class, column = predicted class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(labels: Vec<String>, counts: Vec<Vec<u64>>) -> Result<Self, HierarchyError> {
        if counts.len() != labels.len() || counts.iter().any(|r| r.len() != labels.len()) {
            return Err(HierarchyError::NotSquare);
        }
        Ok(ConfusionMatrix { labels, counts })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }
}

/// Row-stochastic confusion matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedConfusion {
    labels: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl NormalizedConfusion {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }
}

/// `M̄(i,j) = M(i,j) / Σ_j M(i,j)`.
pub fn normalize_confusion(m: &ConfusionMatrix) -> Result<NormalizedConfusion, HierarchyError> {
    let values = m
        .counts
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let sum: u64 = row.iter().sum();
            if sum == 0 {
                return Err(HierarchyError::ZeroRow(i));
            }
            Ok(row.iter().map(|&c| c as f64 / sum as f64).collect())
        })
        .collect::<Result<_, _>>()?;
    Ok(NormalizedConfusion {
        labels: m.labels.clone(),
        values,
    })
}

/// Symmetric class distances in `[0, 1]`; 0 = indistinguishable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    /// Validates symmetry (1e-12), zero diagonal and range `[0, 1]`.
    pub fn new(labels: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self, HierarchyError> {
        let n = labels.len();
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(HierarchyError::NotSquare);
        }
        for i in 0..n {
            if values[i][i] != 0.0 {
                return Err(HierarchyError::InvalidDistance(format!("diagonal {i} is non-zero")));
            }
            for j in 0..n {
                let v = values[i][j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(HierarchyError::InvalidDistance(format!(
                        "entry ({i},{j}) = {v} outside [0,1]"
                    )));
                }
                if (v - values[j][i]).abs() > 1e-12 {
                    return Err(HierarchyError::InvalidDistance(format!(
                        "asymmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { labels, values })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// `D(i,j) = 1 - (M̄ij + M̄ji)/2` off the diagonal, 0 on it.
pub fn distance_matrix(m: &NormalizedConfusion) -> DistanceMatrix {
    let n = m.labels.len();
    let v = &m.values;
    let values = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        (1.0 - (v[i][j] + v[j][i]) / 2.0).clamp(0.0, 1.0)
                    }
                })
                .collect()
        })
        .collect();
    DistanceMatrix {
        labels: m.labels.clone(),
        values,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeCluster {
    pub name: String,
    pub types: Vec<TdType>,
}

#[derive(Serialize, Deserialize)]
struct HierarchyRepr {
    schema_version: u32,
    clusters: Vec<TypeCluster>,
}

/// Two-level hierarchy: root → named clusters → TD types. Every type
/// appears in exactly one cluster.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HierarchyRepr", into = "HierarchyRepr")]
pub struct TypeHierarchy {
    clusters: Vec<TypeCluster>,
}

impl From<TypeHierarchy> for HierarchyRepr {
    fn from(h: TypeHierarchy) -> Self {
        HierarchyRepr {
            schema_version: HIERARCHY_SCHEMA_VERSION,
            clusters: h.clusters,
        }
    }
}

impl TryFrom<HierarchyRepr> for TypeHierarchy {
    type Error = HierarchyError;

    fn try_from(r: HierarchyRepr) -> Result<Self, Self::Error> {
        if r.schema_version != HIERARCHY_SCHEMA_VERSION {
            return Err(HierarchyError::SchemaMismatch(r.schema_version));
        }
        TypeHierarchy::new(r.clusters)
    }
}

impl TypeHierarchy {
    pub fn new(clusters: Vec<TypeCluster>) -> Result<Self, HierarchyError> {
        let h = TypeHierarchy { clusters };
        h.validate()?;
        Ok(h)
    }

    /// Names groups `Cluster-1..K` after ordering them by size (descending),
    /// then by alphabetically first member. Members keep canonical order.
    pub fn from_groups(groups: Vec<Vec<TdType>>) -> Result<Self, HierarchyError> {
        let mut groups: Vec<Vec<TdType>> = groups
            .into_iter()
            .map(|mut g| {
                g.sort();
                g
            })
            .collect();
        let first_name = |g: &Vec<TdType>| g.iter().map(|t| t.name()).min().unwrap_or("");
        groups.sort_by(|a, b| b.len().cmp(&a.len()).then(first_name(a).cmp(first_name(b))));
        let clusters = groups
            .into_iter()
            .enumerate()
            .map(|(i, types)| TypeCluster {
                name: format!("Cluster-{}", i + 1),
                types,
            })
            .collect();
        Self::new(clusters)
    }

    /// The three-cluster hierarchy shipped in `presets/paper_hierarchy.json`.
    pub fn paper_preset() -> Self {
        serde_json::from_str(PAPER_PRESET).expect("bundled preset is valid")
    }

    pub fn validate(&self) -> Result<(), HierarchyError> {
        let bad = |m: String| Err(HierarchyError::InvalidHierarchy(m));
        if self.clusters.is_empty() {
            return bad("no clusters".into());
        }
        let mut seen = [false; 10];
        let mut names = std::collections::HashSet::new();
        for c in &self.clusters {
            if c.types.is_empty() {
                return bad(format!("cluster {} is empty", c.name));
            }
            if c.name.trim().is_empty() || !names.insert(c.name.as_str()) {
                return bad(format!("cluster name {:?} is empty or repeated", c.name));
            }
            for t in &c.types {
                if std::mem::replace(&mut seen[t.index()], true) {
                    return bad(format!("{t} appears more than once"));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return bad(format!("{} is missing", TdType::ALL[i]));
        }
        Ok(())
    }

    pub fn clusters(&self) -> &[TypeCluster] {
        &self.clusters
    }

    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_names(&self) -> Vec<String> {
        self.clusters.iter().map(|c| c.name.clone()).collect()
    }

    pub fn cluster_of(&self, t: TdType) -> &TypeCluster {
        self.clusters
            .iter()
            .find(|c| c.types.contains(&t))
            .expect("validated partition covers every type")
    }

    pub fn cluster(&self, name: &str) -> Option<&TypeCluster> {
        self.clusters.iter().find(|c| c.name == name)
    }

    /// Same grouping regardless of cluster names or order.
    pub fn same_partition(&self, other: &TypeHierarchy) -> bool {
        let canon = |h: &TypeHierarchy| {
            let mut g: Vec<Vec<TdType>> = h
                .clusters
                .iter()
                .map(|c| {
                    let mut t = c.types.clone();
                    t.sort();
                    t
                })
                .collect();
            g.sort();
            g
        };
        canon(self) == canon(other)
    }

    pub fn load(path: &Path) -> Result<Self, HierarchyError> {
        let io = |message: String| HierarchyError::Io {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| io(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| io(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("hierarchy serializes")
    }
}

/// All intermediate products of hierarchy induction.
#[derive(Clone, Debug, Serialize)]
pub struct Induction {
    pub hierarchy: TypeHierarchy,
    pub k: usize,
    pub confusion: ConfusionMatrix,
    pub normalized: NormalizedConfusion,
    pub distance: DistanceMatrix,
    pub eigenvalues: Vec<f64>,
}

fn td_labels(labels: &[String]) -> Result<Vec<TdType>, HierarchyError> {
    let types: Vec<TdType> = labels
        .iter()
        .map(|l| l.parse::<TdType>())
        .collect::<Result<_, _>>()
        .map_err(|e| HierarchyError::NotTdLabels(e.to_string()))?;
    let mut sorted = types.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != TdType::ALL.len() || types.len() != TdType::ALL.len() {
        return Err(HierarchyError::NotTdLabels(format!("got {} labels", labels.len())));
    }
    Ok(types)
}

/// normalize → distance → eigengap → spectral clustering → named hierarchy.
pub fn induce_hierarchy_detailed(
    m: &ConfusionMatrix,
    k_max: usize,
    seed: u64,
) -> Result<Induction, HierarchyError> {
    let types = td_labels(m.labels())?;
    let normalized = normalize_confusion(m)?;
    let distance = distance_matrix(&normalized);
    let spectrum = laplacian_spectrum(&distance)?;
    let n = distance.len();
    if k_max < 2 || k_max + 1 > n {
        return Err(HierarchyError::InvalidKMax { k_max, n });
    }
    let k = spectral::eigengap_from_values(&spectrum.values, k_max);
    let groups = spectral_cluster(&distance, k, seed)?
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| types[i]).collect())
        .collect();
    Ok(Induction {
        hierarchy: TypeHierarchy::from_groups(groups)?,
        k,
        confusion: m.clone(),
        normalized,
        distance,
        eigenvalues: spectrum.values,
    })
}

pub fn induce_hierarchy(
    m: &ConfusionMatrix,
    k_max: usize,
    seed: u64,
) -> Result<TypeHierarchy, HierarchyError> {
    induce_hierarchy_detailed(m, k_max, seed).map(|i| i.hierarchy)
}
