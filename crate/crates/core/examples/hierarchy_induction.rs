//! Induces a two-level type hierarchy from a confusion matrix: row
//! normalization, pairwise distance, eigengap choice of K, spectral
//! clustering.

use tdlens::hierarchy::induce_hierarchy_detailed;
use tdlens::{ConfusionMatrix, TdType, TypeHierarchy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A classifier that mostly confuses types within three groups.
    let groups: [&[TdType]; 3] = [
        &[TdType::Documentation, TdType::Code, TdType::Defect, TdType::Test, TdType::Design],
        &[TdType::Build, TdType::Architecture, TdType::Versioning],
        &[TdType::Usability, TdType::Requirement],
    ];
    let group_of = |t: TdType| groups.iter().position(|g| g.contains(&t)).unwrap();
    let counts = TdType::ALL
        .iter()
        .map(|&a| {
            TdType::ALL
                .iter()
                .map(|&b| match (a == b, group_of(a) == group_of(b)) {
                    (true, _) => 70,
                    (false, true) => 9,
                    (false, false) => 2,
                })
                .collect()
        })
        .collect();
    let m = ConfusionMatrix::new(TdType::names(), counts)?;

    let ind = induce_hierarchy_detailed(&m, 9, 0)?;
    let eig: Vec<String> = ind.eigenvalues.iter().map(|v| format!("{:.3}", v.max(0.0))).collect();
    println!("Laplacian eigenvalues: {}", eig.join(" "));
    println!("eigengap K = {}", ind.k);
    for c in ind.hierarchy.clusters() {
        let names: Vec<&str> = c.types.iter().map(|t| t.name()).collect();
        println!("  {}: {}", c.name, names.join(", "));
    }
    println!("matches the bundled preset: {}", ind.hierarchy.same_partition(&TypeHierarchy::paper_preset()));

    println!("\ndistance row for documentation:");
    for (label, d) in ind.distance.labels().iter().zip(&ind.distance.values()[0]) {
        println!("  {label:<14} {d:.3}");
    }
    Ok(())
}
