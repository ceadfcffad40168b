//! Corpus-level analytics: type distribution from the reference counts, then
//! correlation, per-package trend, growth and impact over detected instances.

use tdlens::analytics::{
    correlation_matrix, distribution_from_counts, growth, impact, package_first_years, packages_by_year,
    per_package_counts, reference_platform_counts, trend, type_totals, PackageCountMode,
};
use tdlens::pipeline::{classify_comments, train_pipeline, HierarchySource, PipelineConfig};
use tdlens::synth::{keyword_corpus, synthetic_comments, SynthConfig};
use tdlens::{ClassifierSpec, TdType, TypeHierarchy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dist = distribution_from_counts(&reference_platform_counts());
    println!("{:<14} {:>9} {:>13} {:>8}", "type", "rOpenSci", "BioConductor", "overall");
    for &t in &TdType::ALL {
        println!(
            "{:<14} {:>8.2}% {:>12.2}% {:>7.2}%",
            t.name(),
            dist.percent("ropensci", t).unwrap(),
            dist.percent("bioconductor", t).unwrap(),
            dist.percent("overall", t).unwrap()
        );
    }

    let data = keyword_corpus(&SynthConfig { per_label: 40, ..SynthConfig::default() });
    let cfg = PipelineConfig::new(ClassifierSpec::linear(1), HierarchySource::Preset(TypeHierarchy::paper_preset()), 1);
    let model = train_pipeline(&data, &cfg)?;
    let comments = synthetic_comments(400, 25, 2);
    let instances = classify_comments(&model, &comments, 4);
    println!("\n{} instances over {} comments", instances.len(), comments.len());

    let corr = correlation_matrix(&per_package_counts(&instances))?;
    let pby = packages_by_year(&package_first_years(&comments), PackageCountMode::Cumulative);
    let series = trend(&instances, &pby)?;
    let g = growth(&series, 2016, 2020)?;
    let points = impact(&g, &corr, &type_totals(&instances))?;
    println!("\n{:<14} {:>10} {:>10} {:>6}", "type", "CAGR %", "mean rho", "size");
    for p in &points {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
        println!("{:<14} {:>10} {:>10} {:>6}", p.td_type.name(), fmt(p.growth_percent), fmt(p.mean_correlation), p.size);
    }
    Ok(())
}
