//! Trains the two-stage detector on a synthetic corpus and runs it over raw
//! review comments, printing each detected TD sentence with its scores.

use tdlens::pipeline::{classify_comments, train_pipeline_with_report, HierarchySource, PipelineConfig};
use tdlens::synth::{keyword_corpus, synthetic_comments, SynthConfig};
use tdlens::ClassifierSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = keyword_corpus(&SynthConfig { per_label: 60, seed: 3, ..SynthConfig::default() });
    let cfg = PipelineConfig::new(ClassifierSpec::linear(3), HierarchySource::Induce { k_max: 9, folds: 5 }, 3);
    let (model, report) = train_pipeline_with_report(&data, &cfg)?;
    println!("K = {}, vocabulary {} terms", report.k, report.vocabulary_size);
    for c in model.hierarchy.clusters() {
        let names: Vec<&str> = c.types.iter().map(|t| t.name()).collect();
        println!("  {}: {}", c.name, names.join(", "));
    }

    let comments = synthetic_comments(6, 3, 11);
    let found = classify_comments(&model, &comments, 2);
    println!("\n{} TD sentences in {} comments", found.len(), comments.len());
    for inst in &found {
        let td = inst.scores.gate.get("td").copied().unwrap_or_default();
        println!("  [{} / {}] gate {:+.2}  {}", inst.cluster, inst.td_type, td, inst.sentence);
    }

    let trace = model.trace_sentence("The vignette is missing and the readme is outdated.");
    println!("\ntrace: {}", serde_json::to_string(&trace)?);
    Ok(())
}
