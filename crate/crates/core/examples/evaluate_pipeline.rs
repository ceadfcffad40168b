//! Stratified 80:20 split, training with the bundled three-cluster preset,
//! and per-stage evaluation. Both learners are shown side by side.

use tdlens::eval::{evaluate_pipeline, split_dataset};
use tdlens::pipeline::{train_pipeline, HierarchySource, PipelineConfig};
use tdlens::synth::{keyword_corpus, SynthConfig};
use tdlens::{ClassifierSpec, TypeHierarchy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = keyword_corpus(&SynthConfig { per_label: 80, seed: 5, ..SynthConfig::default() });
    let (train, test) = split_dataset(&data, 5)?;
    println!("{} training / {} test sentences\n", train.len(), test.len());

    for (name, spec) in [("linear", ClassifierSpec::linear(5)), ("naive Bayes", ClassifierSpec::probabilistic(1.0))] {
        let cfg = PipelineConfig::new(spec, HierarchySource::Preset(TypeHierarchy::paper_preset()), 5);
        let model = train_pipeline(&train, &cfg)?;
        let ev = evaluate_pipeline(&model, &test)?;
        println!(
            "{name:<12} stage-1 F1 {:.3}  end-to-end macro F1 {:.3}",
            ev.stage1.macro_f1, ev.end_to_end_11class.macro_f1
        );
        if name == "linear" {
            println!("\n{}", ev.to_table());
        }
    }
    Ok(())
}
