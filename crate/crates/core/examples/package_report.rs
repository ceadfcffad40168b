//! Writes a per-package TD report as JSON and as a single static HTML page.
//!
//!     cargo run --example package_report -- [out_dir]

use std::path::PathBuf;

use tdlens::pipeline::{train_pipeline, HierarchySource, PipelineConfig};
use tdlens::report::{build_report, render_report, ReportFormat};
use tdlens::synth::{keyword_corpus, synthetic_comments, SynthConfig};
use tdlens::{ClassifierSpec, TypeHierarchy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/report".into()));
    std::fs::create_dir_all(&out)?;

    let data = keyword_corpus(&SynthConfig { per_label: 40, ..SynthConfig::default() });
    let cfg = PipelineConfig::new(ClassifierSpec::linear(1), HierarchySource::Preset(TypeHierarchy::paper_preset()), 1);
    let model = train_pipeline(&data, &cfg)?;
    let comments = synthetic_comments(80, 4, 9);

    let report = build_report(&model, &comments, "pkg02", None);
    for (t, n) in report.totals.iter().filter(|(_, n)| **n > 0) {
        println!("{:<14} {n}", t.name());
    }
    for (format, ext) in [(ReportFormat::Json, "json"), (ReportFormat::Html, "html")] {
        let path = out.join(format!("pkg02.{ext}"));
        std::fs::write(&path, render_report(&report, format))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
