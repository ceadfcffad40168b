//! Generates a keyword-planted labeled dataset, splits it 80:20 and writes
//! train/test JSONL plus a raw comment corpus.
//!
//!     cargo run --example synthetic_corpus -- [out_dir] [per_label] [seed]

use std::collections::BTreeMap;
use std::path::PathBuf;

use tdlens::corpus::{persist_corpus, write_dataset};
use tdlens::eval::split_dataset;
use tdlens::synth::{keyword_corpus, synthetic_comments, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "target/synthetic".into()));
    let per_label: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(40);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);
    std::fs::create_dir_all(&out)?;

    let cfg = SynthConfig {
        per_label,
        seed,
        ..SynthConfig::default()
    };
    let dataset = keyword_corpus(&cfg);
    let (train, test) = split_dataset(&dataset, seed)?;
    write_dataset(&train, &out.join("train.jsonl"))?;
    write_dataset(&test, &out.join("test.jsonl"))?;

    let comments = synthetic_comments(120, 12, seed);
    persist_corpus(comments.iter().cloned(), &out.join("comments.jsonl"))?;

    let mut per_label_count: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for s in &train {
        per_label_count.entry(s.label.name()).or_default().0 += 1;
    }
    for s in &test {
        per_label_count.entry(s.label.name()).or_default().1 += 1;
    }
    println!("{:<14} {:>6} {:>6}", "label", "train", "test");
    for (label, (a, b)) in &per_label_count {
        println!("{label:<14} {a:>6} {b:>6}");
    }
    println!("\nfirst sentences:");
    for s in dataset.iter().step_by(per_label).take(4) {
        println!("  [{}] {}", s.label.name(), s.text);
    }
    println!("\n{} comments written to {}", comments.len(), out.join("comments.jsonl").display());
    Ok(())
}
