//! Derives labeled sentences from review comments and hand-labeled phrases,
//! then tops up rare TD types with synonym-substituted copies.

use std::collections::BTreeMap;
use std::path::Path;

use tdlens::corpus::{augment, derive_benchmark, load_corpus, load_lexicon, load_phrases};
use tdlens::synth::{keyword_corpus, SynthConfig};
use tdlens::TdType;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let comments = load_corpus(&fixtures.join("review/comments.jsonl"))?;
    let phrases = load_phrases(&fixtures.join("review/phrases.jsonl"))?;

    let bench = derive_benchmark(&phrases, &comments);
    for s in &bench.sentences {
        println!("{:<14} {}", s.label.name(), s.text);
    }
    println!("unresolved comment ids: {:?}", bench.unresolved);

    // Augmentation on the synthetic corpus, whose filler words are in the lexicon.
    let lexicon = load_lexicon(&fixtures.join("lexicon.jsonl"))?;
    let base: Vec<_> = keyword_corpus(&SynthConfig { per_label: 6, ..SynthConfig::default() })
        .into_iter()
        .filter(|s| s.label.td_type() != Some(TdType::Versioning) || s.comment_id.ends_with("-0"))
        .collect();
    let targets: BTreeMap<TdType, usize> = [(TdType::Versioning, 6)].into_iter().collect();
    let out = augment(&base, &lexicon, &targets, 42)?;
    println!("\nversioning sentences after augmentation:");
    for s in out.iter().filter(|s| s.label.td_type() == Some(TdType::Versioning)) {
        println!("  {} {}", if s.augmented { "+" } else { " " }, s.text);
    }
    Ok(())
}
