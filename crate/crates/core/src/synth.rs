//! Keyword-planted synthetic corpora.
//!
//! Every label owns a handful of marker words that never occur elsewhere, so
//! a bag-of-words model can separate the labels perfectly. Useful for smoke
//! tests, examples and determinism checks; not a stand-in for real data.

use chrono::{TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{LabeledSentence, RawComment, SentenceLabel, TdType};

/// Marker words per label, in `SentenceLabel::all()` order.
pub const MARKERS: [(&str, [&str; 5]); 11] = [
    ("non_td", ["thanks", "welcome", "approved", "congratulations", "appreciate"]),
    ("documentation", ["vignette", "readme", "roxygen", "docstring", "manual"]),
    ("code", ["refactor", "duplicated", "spaghetti", "naming", "lint"]),
    ("design", ["abstraction", "coupling", "cohesion", "encapsulation", "s4class"]),
    ("defect", ["bug", "crash", "segfault", "incorrect", "failure"]),
    ("requirement", ["specification", "usecase", "functionality", "scope", "unsupported"]),
    ("test", ["testthat", "coverage", "unittest", "assertion", "fixture"]),
    ("architecture", ["layering", "monolith", "component", "architecture", "dependency"]),
    ("build", ["compile", "makefile", "travis", "toolchain", "installation"]),
    ("usability", ["confusing", "unintuitive", "ergonomics", "usability", "friendly"]),
    ("versioning", ["semver", "changelog", "release", "version", "deprecation"]),
];

const FILLER: &[&str] = &[
    "package", "function", "would", "nice", "see", "here", "maybe", "consider", "please",
    "note", "looks", "current", "approach", "users", "data", "output", "example", "line",
    "file", "think", "perhaps", "section", "review", "point", "argument", "object", "value",
    "method", "name", "small", "large", "quite", "really", "might", "want", "check",
];

#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub per_label: usize,
    pub seed: u64,
    pub min_filler: usize,
    pub max_filler: usize,
    pub packages: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            per_label: 200,
            seed: 7,
            min_filler: 4,
            max_filler: 9,
            packages: 20,
        }
    }
}

fn markers(label: SentenceLabel) -> &'static [&'static str; 5] {
    &MARKERS
        .iter()
        .find(|(name, _)| *name == label.name())
        .expect("every label has markers")
        .1
}

/// One sentence for `label`: filler words plus one or two planted markers.
pub fn planted_sentence(label: SentenceLabel, rng: &mut impl Rng, min: usize, max: usize) -> String {
    let n = rng.gen_range(min..=max.max(min));
    let mut words: Vec<&str> = (0..n).map(|_| *FILLER.choose(rng).expect("filler")).collect();
    let m = markers(label);
    for _ in 0..rng.gen_range(1..=2) {
        let at = rng.gen_range(0..=words.len());
        words.insert(at, m.choose(rng).expect("markers"));
    }
    let mut s = words.join(" ");
    if let Some(first) = s.get(..1) {
        s = first.to_uppercase() + &s[1..];
    }
    s.push('.');
    s
}

/// `per_label` sentences for each of the 11 labels, label-major order.
pub fn keyword_corpus(config: &SynthConfig) -> Vec<LabeledSentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(config.per_label * 11);
    for label in SentenceLabel::all() {
        for i in 0..config.per_label {
            let text = planted_sentence(label, &mut rng, config.min_filler, config.max_filler);
            let year = 2016 + (i % 5) as i32;
            out.push(LabeledSentence {
                text,
                label,
                comment_id: format!("synth-{}-{i}", label.name()),
                package: format!("pkg{:02}", i % config.packages.max(1)),
                platform: if i % 2 == 0 { "ropensci" } else { "bioconductor" }.to_string(),
                created_at: Utc.with_ymd_and_hms(year, 1 + (i % 12) as u32, 1, 12, 0, 0).unwrap(),
                augmented: false,
            });
        }
    }
    out
}

/// Raw review comments built from planted sentences, a few per comment.
/// Roughly half of all sentences are non-TD.
pub fn synthetic_comments(n: usize, packages: usize, seed: u64) -> Vec<RawComment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let k = rng.gen_range(1..=4);
            let body = (0..k)
                .map(|_| {
                    let label = if rng.gen_bool(0.5) {
                        SentenceLabel::NonTd
                    } else {
                        SentenceLabel::Td(*TdType::ALL.choose(&mut rng).expect("types"))
                    };
                    planted_sentence(label, &mut rng, 3, 7)
                })
                .collect::<Vec<_>>()
                .join(" ");
            let package = format!("pkg{:02}", i % packages.max(1));
            let issue = (i % packages.max(1)) as u64 + 1;
            let year = 2016 + (i % 5) as i32;
            RawComment {
                platform: if issue % 2 == 0 { "bioconductor" } else { "ropensci" }.to_string(),
                package,
                issue_number: issue,
                comment_id: format!("{}", 1000 + i),
                created_at: Utc.with_ymd_and_hms(year, 3, 1 + (i % 28) as u32, 9, 0, 0).unwrap(),
                body,
                url: format!("https://github.com/example/reviews/issues/{issue}#issuecomment-{}", 1000 + i),
            }
        })
        .collect()
}
