//! Derivation of the sentence-level benchmark from phrase-level TD labels.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{split_sentences, LabeledSentence, RawComment, SentenceLabel, TdType};

/// A manually labeled TD phrase extracted from a comment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPhrase {
    pub comment_id: String,
    pub phrase: String,
    pub td_type: TdType,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchmarkOutput {
    pub sentences: Vec<LabeledSentence>,
    /// Comment ids referenced by phrases but missing from the corpus.
    pub unresolved: Vec<String>,
    /// Phrases that no sentence of their comment contains.
    pub unmatched_phrases: Vec<LabeledPhrase>,
    /// Sentences that matched phrases of more than one TD type; each type is
    /// emitted as its own record.
    pub multi_label: Vec<(String, String)>,
}

impl BenchmarkOutput {
    pub fn count(&self, td: bool) -> usize {
        self.sentences.iter().filter(|s| s.label.is_td() == td).count()
    }
}

/// Lowercases and collapses every whitespace run to a single space.
pub fn normalize(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Splits every referenced comment into sentences and labels each one with
/// the types of the phrases it contains; all others become non-TD.
pub fn derive_benchmark(phrases: &[LabeledPhrase], comments: &[RawComment]) -> BenchmarkOutput {
    let by_id: HashMap<&str, &RawComment> =
        comments.iter().map(|c| (c.comment_id.as_str(), c)).collect();

    let mut order: Vec<&str> = Vec::new();
    let mut grouped: HashMap<&str, Vec<&LabeledPhrase>> = HashMap::new();
    for p in phrases {
        let entry = grouped.entry(p.comment_id.as_str()).or_default();
        if entry.is_empty() {
            order.push(p.comment_id.as_str());
        }
        entry.push(p);
    }

    let mut out = BenchmarkOutput::default();
    let mut seen: HashSet<(String, SentenceLabel, String)> = HashSet::new();

    for id in order {
        let group = &grouped[id];
        let Some(comment) = by_id.get(id) else {
            out.unresolved.push(id.to_string());
            continue;
        };
        let normalized_phrases: Vec<(String, TdType)> = group
            .iter()
            .map(|p| (normalize(&p.phrase), p.td_type))
            .collect();
        let mut phrase_hit = vec![false; group.len()];

        for sentence in split_sentences(&comment.body) {
            let norm = normalize(&sentence);
            let mut types = BTreeSet::new();
            for (k, (phrase, t)) in normalized_phrases.iter().enumerate() {
                if !phrase.is_empty() && norm.contains(phrase.as_str()) {
                    types.insert(*t);
                    phrase_hit[k] = true;
                }
            }
            if types.len() > 1 {
                out.multi_label
                    .push((comment.comment_id.clone(), sentence.clone()));
            }
            let labels: Vec<SentenceLabel> = if types.is_empty() {
                vec![SentenceLabel::NonTd]
            } else {
                types.into_iter().map(SentenceLabel::Td).collect()
            };
            for label in labels {
                let key = (sentence.clone(), label, comment.comment_id.clone());
                if !seen.insert(key) {
                    continue;
                }
                out.sentences.push(LabeledSentence {
                    text: sentence.clone(),
                    label,
                    comment_id: comment.comment_id.clone(),
                    package: comment.package.clone(),
                    platform: comment.platform.clone(),
                    created_at: comment.created_at,
                    augmented: false,
                });
            }
        }
        for (k, hit) in phrase_hit.into_iter().enumerate() {
            if !hit {
                out.unmatched_phrases.push(group[k].clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn comment(id: &str, body: &str) -> RawComment {
        RawComment {
            platform: "ropensci".into(),
            package: "pkg".into(),
            issue_number: 1,
            comment_id: id.into(),
            created_at: chrono::Utc.with_ymd_and_hms(2018, 1, 1, 0, 0, 0).unwrap(),
            body: body.into(),
            url: String::new(),
        }
    }

    fn phrase(id: &str, text: &str, t: TdType) -> LabeledPhrase {
        LabeledPhrase {
            comment_id: id.into(),
            phrase: text.into(),
            td_type: t,
        }
    }

    #[test]
    fn whole_comment_phrase() {
        let out = derive_benchmark(
            &[phrase("1", "The vignette is missing.", TdType::Documentation)],
            &[comment("1", "The vignette is missing.")],
        );
        assert_eq!(out.count(true), 1);
        assert_eq!(out.count(false), 0);
        assert_eq!(out.sentences[0].label, SentenceLabel::Td(TdType::Documentation));
    }

    #[test]
    fn four_sentences_one_phrase() {
        let body = "Thanks for this. The tests   do not cover\nthe parser. Nice work. See you.";
        let out = derive_benchmark(
            &[phrase("1", "tests do not cover the parser", TdType::Test)],
            &[comment("1", body)],
        );
        assert_eq!(out.count(true), 1);
        assert_eq!(out.count(false), 3);
        let td = out.sentences.iter().find(|s| s.label.is_td()).unwrap();
        assert!(normalize(&td.text).contains("tests do not cover the parser"));
    }

    #[test]
    fn unresolved_and_unmatched_are_reported() {
        let out = derive_benchmark(
            &[
                phrase("missing", "x", TdType::Code),
                phrase("1", "not present anywhere", TdType::Code),
            ],
            &[comment("1", "Something else.")],
        );
        assert_eq!(out.unresolved, vec!["missing".to_string()]);
        assert_eq!(out.unmatched_phrases.len(), 1);
        assert_eq!(out.count(false), 1);
    }

    #[test]
    fn multi_type_sentence_emits_both_and_warns() {
        let out = derive_benchmark(
            &[
                phrase("1", "rename the function", TdType::Code),
                phrase("1", "and document it", TdType::Documentation),
                phrase("1", "rename the function", TdType::Code),
            ],
            &[comment("1", "Please rename the function and document it.")],
        );
        assert_eq!(out.count(true), 2);
        assert_eq!(out.multi_label.len(), 1);
    }

    #[test]
    fn duplicate_sentences_deduplicated() {
        let out = derive_benchmark(
            &[phrase("1", "fix", TdType::Defect)],
            &[comment("1", "Please fix. Please fix. Okay.")],
        );
        assert_eq!(out.count(true), 1);
        assert_eq!(out.count(false), 1);
    }
}
