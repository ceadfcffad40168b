//! Minority-class augmentation by synonym replacement of adjectives and verbs.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CorpusError, LabeledSentence, SentenceLabel, TdType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartOfSpeech {
    Adjective,
    Verb,
}

/// One line of a lexicon file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub word: String,
    pub pos: PartOfSpeech,
    pub synonyms: Vec<String>,
}

/// Synonyms keyed by `(word, part of speech)`. All entries are lowercase and
/// no list contains its own head word.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SynonymLexicon {
    entries: BTreeMap<(String, PartOfSpeech), Vec<String>>,
}

impl SynonymLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries<I>(entries: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = LexiconEntry>,
    {
        let mut lex = Self::new();
        for e in entries {
            lex.insert(&e.word, e.pos, e.synonyms)?;
        }
        Ok(lex)
    }

    pub fn insert<S: Into<String>>(
        &mut self,
        word: &str,
        pos: PartOfSpeech,
        synonyms: impl IntoIterator<Item = S>,
    ) -> Result<(), CorpusError> {
        let invalid = |reason: &str| CorpusError::InvalidLexicon {
            word: word.to_string(),
            reason: reason.to_string(),
        };
        if word.trim().is_empty() || word.contains(char::is_whitespace) {
            return Err(invalid("head word must be a single token"));
        }
        if word != word.to_lowercase() {
            return Err(invalid("head word must be lowercase"));
        }
        let list = self.entries.entry((word.to_string(), pos)).or_default();
        for s in synonyms {
            let s: String = s.into();
            if s != s.to_lowercase() {
                return Err(invalid("synonyms must be lowercase"));
            }
            if s.trim().is_empty() {
                return Err(invalid("empty synonym"));
            }
            if s == word {
                return Err(invalid("synonym list contains the head word"));
            }
            if !list.contains(&s) {
                list.push(s);
            }
        }
        Ok(())
    }

    /// Synonyms across both parts of speech, adjectives first.
    pub fn synonyms(&self, word: &str) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for pos in [PartOfSpeech::Adjective, PartOfSpeech::Verb] {
            if let Some(list) = self.entries.get(&(word.to_string(), pos)) {
                for s in list {
                    if !out.contains(&s.as_str()) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    pub fn entries(&self) -> impl Iterator<Item = LexiconEntry> + '_ {
        self.entries.iter().map(|((word, pos), syn)| LexiconEntry {
            word: word.clone(),
            pos: *pos,
            synonyms: syn.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Byte ranges of alphabetic words in `text` that have at least one synonym.
fn replaceable_spans<'a>(
    text: &str,
    lexicon: &'a SynonymLexicon,
) -> Vec<(usize, usize, Vec<&'a str>)> {
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let flush = |s: usize, e: usize, spans: &mut Vec<_>| {
        let syn = lexicon.synonyms(&text[s..e].to_lowercase());
        if !syn.is_empty() {
            spans.push((s, e, syn));
        }
    };
    for (i, c) in text.char_indices() {
        match (start, c.is_alphabetic()) {
            (None, true) => start = Some(i),
            (Some(s), false) => {
                flush(s, i, &mut spans);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        flush(s, text.len(), &mut spans);
    }
    spans
}

fn match_case(original: &str, replacement: &str) -> String {
    let mut chars = original.chars();
    let first_upper = chars.next().is_some_and(char::is_uppercase);
    let rest_upper = original.chars().count() > 1 && chars.all(char::is_uppercase);
    if first_upper && rest_upper {
        replacement.to_uppercase()
    } else if first_upper {
        let mut c = replacement.chars();
        c.next()
            .map(|f| f.to_uppercase().chain(c).collect())
            .unwrap_or_default()
    } else {
        replacement.to_string()
    }
}

fn type_seed(seed: u64, t: TdType) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(t.index() as u64 + 1)
}

/// Grows each class in `targets` to exactly its target count with synonym
/// variants of its own sentences. Originals are kept unchanged and first;
/// generated sentences follow in type order.
pub fn augment(
    sentences: &[LabeledSentence],
    lexicon: &SynonymLexicon,
    targets: &BTreeMap<TdType, usize>,
    seed: u64,
) -> Result<Vec<LabeledSentence>, CorpusError> {
    let mut out = sentences.to_vec();

    for (&td_type, &target) in targets {
        let label = SentenceLabel::Td(td_type);
        let current = sentences.iter().filter(|s| s.label == label).count();
        if target < current {
            return Err(CorpusError::TargetBelowCurrent {
                td_type,
                target,
                current,
            });
        }
        let need = target - current;
        if need == 0 {
            continue;
        }
        let sources: Vec<(&LabeledSentence, Vec<(usize, usize, Vec<&str>)>)> = sentences
            .iter()
            .filter(|s| s.label == label)
            .map(|s| (s, replaceable_spans(&s.text, lexicon)))
            .filter(|(_, spans)| !spans.is_empty())
            .collect();
        if sources.is_empty() {
            return Err(CorpusError::InsufficientLexicon(td_type));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(type_seed(seed, td_type));
        for _ in 0..need {
            let (src, spans) = &sources[rng.gen_range(0..sources.len())];
            let n_replace = rng.gen_range(1..=spans.len());
            let mut chosen = sample(&mut rng, spans.len(), n_replace).into_vec();
            chosen.sort_unstable();

            let mut text = String::with_capacity(src.text.len() + 16);
            let mut cursor = 0;
            for k in chosen {
                let (s, e, syn) = &spans[k];
                let pick = syn[rng.gen_range(0..syn.len())];
                text.push_str(&src.text[cursor..*s]);
                text.push_str(&match_case(&src.text[*s..*e], pick));
                cursor = *e;
            }
            text.push_str(&src.text[cursor..]);
            debug_assert_ne!(text, src.text);

            out.push(LabeledSentence {
                text,
                augmented: true,
                ..(*src).clone()
            });
        }
    }
    Ok(out)
}

/// Default augmentation targets: twice the median class count, capped at the
/// largest class, never below a class's current count. Only TD types present
/// in `sentences` get a target.
pub fn default_targets(sentences: &[LabeledSentence]) -> BTreeMap<TdType, usize> {
    let mut counts: BTreeMap<TdType, usize> = BTreeMap::new();
    for s in sentences {
        if let Some(t) = s.label.td_type() {
            *counts.entry(t).or_default() += 1;
        }
    }
    if counts.is_empty() {
        return counts;
    }
    let mut sorted: Vec<usize> = counts.values().copied().collect();
    sorted.sort_unstable();
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 0 {
        (sorted[mid - 1] + sorted[mid]) / 2
    } else {
        sorted[mid]
    };
    let max = *sorted.last().unwrap();
    let goal = (median * 2).min(max);
    counts
        .into_iter()
        .map(|(t, c)| (t, c.max(goal)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn sentence(text: &str, t: TdType) -> LabeledSentence {
        LabeledSentence {
            text: text.into(),
            label: SentenceLabel::Td(t),
            comment_id: "c1".into(),
            package: "pkg".into(),
            platform: "ropensci".into(),
            created_at: chrono::Utc.with_ymd_and_hms(2020, 1, 1, 0, 0, 0).unwrap(),
            augmented: false,
        }
    }

    fn small_lexicon() -> SynonymLexicon {
        let mut lex = SynonymLexicon::new();
        lex.insert("small", PartOfSpeech::Adjective, ["little"]).unwrap();
        lex
    }

    #[test]
    fn equal_targets_are_a_no_op() {
        let input = vec![sentence("a small problem", TdType::Code)];
        let targets = BTreeMap::from([(TdType::Code, 1)]);
        assert_eq!(augment(&input, &small_lexicon(), &targets, 1).unwrap(), input);
    }

    #[test]
    fn single_forced_substitution() {
        let input = vec![sentence("a small problem", TdType::Code)];
        let targets = BTreeMap::from([(TdType::Code, 2)]);
        let out = augment(&input, &small_lexicon(), &targets, 9).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0], input[0]);
        assert_eq!(out[1].text, "a little problem");
        assert!(out[1].augmented);
        assert_eq!(out[1].comment_id, "c1");
    }

    #[test]
    fn case_is_preserved() {
        let input = vec![sentence("Small problem", TdType::Code)];
        let targets = BTreeMap::from([(TdType::Code, 2)]);
        let out = augment(&input, &small_lexicon(), &targets, 0).unwrap();
        assert_eq!(out[1].text, "Little problem");
    }

    #[test]
    fn deterministic_under_seed() {
        let mut lex = small_lexicon();
        lex.insert("fix", PartOfSpeech::Verb, ["repair", "mend", "correct"]).unwrap();
        lex.insert("big", PartOfSpeech::Adjective, ["large", "huge"]).unwrap();
        let input = vec![
            sentence("please fix the big small bug", TdType::Defect),
            sentence("fix it", TdType::Defect),
            sentence("a small doc gap", TdType::Documentation),
        ];
        let targets = BTreeMap::from([(TdType::Defect, 30), (TdType::Documentation, 4)]);
        let a = augment(&input, &lex, &targets, 42).unwrap();
        let b = augment(&input, &lex, &targets, 42).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let defects = a
            .iter()
            .filter(|s| s.label == SentenceLabel::Td(TdType::Defect))
            .count();
        assert_eq!(defects, 30);
        for s in a.iter().filter(|s| s.augmented) {
            assert!(input.iter().all(|o| o.text != s.text || o.label != s.label));
        }
    }

    #[test]
    fn missing_lexicon_coverage() {
        let input = vec![sentence("nothing to swap", TdType::Test)];
        let targets = BTreeMap::from([(TdType::Test, 3)]);
        assert!(matches!(
            augment(&input, &small_lexicon(), &targets, 0),
            Err(CorpusError::InsufficientLexicon(TdType::Test))
        ));
    }

    #[test]
    fn target_below_current() {
        let input = vec![
            sentence("a small problem", TdType::Code),
            sentence("another", TdType::Code),
        ];
        let targets = BTreeMap::from([(TdType::Code, 1)]);
        assert!(matches!(
            augment(&input, &small_lexicon(), &targets, 0),
            Err(CorpusError::TargetBelowCurrent { .. })
        ));
    }

    #[test]
    fn lexicon_validation() {
        let mut lex = SynonymLexicon::new();
        assert!(lex.insert("Small", PartOfSpeech::Adjective, ["tiny"]).is_err());
        assert!(lex.insert("small", PartOfSpeech::Adjective, ["small"]).is_err());
        assert!(lex.insert("small", PartOfSpeech::Adjective, ["Tiny"]).is_err());
        assert!(lex.insert("small", PartOfSpeech::Adjective, ["tiny"]).is_ok());
        assert_eq!(lex.synonyms("small"), vec!["tiny"]);
    }

    #[test]
    fn default_targets_median_rule() {
        let mut input = Vec::new();
        for (t, n) in [(TdType::Code, 10), (TdType::Test, 2), (TdType::Build, 4)] {
            for i in 0..n {
                input.push(sentence(&format!("s{i}"), t));
            }
        }
        let targets = default_targets(&input);
        // median 4 -> goal min(8, 10) = 8
        assert_eq!(targets[&TdType::Code], 10);
        assert_eq!(targets[&TdType::Test], 8);
        assert_eq!(targets[&TdType::Build], 8);
    }
}
