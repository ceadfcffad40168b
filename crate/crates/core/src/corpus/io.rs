//! JSONL persistence for corpora, labeled datasets, phrase lists and lexicons.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::augment::{LexiconEntry, SynonymLexicon};
use super::benchmark::LabeledPhrase;
use super::{CorpusError, LabeledSentence, RawComment};

fn io_err(path: &Path, source: std::io::Error) -> CorpusError {
    CorpusError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Reads a JSONL file, skipping blank lines.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    read_jsonl_from(BufReader::new(file), &path.display().to_string())
}

pub fn read_jsonl_from<T: DeserializeOwned, R: BufRead>(
    reader: R,
    origin: &str,
) -> Result<Vec<T>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CorpusError::Io {
            path: origin.to_string(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| CorpusError::Serialization {
            path: origin.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Writes records as JSONL, truncating `path`.
pub fn write_jsonl<'a, T, I>(records: I, path: &Path) -> Result<usize, CorpusError>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let mut n = 0;
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| CorpusError::Serialization {
            path: path.display().to_string(),
            line: n + 1,
            message: e.to_string(),
        })?;
        w.write_all(line.as_bytes()).map_err(|e| io_err(path, e))?;
        w.write_all(b"\n").map_err(|e| io_err(path, e))?;
        n += 1;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(n)
}

/// Single writer for a corpus file. Each comment is serialized fully before a
/// single `write_all` of the line, so a line is either complete or absent.
pub struct CorpusWriter {
    file: File,
    path: String,
    written: usize,
}

impl CorpusWriter {
    pub fn create(path: &Path) -> Result<Self, CorpusError> {
        let file = File::create(path).map_err(|e| io_err(path, e))?;
        Ok(Self::wrap(file, path))
    }

    pub fn append(path: &Path) -> Result<Self, CorpusError> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| io_err(path, e))?;
        Ok(Self::wrap(file, path))
    }

    fn wrap(file: File, path: &Path) -> Self {
        CorpusWriter {
            file,
            path: path.display().to_string(),
            written: 0,
        }
    }

    pub fn write(&mut self, comment: &RawComment) -> Result<(), CorpusError> {
        let mut line = serde_json::to_vec(comment).map_err(|e| CorpusError::Serialization {
            path: self.path.clone(),
            line: self.written + 1,
            message: e.to_string(),
        })?;
        line.push(b'\n');
        self.file
            .write_all(&line)
            .map_err(|source| CorpusError::Io {
                path: self.path.clone(),
                source,
            })?;
        self.written += 1;
        Ok(())
    }

    pub fn written(&self) -> usize {
        self.written
    }
}

/// Writes `comments` to `path` (truncating) and returns the line count.
pub fn persist_corpus<I>(comments: I, path: &Path) -> Result<usize, CorpusError>
where
    I: IntoIterator<Item = RawComment>,
{
    let mut w = CorpusWriter::create(path)?;
    for c in comments {
        w.write(&c)?;
    }
    Ok(w.written())
}

/// Loads a corpus, rejecting duplicate comment ids.
pub fn load_corpus(path: &Path) -> Result<Vec<RawComment>, CorpusError> {
    let comments: Vec<RawComment> = read_jsonl(path)?;
    check_unique_ids(&comments)?;
    Ok(comments)
}

pub fn check_unique_ids(comments: &[RawComment]) -> Result<(), CorpusError> {
    let mut seen = HashSet::new();
    for c in comments {
        if !seen.insert(c.comment_id.as_str()) {
            return Err(CorpusError::DuplicateCommentId(c.comment_id.clone()));
        }
    }
    Ok(())
}

pub fn load_dataset(path: &Path) -> Result<Vec<LabeledSentence>, CorpusError> {
    read_jsonl(path)
}

pub fn write_dataset(sentences: &[LabeledSentence], path: &Path) -> Result<usize, CorpusError> {
    write_jsonl(sentences, path)
}

pub fn load_phrases(path: &Path) -> Result<Vec<LabeledPhrase>, CorpusError> {
    read_jsonl(path)
}

pub fn load_lexicon(path: &Path) -> Result<SynonymLexicon, CorpusError> {
    let entries: Vec<LexiconEntry> = read_jsonl(path)?;
    SynonymLexicon::from_entries(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn comment(id: &str, body: &str) -> RawComment {
        RawComment {
            platform: "ropensci".into(),
            package: "pkg".into(),
            issue_number: 7,
            comment_id: id.into(),
            created_at: chrono::Utc.with_ymd_and_hms(2019, 4, 2, 10, 0, 0).unwrap(),
            body: body.into(),
            url: format!("https://github.com/o/r/issues/7#issuecomment-{id}"),
        }
    }

    #[test]
    fn empty_stream_writes_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        assert_eq!(persist_corpus(Vec::new(), &p).unwrap(), 0);
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "");
        assert!(load_corpus(&p).unwrap().is_empty());
    }

    #[test]
    fn escaped_body_stays_on_one_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        let body = "line one\nline \"two\"\r\n\ttabbed \\ backslash";
        let n = persist_corpus(vec![comment("1", body), comment("2", "ok")], &p).unwrap();
        assert_eq!(n, 2);
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 2);
        let back = load_corpus(&p).unwrap();
        assert_eq!(back[0].body, body);
        assert_eq!(back, vec![comment("1", body), comment("2", "ok")]);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        persist_corpus(vec![comment("1", "a"), comment("1", "b")], &p).unwrap();
        assert!(matches!(
            load_corpus(&p),
            Err(CorpusError::DuplicateCommentId(id)) if id == "1"
        ));
    }

    #[test]
    fn append_mode_extends() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        persist_corpus(vec![comment("1", "a")], &p).unwrap();
        let mut w = CorpusWriter::append(&p).unwrap();
        w.write(&comment("2", "b")).unwrap();
        drop(w);
        assert_eq!(load_corpus(&p).unwrap().len(), 2);
    }

    #[test]
    fn bad_timestamp_is_a_serialization_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        std::fs::write(
            &p,
            r#"{"platform":"x","package":"p","issue_number":1,"comment_id":"1","created_at":"yesterday","body":"","url":""}"#,
        )
        .unwrap();
        assert!(matches!(
            load_corpus(&p),
            Err(CorpusError::Serialization { line: 1, .. })
        ));
    }
}
