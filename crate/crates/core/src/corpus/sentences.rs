//! Rule-based sentence splitting for markdown review comments.
//!
//! Fenced code blocks and inline code spans are dropped first. A sentence
//! ends at `.`, `!` or `?` (plus any trailing closing quotes/brackets) when
//! followed by whitespace and an uppercase letter, or by the end of text.
//! A blank line always ends a sentence, and so does the start of a markdown
//! list item (the marker itself is dropped). Periods that close a known
//! abbreviation never do.

const ABBREVIATIONS: &[&str] = &[
    "e.g.", "i.e.", "vs.", "cf.", "al.", "approx.", "fig.", "figs.", "eq.", "no.", "mr.", "mrs.",
    "ms.", "dr.", "prof.", "st.", "resp.", "esp.", "incl.", "ca.", "viz.", "v.",
];

const CLOSERS: &[char] = &[')', ']', '"', '\'', '\u{201d}', '\u{2019}', '*', '_'];

/// Splits a comment body into non-empty sentences in order.
pub fn split_sentences(body: &str) -> Vec<String> {
    let text = strip_code(body);
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    if let Some(k) = list_item_content(&chars, 0) {
        start = byte_at(&chars, k, text.len());
        i = k;
    }

    while i < chars.len() {
        let (_, c) = chars[i];
        if c == '\n' {
            let next = match blank_line_end(&chars, i) {
                Some(n) => Some(list_item_content(&chars, n).unwrap_or(n)),
                None => list_item_content(&chars, i + 1),
            };
            if let Some(next) = next {
                push_sentence(&mut out, &text[start..chars[i].0]);
                start = byte_at(&chars, next, text.len());
                i = next;
                continue;
            }
        }
        if matches!(c, '.' | '!' | '?') {
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j].1, '.' | '!' | '?') {
                j += 1;
            }
            while j < chars.len() && CLOSERS.contains(&chars[j].1) {
                j += 1;
            }
            if is_boundary(&text, &chars, i, j) {
                let end = byte_at(&chars, j, text.len());
                push_sentence(&mut out, &text[start..end]);
                start = end;
            }
            i = j;
            continue;
        }
        i += 1;
    }
    push_sentence(&mut out, &text[start..]);
    out
}

fn byte_at(chars: &[(usize, char)], idx: usize, len: usize) -> usize {
    chars.get(idx).map_or(len, |&(b, _)| b)
}

/// If a blank line starts at the newline `i`, returns the index just past it.
fn blank_line_end(chars: &[(usize, char)], i: usize) -> Option<usize> {
    let mut k = i + 1;
    while k < chars.len() && matches!(chars[k].1, ' ' | '\t' | '\r') {
        k += 1;
    }
    if k < chars.len() && chars[k].1 == '\n' {
        Some(k + 1)
    } else {
        None
    }
}

/// If a list item (`- `, `* `, `+ `, `1. `, `2) `) starts at `i`, returns
/// the index of its first content character.
fn list_item_content(chars: &[(usize, char)], i: usize) -> Option<usize> {
    let mut k = i;
    while k < chars.len() && matches!(chars[k].1, ' ' | '\t') {
        k += 1;
    }
    let marker_start = k;
    match chars.get(k).map(|&(_, c)| c) {
        Some('-' | '*' | '+') => k += 1,
        Some(c) if c.is_ascii_digit() => {
            while k < chars.len() && chars[k].1.is_ascii_digit() && k - marker_start < 3 {
                k += 1;
            }
            if !matches!(chars.get(k).map(|&(_, c)| c), Some('.' | ')')) {
                return None;
            }
            k += 1;
        }
        _ => return None,
    }
    if !matches!(chars.get(k).map(|&(_, c)| c), Some(' ' | '\t')) {
        return None;
    }
    while k < chars.len() && matches!(chars[k].1, ' ' | '\t') {
        k += 1;
    }
    Some(k)
}

fn is_boundary(text: &str, chars: &[(usize, char)], term: usize, after: usize) -> bool {
    if after >= chars.len() {
        return true;
    }
    if !chars[after].1.is_whitespace() {
        return false;
    }
    let mut k = after;
    while k < chars.len() && chars[k].1.is_whitespace() {
        k += 1;
    }
    if k < chars.len() && !chars[k].1.is_uppercase() {
        return false;
    }
    !(chars[term].1 == '.' && ends_with_abbreviation(text, chars, term))
}

fn ends_with_abbreviation(text: &str, chars: &[(usize, char)], dot: usize) -> bool {
    let end = chars[dot].0 + 1;
    let head = &text[..end];
    let word_start = head
        .rfind(char::is_whitespace)
        .map_or(0, |p| p + head[p..].chars().next().map_or(1, char::len_utf8));
    let word = head[word_start..]
        .trim_start_matches(['(', '[', '"', '\''])
        .to_lowercase();
    if word == "al." {
        let before = head[..word_start].trim_end();
        return before.to_lowercase().ends_with("et");
    }
    ABBREVIATIONS.contains(&word.as_str())
}

/// Keeps sentences with at least one alphanumeric. Whitespace runs are
/// collapsed and a space left before punctuation (where inline code used to
/// be) is dropped.
fn push_sentence(out: &mut Vec<String>, raw: &str) {
    if !raw.chars().any(char::is_alphanumeric) {
        return;
    }
    let joined = raw.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut s = String::with_capacity(joined.len());
    for c in joined.chars() {
        if matches!(c, ',' | ';' | ':' | '.' | '!' | '?' | ')') && s.ends_with(' ') {
            s.pop();
        }
        s.push(c);
    }
    out.push(s);
}

/// Removes fenced code blocks (replaced by a blank line) and inline code spans
/// (replaced by a space).
pub fn strip_code(body: &str) -> String {
    let mut without_fences = String::with_capacity(body.len());
    let mut fence: Option<(char, usize)> = None;
    for line in body.split_inclusive('\n') {
        let trimmed = line.trim_start();
        let marker = fence_marker(trimmed);
        match (fence, marker) {
            (None, Some(m)) => {
                fence = Some(m);
                without_fences.push_str("\n\n");
            }
            (Some((fc, fl)), Some((mc, ml))) if fc == mc && ml >= fl && is_bare_fence(trimmed) => {
                fence = None;
                without_fences.push_str("\n\n");
            }
            (Some(_), _) => {}
            (None, None) => without_fences.push_str(line),
        }
    }
    strip_inline_code(&without_fences)
}

fn fence_marker(line: &str) -> Option<(char, usize)> {
    let c = line.chars().next()?;
    if c != '`' && c != '~' {
        return None;
    }
    let n = line.chars().take_while(|&x| x == c).count();
    (n >= 3).then_some((c, n))
}

fn is_bare_fence(line: &str) -> bool {
    line.trim_start_matches(['`', '~']).trim().is_empty()
}

fn strip_inline_code(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] != '`' {
            out.push(chars[i]);
            i += 1;
            continue;
        }
        let run = chars[i..].iter().take_while(|&&c| c == '`').count();
        match find_closing_run(&chars, i + run, run) {
            Some(close) => {
                out.push(' ');
                i = close + run;
            }
            None => {
                out.extend(std::iter::repeat_n('`', run));
                i += run;
            }
        }
    }
    out
}

fn find_closing_run(chars: &[char], from: usize, len: usize) -> Option<usize> {
    let mut i = from;
    while i < chars.len() {
        if chars[i] == '`' {
            let run = chars[i..].iter().take_while(|&&c| c == '`').count();
            if run == len {
                return Some(i);
            }
            i += run;
        } else {
            i += 1;
        }
    }
    None
}
