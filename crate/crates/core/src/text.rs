//! Word tokenization, plural folding and slugs shared by the extractors.

use std::borrow::Cow;
use std::ops::Range;

/// A word token: a maximal run of alphanumeric characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub span: Range<usize>,
    /// Lowercased surface.
    pub lower: String,
    /// Lowercased and singularized.
    pub norm: String,
}

/// Splits `text` into alphanumeric runs. Hyphens, apostrophes and all
/// punctuation separate words, so "real-time" yields two words.
pub fn words(text: &str) -> Vec<Word> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            if start.is_none() {
                start = Some(i);
            }
        } else if let Some(s) = start.take() {
            out.push(make_word(text, s..i));
        }
    }
    if let Some(s) = start {
        out.push(make_word(text, s..text.len()));
    }
    out
}

fn make_word(text: &str, span: Range<usize>) -> Word {
    let lower = text[span.clone()].to_lowercase();
    let norm = singularize(&lower).into_owned();
    Word { span, lower, norm }
}

/// Folds a lowercase English plural to its singular by suffix stripping only.
///
/// Words of three letters or fewer and words ending in "ss", "us" or "is"
/// are left alone. "-ies" becomes "-y"; sibilant plurals ("-sses", "-shes",
/// "-ches", "-xes", "-zes") lose "es"; anything else ending in "s" loses it.
pub fn singularize(word: &str) -> Cow<'_, str> {
    let n = word.chars().count();
    if n <= 3
        || !word.ends_with('s')
        || word.ends_with("ss")
        || word.ends_with("us")
        || word.ends_with("is")
    {
        return Cow::Borrowed(word);
    }
    if n > 4 && word.ends_with("ies") {
        return Cow::Owned(format!("{}y", &word[..word.len() - 3]));
    }
    for suffix in ["sses", "shes", "ches", "xes", "zes"] {
        if word.ends_with(suffix) {
            return Cow::Borrowed(&word[..word.len() - 2]);
        }
    }
    Cow::Borrowed(&word[..word.len() - 1])
}

/// Lowercased, plural-folded words joined by single spaces.
pub fn normalize_phrase(text: &str) -> String {
    words(text)
        .into_iter()
        .map(|w| w.norm)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Lowercase ASCII slug: non-alphanumerics become "-", runs collapse, ends trimmed.
pub fn slugify(label: &str) -> String {
    let mut slug = String::with_capacity(label.len());
    let mut pending_dash = false;
    for c in label.chars() {
        if c.is_ascii_alphanumeric() {
            if pending_dash && !slug.is_empty() {
                slug.push('-');
            }
            pending_dash = false;
            slug.push(c.to_ascii_lowercase());
        } else {
            pending_dash = true;
        }
    }
    slug
}

/// Finds every start index at which `needle` occurs as a contiguous run of
/// normalized words inside `haystack`.
pub(crate) fn find_word_sequence(haystack: &[Word], needle: &[String]) -> Vec<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return Vec::new();
    }
    (0..=haystack.len() - needle.len())
        .filter(|&i| {
            haystack[i..i + needle.len()]
                .iter()
                .zip(needle)
                .all(|(w, n)| &w.norm == n)
        })
        .collect()
}
