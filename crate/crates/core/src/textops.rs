//! Identifier and prose pipelines.
//!
//! [`information_extraction`] turns identifiers (names, packages, parameter
//! signatures) into space-separated terms by cleaning special characters
//! and splitting camel case. [`text_preprocess`] turns documentation prose
//! into normalized terms: tokenization, punctuation removal, stop-word
//! removal, lemmatization and lowercasing.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Embedded stop list: common English words plus Java reserved words.
pub const EMBEDDED_STOP_WORDS: &str = include_str!("stop_words.txt");

/// A case-insensitive stop-word set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWords {
    words: BTreeSet<String>,
}

impl StopWords {
    /// Parses a one-word-per-line list. Blank lines and `#` comments are
    /// ignored; words are lowercased.
    pub fn parse(list: &str) -> Self {
        let words = list
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Self { words }
    }

    pub fn embedded() -> Self {
        Self::parse(EMBEDDED_STOP_WORDS)
    }

    pub fn contains(&self, word: &str) -> bool {
        if word.chars().any(char::is_uppercase) {
            self.words.contains(&word.to_lowercase())
        } else {
            self.words.contains(word)
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

impl Default for StopWords {
    fn default() -> Self {
        Self::embedded()
    }
}

/// Output of [`information_extraction`]: letters and digits separated by
/// single spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExtractedText(String);

/// Output of [`text_preprocess`]: lowercase, stop-word free terms separated
/// by single spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PreprocessedText(String);

macro_rules! text_newtype {
    ($t:ident) => {
        impl $t {
            pub fn as_str(&self) -> &str {
                &self.0
            }

            pub fn into_string(self) -> String {
                self.0
            }

            pub fn terms(&self) -> impl Iterator<Item = &str> {
                self.0.split(' ').filter(|t| !t.is_empty())
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl AsRef<str> for $t {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }
    };
}

text_newtype!(ExtractedText);
text_newtype!(PreprocessedText);

fn is_punctuation(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// Splits an identifier at lower→upper boundaries, before the last capital
/// of an upper-case run that is followed by a lower-case letter, and between
/// letters and digits. No character is dropped.
pub fn camel_case_split(token: &str) -> Vec<String> {
    let chars: Vec<char> = token.chars().collect();
    let mut out = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if i > 0 && !current.is_empty() {
            let prev = chars[i - 1];
            let next = chars.get(i + 1).copied();
            let lower_to_upper = prev.is_lowercase() && c.is_uppercase();
            let acronym_end = prev.is_uppercase() && c.is_uppercase() && next.is_some_and(char::is_lowercase);
            let digit_edge = (prev.is_alphabetic() && c.is_numeric()) || (prev.is_numeric() && c.is_alphabetic());
            if lower_to_upper || acronym_end || digit_edge {
                out.push(core::mem::take(&mut current));
            }
        }
        current.push(c);
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// Replaces special characters with spaces, splits camel case, and
/// normalizes whitespace. Case is preserved.
pub fn information_extraction(d: &str) -> ExtractedText {
    let cleaned: String = d.chars().map(|c| if c.is_alphanumeric() { c } else { ' ' }).collect();
    let mut parts: Vec<String> = Vec::new();
    for word in cleaned.split_whitespace() {
        parts.extend(camel_case_split(word));
    }
    ExtractedText(parts.join(" "))
}

/// Whitespace tokenization with punctuation detached into single-character
/// tokens. An apostrophe between two letters or digits stays inside the
/// word so possessives reach the lemmatizer intact.
pub fn tokenize(d: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in d.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut word = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let inner_apostrophe = c == '\''
                && i > 0
                && chars[i - 1].is_alphanumeric()
                && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
            if is_punctuation(c) && !inner_apostrophe {
                if !word.is_empty() {
                    tokens.push(core::mem::take(&mut word));
                }
                tokens.push(c.to_string());
            } else {
                word.push(c);
            }
        }
        if !word.is_empty() {
            tokens.push(word);
        }
    }
    tokens
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn has_vowel(s: &str) -> bool {
    s.chars().any(|c| is_vowel(c) || c == 'y')
}

fn is_consonant(c: char) -> bool {
    c.is_alphabetic() && !is_vowel(c)
}

/// Number of vowel→consonant transitions, the usual "measure" of a stem.
fn measure(s: &str) -> usize {
    let mut m = 0;
    let mut prev_vowel = false;
    for c in s.chars() {
        let v = is_vowel(c);
        if prev_vowel && !v {
            m += 1;
        }
        prev_vowel = v;
    }
    m
}

/// Restores a stem after `-ed`/`-ing` removal: `creat`→`create`,
/// `mapp`→`map`, `nam`→`name`.
fn repair_stem(mut stem: String) -> String {
    if stem.ends_with("at") || stem.ends_with("bl") || stem.ends_with("iz") {
        stem.push('e');
        return stem;
    }
    let tail: Vec<char> = stem.chars().rev().take(3).collect();
    if let [a, b, ..] = tail.as_slice() {
        if a == b && is_consonant(*a) && !matches!(a, 'l' | 's' | 'z') {
            stem.pop();
            return stem;
        }
    }
    if let [c2, v, c1] = tail.as_slice() {
        let cvc = is_consonant(*c1) && is_vowel(*v) && is_consonant(*c2) && !matches!(c2, 'w' | 'x' | 'y');
        if cvc && measure(&stem) == 1 {
            stem.push('e');
        }
    }
    stem
}

fn strip_suffix_chars(s: &str, n: usize) -> &str {
    let end = s.char_indices().rev().nth(n - 1).map_or(0, |(i, _)| i);
    &s[..end]
}

/// One pass of the suffix cascade; the first rule that applies wins.
pub fn lemmatize_token(t: &str) -> String {
    let len = t.chars().count();
    if let Some(stem) = t.strip_suffix("'s") {
        if !stem.is_empty() {
            return stem.into();
        }
    }
    if let Some(stem) = t.strip_suffix("ing") {
        if stem.chars().count() >= 3 && has_vowel(stem) {
            return repair_stem(stem.into());
        }
    }
    if t.ends_with("ed") && !t.ends_with("eed") {
        let stem = strip_suffix_chars(t, 2);
        if stem.chars().count() >= 3 && has_vowel(stem) {
            return repair_stem(stem.into());
        }
        if len >= 4 {
            return strip_suffix_chars(t, 1).into();
        }
    }
    if t.ends_with('s') && !t.ends_with("ss") && len >= 3 {
        return strip_suffix_chars(t, 1).into();
    }
    t.into()
}

/// Repeats [`lemmatize_token`] until the token stops changing. Every rule
/// shortens the token, so this terminates.
pub fn lemmatize(t: &str) -> String {
    let mut cur = String::from(t);
    loop {
        let next = lemmatize_token(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Prose pipeline with the embedded stop list.
pub fn text_preprocess(d: &str) -> PreprocessedText {
    text_preprocess_with(d, &StopWords::embedded())
}

/// Prose pipeline: tokenize, drop punctuation, drop stop words, lemmatize,
/// lowercase, join.
pub fn text_preprocess_with(d: &str, stop_words: &StopWords) -> PreprocessedText {
    let lowered = d.to_lowercase();
    let mut out: Vec<String> = Vec::new();
    for token in tokenize(&lowered) {
        if !token.chars().any(char::is_alphanumeric) || stop_words.contains(&token) {
            continue;
        }
        let cleaned: String = token.chars().filter(|c| c.is_alphanumeric() && !c.is_uppercase()).collect();
        let lemma = lemmatize(&cleaned);
        if lemma.is_empty() || stop_words.contains(&lemma) {
            continue;
        }
        out.push(lemma);
    }
    PreprocessedText(out.join(" "))
}

/// Light normalization for method descriptions: lowercase and tokenize with
/// punctuation kept as separate terms, nothing removed.
pub fn light_tokenize(d: &str) -> String {
    tokenize(&d.to_lowercase()).join(" ")
}

/// [`information_extraction`] followed by lowercasing, for term matching.
pub fn identifier_terms(d: &str) -> String {
    information_extraction(d).as_str().to_lowercase()
}
