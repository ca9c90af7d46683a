//! Field normalization into deduplicated word sets.

use std::collections::HashSet;

use indexmap::IndexSet;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::field::Field;

/// Words dropped from titles.
pub const DEFAULT_STOPWORDS: &[&str] = &[
    "a", "about", "above", "across", "after", "against", "along", "among", "an", "and", "are",
    "around", "as", "at", "before", "behind", "below", "beneath", "beside", "between", "beyond",
    "but", "by", "during", "except", "for", "from", "in", "inside", "into", "is", "its", "near",
    "nor", "of", "off", "on", "onto", "or", "out", "over", "so", "than", "that", "the", "their",
    "through", "to", "toward", "towards", "under", "until", "upon", "via", "with", "within",
    "without", "yet",
];

#[derive(Clone, Debug)]
pub struct Tokenizer {
    stopwords: HashSet<String>,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer::with_stopwords(DEFAULT_STOPWORDS.iter().copied())
    }
}

impl Tokenizer {
    pub fn with_stopwords<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Tokenizer {
            stopwords: words.into_iter().map(|w| fold(w.as_ref())).collect(),
        }
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    pub fn tokenize(&self, raw_text: &str, field: Field) -> IndexSet<String> {
        match field {
            Field::Authors => raw_text
                .split(['\n', ';'])
                .filter_map(normalize_author)
                .collect(),
            Field::Email => raw_text
                .split(|c: char| c.is_whitespace() || c == ';' || c == ',')
                .map(|e| fold(e.trim_matches(|c: char| c == '.' || c == '<' || c == '>')))
                .filter(|e| !e.is_empty())
                .collect(),
            Field::Address => address_words(raw_text).map(|(_, norm)| norm).collect(),
            Field::Title => words(raw_text).filter(|w| !self.is_stopword(w)).collect(),
            Field::Keywords | Field::ResearchField => words(raw_text).collect(),
            Field::Journal => {
                let joined = words(raw_text).collect::<Vec<_>>().join("_");
                if joined.is_empty() {
                    IndexSet::new()
                } else {
                    IndexSet::from([joined])
                }
            }
            Field::Year => raw_text
                .split(|c: char| !c.is_ascii_digit())
                .find(|run| !run.is_empty())
                .map(|run| IndexSet::from([run.to_string()]))
                .unwrap_or_default(),
        }
    }
}

/// Tokenize with the built-in stopword list.
pub fn tokenize_field(raw_text: &str, field: Field) -> IndexSet<String> {
    Tokenizer::default().tokenize(raw_text, field)
}

/// Inverse-compatible join: `tokenize(join(tokenize(x)))` is a fixed point.
pub fn join_tokens(tokens: &IndexSet<String>) -> String {
    tokens
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Strip diacritics and case-fold.
pub fn fold(text: &str) -> String {
    strip_marks(text).to_lowercase()
}

fn strip_marks(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.nfd() {
        if is_combining_mark(c) {
            continue;
        }
        match c {
            'ß' => out.push_str("ss"),
            'æ' => out.push_str("ae"),
            'Æ' => out.push_str("AE"),
            'œ' => out.push_str("oe"),
            'Œ' => out.push_str("OE"),
            'ø' => out.push('o'),
            'Ø' => out.push('O'),
            'ł' => out.push('l'),
            'Ł' => out.push('L'),
            'đ' => out.push('d'),
            'Đ' => out.push('D'),
            _ => out.push(c),
        }
    }
    out
}

fn words(text: &str) -> impl Iterator<Item = String> {
    fold(text)
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect::<Vec<_>>()
        .into_iter()
}

/// Address words as (display form, normalized token) pairs, first occurrence
/// order, bracketed author lists removed.
pub(crate) fn address_words(text: &str) -> impl Iterator<Item = (String, String)> {
    let mut unbracketed = String::with_capacity(text.len());
    let mut depth = 0usize;
    for c in text.chars() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            _ if depth == 0 => unbracketed.push(c),
            _ => unbracketed.push(' '),
        }
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for raw in unbracketed.split(|c: char| !(c.is_alphanumeric() || c == '-')) {
        let display: String = strip_marks(raw.trim_matches('-')).to_uppercase();
        let norm: String = fold(raw).chars().filter(|c| c.is_alphanumeric()).collect();
        if norm.chars().count() < 2 || norm.chars().all(|c| c.is_ascii_digit()) {
            continue;
        }
        if seen.insert(norm.clone()) {
            out.push((display, norm));
        }
    }
    out.into_iter()
}

/// Canonical `surname_initials` token for one author name.
///
/// Accepts `Surname, Initials`, `Surname, Given Names`, natural order
/// `Given Surname`, and an already canonical token.
pub fn normalize_author(name: &str) -> Option<String> {
    let name = strip_marks(name.trim());
    if name.is_empty() {
        return None;
    }
    let alnum = |s: &str| -> String {
        s.chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect()
    };
    let (surname, initials) = if let Some((surname, given)) = name.split_once(',') {
        (alnum(surname), initials_of(given))
    } else if let Some((surname, given)) = name.split_once('_') {
        (alnum(surname), alnum(given))
    } else {
        let parts: Vec<&str> = name.split_whitespace().collect();
        match parts.split_last() {
            Some((last, [])) => (alnum(last), String::new()),
            Some((last, given)) => (alnum(last), initials_of(&given.join(" "))),
            None => return None,
        }
    };
    if surname.is_empty() {
        return None;
    }
    Some(if initials.is_empty() {
        surname
    } else {
        format!("{surname}_{initials}")
    })
}

fn initials_of(given: &str) -> String {
    let mut out = String::new();
    for part in given.split(|c: char| c.is_whitespace() || c == '.' || c == '-') {
        let letters: Vec<char> = part.chars().filter(|c| c.is_alphanumeric()).collect();
        if letters.is_empty() {
            continue;
        }
        let block_of_initials = letters.len() <= 4 && letters.iter().all(|c| c.is_uppercase());
        if block_of_initials {
            out.extend(letters.iter().flat_map(|c| c.to_lowercase()));
        } else {
            out.extend(letters[0].to_lowercase());
        }
    }
    out
}
