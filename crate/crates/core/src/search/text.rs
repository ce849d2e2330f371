use std::collections::HashSet;

use super::soundex::{soundex, SoundexCode};
use crate::term::fold;

/// Lowercased, diacritic-free tokens split on every non-alphanumeric run.
pub fn normalize_tokens(text: &str) -> Vec<String> {
    fold(text)
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

pub(crate) fn is_numeric(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.is_ascii_digit())
}

/// What a token is compared by. Numeric tokens and tokens without Latin
/// letters compare by their text; everything else by Soundex code.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum TokenKey {
    Numeric(String),
    Phonetic(SoundexCode),
    Literal(String),
}

pub(crate) fn token_key(token: &str) -> TokenKey {
    if is_numeric(token) {
        return TokenKey::Numeric(token.to_string());
    }
    match soundex(token) {
        Ok(code) => TokenKey::Phonetic(code),
        Err(_) => TokenKey::Literal(token.to_string()),
    }
}

pub(crate) fn keys_of(text: &str) -> Vec<TokenKey> {
    normalize_tokens(text).iter().map(|t| token_key(t)).collect()
}

/// True when a single field value covers every query token, phonetically for
/// words and exactly for numbers. An empty query matches anything.
pub fn fuzzy_match<S: AsRef<str>>(query: &str, field_values: &[S]) -> bool {
    let wanted = keys_of(query);
    if wanted.is_empty() {
        return true;
    }
    field_values.iter().any(|value| {
        let have: HashSet<TokenKey> = keys_of(value.as_ref()).into_iter().collect();
        wanted.iter().all(|k| have.contains(k))
    })
}

/// Like [`fuzzy_match`] but requiring identical tokens.
pub fn exact_token_match<S: AsRef<str>>(query: &str, field_values: &[S]) -> bool {
    let wanted = normalize_tokens(query);
    if wanted.is_empty() {
        return true;
    }
    field_values.iter().any(|value| {
        let have: HashSet<String> = normalize_tokens(value.as_ref()).into_iter().collect();
        wanted.iter().all(|t| have.contains(t))
    })
}
