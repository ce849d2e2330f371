//! Reference implementations used to check the engine. Nothing here calls
//! into the search module.

use std::collections::BTreeSet;

use geox::search::DatasetQuery;
use geox::Store;

/// Soundex via the "encode everything, then clean up" route: drop h/w after
/// the first letter, map every letter to a digit (vowels and y to 0), merge
/// runs of the same digit, replace the first digit by the first letter,
/// delete zeros, pad.
pub fn reference_soundex(word: &str) -> Option<String> {
    let letters: Vec<char> = word.chars().filter(|c| c.is_ascii_alphabetic()).map(|c| c.to_ascii_lowercase()).collect();
    let (&first, rest) = letters.split_first()?;
    let kept: Vec<char> = std::iter::once(first).chain(rest.iter().copied().filter(|c| !matches!(c, 'h' | 'w'))).collect();
    let digit = |c: char| match c {
        'b' | 'f' | 'p' | 'v' => '1',
        'c' | 'g' | 'j' | 'k' | 'q' | 's' | 'x' | 'z' => '2',
        'd' | 't' => '3',
        'l' => '4',
        'm' | 'n' => '5',
        'r' => '6',
        _ => '0',
    };
    let mut digits: Vec<char> = kept.iter().map(|&c| digit(c)).collect();
    digits.dedup();
    let tail: String = digits[1..].iter().filter(|&&d| d != '0').collect();
    let mut code = format!("{}{}", first.to_ascii_uppercase(), tail);
    while code.len() < 4 {
        code.push('0');
    }
    code.truncate(4);
    Some(code)
}

/// Lowercase, strip the diacritics that occur in the test vocabulary, and
/// collapse whitespace.
pub fn reference_fold(text: &str) -> String {
    let plain: String = text
        .chars()
        .map(|c| match c {
            'á' | 'à' | 'â' | 'ã' | 'ä' | 'Á' | 'À' | 'Â' | 'Ã' | 'Ä' => 'a',
            'é' | 'è' | 'ê' | 'ë' | 'É' | 'È' | 'Ê' | 'Ë' => 'e',
            'í' | 'ì' | 'î' | 'ï' | 'Í' => 'i',
            'ó' | 'ò' | 'ô' | 'õ' | 'ö' | 'Ó' | 'Ö' => 'o',
            'ú' | 'ù' | 'û' | 'ü' | 'Ú' | 'Ü' => 'u',
            'ç' | 'Ç' => 'c',
            'ñ' | 'Ñ' => 'n',
            other => other,
        })
        .flat_map(char::to_lowercase)
        .collect();
    plain.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn reference_tokens(text: &str) -> Vec<String> {
    reference_fold(text)
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

#[derive(Debug, PartialEq, Eq)]
enum Key {
    Number(String),
    Sound(String),
    Text(String),
}

fn key(token: &str) -> Key {
    if token.chars().all(|c| c.is_ascii_digit()) {
        return Key::Number(token.to_string());
    }
    match reference_soundex(token) {
        Some(code) => Key::Sound(code),
        None => Key::Text(token.to_string()),
    }
}

/// Every query token has a phonetic partner inside one value.
pub fn covers(query: &str, values: &[&str]) -> bool {
    let wanted: Vec<Key> = reference_tokens(query).iter().map(|t| key(t)).collect();
    if wanted.is_empty() {
        return true;
    }
    values.iter().any(|v| {
        let have: Vec<Key> = reference_tokens(v).iter().map(|t| key(t)).collect();
        wanted.iter().all(|k| have.contains(k))
    })
}

fn any_equal(wanted: &[String], have: &[&str]) -> bool {
    wanted.iter().any(|w| have.iter().any(|h| reference_fold(w) == reference_fold(h)))
}

/// Linear scan over every dataset.
pub fn scan(store: &Store, q: &DatasetQuery) -> BTreeSet<String> {
    store
        .datasets()
        .filter(|d| {
            let health: Vec<&str> = d.health_applications.iter().map(|t| t.as_str()).collect();
            let areas: Vec<&str> = d.coverage.areas.iter().map(|t| t.as_str()).collect();
            let providers: Vec<&str> = d.providers.iter().map(|p| p.name.as_str()).collect();
            (q.health_terms.is_empty() || any_equal(&q.health_terms, &health))
                && q.cost.is_none_or(|c| d.cost.access == c)
                && (q.areas.is_empty() || any_equal(&q.areas, &areas))
                && (q.providers.is_empty() || any_equal(&q.providers, &providers))
                && (q.provider_categories.is_empty()
                    || d.providers.iter().any(|p| q.provider_categories.contains(&p.category)))
                && q.free_text.as_deref().is_none_or(|text| {
                    let scope: Vec<&str> = health.iter().chain(areas.iter()).copied().collect();
                    covers(text, &scope)
                })
        })
        .map(|d| d.id.clone())
        .collect()
}
