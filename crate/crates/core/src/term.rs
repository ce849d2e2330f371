//! Free-form catalogue terms (health applications, topics, areas).
//!
//! Terms keep the curator's spelling verbatim but compare through a folded
//! key: Unicode compatibility decomposition, combining marks removed,
//! lowercased, whitespace collapsed.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Folds text for case- and diacritic-insensitive comparison.
pub fn fold(text: &str) -> String {
    let stripped: String = text
        .nfkd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect();
    stripped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Sort key used for every multi-valued field: folded text first, raw text
/// as the tie-break so the order is total.
pub fn canonical_cmp(a: &str, b: &str) -> Ordering {
    fold(a).cmp(&fold(b)).then_with(|| a.cmp(b))
}

/// A verbatim term with folded equality helpers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Term(String);

impl Term {
    pub fn new(text: impl Into<String>) -> Self {
        Term(text.into().trim().to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn key(&self) -> String {
        fold(&self.0)
    }

    /// Folded equality against arbitrary text.
    pub fn matches(&self, other: &str) -> bool {
        fold(&self.0) == fold(other)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Term {
    fn from(s: &str) -> Self {
        Term::new(s)
    }
}

impl From<String> for Term {
    fn from(s: String) -> Self {
        Term::new(s)
    }
}

impl AsRef<str> for Term {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Sorts terms canonically and drops empty entries and folded duplicates.
pub(crate) fn canonicalize_terms(terms: &mut Vec<Term>) {
    terms.retain(|t| !t.0.is_empty());
    terms.sort_by(|a, b| canonical_cmp(&a.0, &b.0));
    terms.dedup_by(|a, b| a.key() == b.key());
}
