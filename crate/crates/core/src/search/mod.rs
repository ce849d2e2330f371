//! Phonetic free-text matching and faceted queries over the catalogue.

mod query;
mod soundex;
mod text;

pub use query::{search_datasets, search_publications, DatasetIndex, DatasetQuery, PublicationQuery};
pub use soundex::{soundex, NonPhonetic, SoundexCode};
pub use text::{exact_token_match, fuzzy_match, normalize_tokens};
