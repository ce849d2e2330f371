//! Metadata catalogue of Earth-observation datasets and the health-research
//! publications that use them.
//!
//! The catalogue keeps two cross-referenced record tables in a [`Store`],
//! loads and saves them through a two-file CSV interchange ([`ingest`]),
//! answers faceted and phonetic queries ([`search`]), reproduces summary
//! tables ([`stats`]), places datasets on a map ([`geo`]) and serves all of it
//! over a JSON API with a moderated contribution queue ([`api`]).

pub mod api;
pub mod cli;
pub mod geo;
pub mod ingest;
pub mod model;
pub mod persist;
pub mod report;
pub mod search;
pub mod stats;
pub mod store;
pub mod term;

pub use model::{
    CostAccess, CostInfo, CoverageInfo, CoverageRegion, DatasetRecord, JournalCategory, Provider, ProviderCategory,
    ProviderRegion, PublicationRecord, RecordKind, Resolution, StudyTheme, UpdateFrequency,
};
pub use report::{Issue, ValidationReport};
pub use store::{CatalogError, SnapshotCell, Store};
pub use term::Term;
