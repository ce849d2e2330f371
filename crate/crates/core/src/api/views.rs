//! JSON shapes returned by the service. The CLI prints the same bodies, so
//! both go through [`json_body`].

use serde::Serialize;

use crate::geo::{hotspots, Gazetteer, Hotspot};
use crate::model::{CostAccess, DatasetRecord, ProviderCategory, PublicationRecord};
use crate::report::Issue;
use crate::search::{search_datasets, search_publications, DatasetQuery, PublicationQuery};
use crate::stats::{compute, StatsTable, StudyAreaBuckets, TableName};
use crate::store::Store;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PublicationSummary {
    pub id: String,
    pub title: String,
    pub year: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub id: String,
    pub name: String,
}

/// A dataset with its linked publications resolved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetView<'a> {
    #[serde(flatten)]
    pub record: &'a DatasetRecord,
    pub publications: Vec<PublicationSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PublicationView<'a> {
    #[serde(flatten)]
    pub record: &'a PublicationRecord,
    pub datasets: Vec<DatasetSummary>,
}

pub fn dataset_view<'a>(store: &Store, record: &'a DatasetRecord) -> DatasetView<'a> {
    let publications = record
        .publication_ids
        .iter()
        .filter_map(|id| store.publication(id))
        .map(|p| PublicationSummary { id: p.id.clone(), title: p.title.clone(), year: p.year })
        .collect();
    DatasetView { record, publications }
}

pub fn publication_view<'a>(store: &Store, record: &'a PublicationRecord) -> PublicationView<'a> {
    let datasets = record
        .dataset_ids
        .iter()
        .filter_map(|id| store.dataset(id))
        .map(|d| DatasetSummary { id: d.id.clone(), name: d.name.clone() })
        .collect();
    PublicationView { record, datasets }
}

/// Pretty-printed JSON with a trailing newline.
pub fn json_body<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("views always serialize");
    s.push('\n');
    s
}

pub fn dataset_list(store: &Store, query: &DatasetQuery) -> String {
    let views: Vec<_> = search_datasets(store, query).into_iter().map(|d| dataset_view(store, d)).collect();
    json_body(&views)
}

pub fn publication_list(store: &Store, query: &PublicationQuery) -> String {
    let views: Vec<_> =
        search_publications(store, query).into_iter().map(|p| publication_view(store, p)).collect();
    json_body(&views)
}

pub fn stats_body(table: TableName, store: &Store, buckets: &StudyAreaBuckets) -> String {
    let table: StatsTable = compute(table, store, buckets);
    json_body(&table)
}

pub fn hotspot_body(store: &Store, gazetteer: &Gazetteer) -> String {
    let report = hotspots(store, gazetteer);
    for w in &report.warnings {
        tracing::warn!(record = w.record.as_deref().unwrap_or(""), "{}", w.message);
    }
    let list: Vec<Hotspot> = report.hotspots;
    json_body(&list)
}

/// Builds a dataset query from URL parameters. Repeated keys add
/// alternatives; empty values are ignored.
pub fn dataset_query_from_pairs<'a>(
    pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<DatasetQuery, Issue> {
    let mut q = DatasetQuery::default();
    let mut text: Vec<&str> = Vec::new();
    for (key, value) in pairs {
        let value = value.trim();
        if value.is_empty() {
            continue;
        }
        match key {
            "health" => q.health_terms.push(value.to_string()),
            "area" => q.areas.push(value.to_string()),
            "provider" => q.providers.push(value.to_string()),
            "cost" => {
                let cost: CostAccess = value.parse().map_err(|e: crate::model::UnknownToken| {
                    Issue::new("cost", e.to_string())
                })?;
                if q.cost.is_some_and(|c| c != cost) {
                    return Err(Issue::new("cost", "conflicting cost values"));
                }
                q.cost = Some(cost);
            }
            "provider_category" => {
                let cat: ProviderCategory = value
                    .parse()
                    .map_err(|e: crate::model::UnknownToken| Issue::new("provider_category", e.to_string()))?;
                q.provider_categories.push(cat);
            }
            "q" => text.push(value),
            _ => {}
        }
    }
    if !text.is_empty() {
        q.free_text = Some(text.join(" "));
    }
    Ok(q)
}

pub fn publication_query_from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> PublicationQuery {
    let mut q = PublicationQuery::default();
    let mut names: Vec<&str> = Vec::new();
    for (key, value) in pairs {
        let value = value.trim();
        if value.is_empty() {
            continue;
        }
        match key {
            "health" => q.health_terms.push(value.to_string()),
            "dataset" => names.push(value),
            _ => {}
        }
    }
    if !names.is_empty() {
        q.dataset_name = Some(names.join(" "));
    }
    q
}
