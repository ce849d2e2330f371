use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::text::{fuzzy_match, keys_of, normalize_tokens, TokenKey};
use crate::model::{CostAccess, DatasetRecord, ProviderCategory, PublicationRecord};
use crate::store::Store;
use crate::term::fold;

/// Faceted dataset search. Facets intersect; values inside one facet are
/// alternatives. The default query matches every dataset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetQuery {
    pub health_terms: Vec<String>,
    pub cost: Option<CostAccess>,
    pub areas: Vec<String>,
    pub providers: Vec<String>,
    pub provider_categories: Vec<ProviderCategory>,
    pub free_text: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PublicationQuery {
    pub health_terms: Vec<String>,
    pub dataset_name: Option<String>,
}

type Postings = BTreeSet<usize>;
/// (document, field value slot) pairs; free text must be covered by one value.
type SlotPostings = BTreeSet<(usize, usize)>;

/// Inverted index over a store's datasets. Document numbers follow the
/// result order (folded name, name, id), so sorted postings are already
/// ranked.
#[derive(Debug, Default)]
pub struct DatasetIndex {
    ids: Vec<String>,
    health: HashMap<String, Postings>,
    areas: HashMap<String, Postings>,
    providers: HashMap<String, Postings>,
    categories: HashMap<ProviderCategory, Postings>,
    cost: HashMap<CostAccess, Postings>,
    phonetic: HashMap<TokenKey, SlotPostings>,
    literal: HashMap<String, SlotPostings>,
}

fn free_text_values(d: &DatasetRecord) -> impl Iterator<Item = &str> {
    d.health_applications.iter().chain(d.coverage.areas.iter()).map(|t| t.as_str())
}

impl DatasetIndex {
    pub fn build(store: &Store) -> Self {
        let mut ordered: Vec<&DatasetRecord> = store.datasets().collect();
        ordered.sort_by(|a, b| {
            fold(&a.name).cmp(&fold(&b.name)).then_with(|| a.name.cmp(&b.name)).then_with(|| a.id.cmp(&b.id))
        });

        let mut index = DatasetIndex::default();
        for (doc, d) in ordered.iter().enumerate() {
            index.ids.push(d.id.clone());
            for t in &d.health_applications {
                index.health.entry(t.key()).or_default().insert(doc);
            }
            for t in &d.coverage.areas {
                index.areas.entry(t.key()).or_default().insert(doc);
            }
            for p in &d.providers {
                index.providers.entry(fold(&p.name)).or_default().insert(doc);
                index.categories.entry(p.category).or_default().insert(doc);
            }
            index.cost.entry(d.cost.access).or_default().insert(doc);
            for (slot, value) in free_text_values(d).enumerate() {
                for token in normalize_tokens(value) {
                    index.literal.entry(token).or_default().insert((doc, slot));
                }
                for key in keys_of(value) {
                    index.phonetic.entry(key).or_default().insert((doc, slot));
                }
            }
        }
        index
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    fn union_of<K, Q>(map: &HashMap<K, Postings>, keys: impl IntoIterator<Item = Q>) -> Postings
    where
        K: std::hash::Hash + Eq + std::borrow::Borrow<Q>,
        Q: std::hash::Hash + Eq,
    {
        let mut out = Postings::new();
        for k in keys {
            if let Some(p) = map.get(&k) {
                out.extend(p.iter().copied());
            }
        }
        out
    }

    /// Documents where one field value holds every query key.
    fn covered<K: std::hash::Hash + Eq>(map: &HashMap<K, SlotPostings>, keys: &[K]) -> Option<Postings> {
        let (first, rest) = keys.split_first()?;
        let mut slots = map.get(first).cloned().unwrap_or_default();
        for k in rest {
            match map.get(k) {
                Some(p) => slots.retain(|s| p.contains(s)),
                None => slots.clear(),
            }
        }
        Some(slots.into_iter().map(|(doc, _)| doc).collect())
    }

    /// Matching dataset ids, exact-token hits first, then name order.
    pub fn search_ids(&self, q: &DatasetQuery) -> Vec<&str> {
        let mut facets: Vec<Postings> = Vec::new();
        if !q.health_terms.is_empty() {
            facets.push(Self::union_of(&self.health, q.health_terms.iter().map(|t| fold(t))));
        }
        if let Some(cost) = q.cost {
            facets.push(self.cost.get(&cost).cloned().unwrap_or_default());
        }
        if !q.areas.is_empty() {
            facets.push(Self::union_of(&self.areas, q.areas.iter().map(|t| fold(t))));
        }
        if !q.providers.is_empty() {
            facets.push(Self::union_of(&self.providers, q.providers.iter().map(|t| fold(t))));
        }
        if !q.provider_categories.is_empty() {
            facets.push(Self::union_of(&self.categories, q.provider_categories.iter().copied()));
        }

        let mut exact: Option<Postings> = None;
        if let Some(text) = &q.free_text {
            let keys = keys_of(text);
            if let Some(fuzzy) = Self::covered(&self.phonetic, &keys) {
                exact = Self::covered(&self.literal, &normalize_tokens(text));
                facets.push(fuzzy);
            }
        }

        let mut hits: Vec<usize> = match facets.split_first() {
            None => (0..self.ids.len()).collect(),
            Some((first, rest)) => {
                first.iter().copied().filter(|doc| rest.iter().all(|p| p.contains(doc))).collect()
            }
        };
        if let Some(exact) = exact {
            // Stable: within each group the document (name) order is kept.
            hits.sort_by_key(|doc| !exact.contains(doc));
        }
        hits.into_iter().map(|doc| self.ids[doc].as_str()).collect()
    }
}

/// Datasets matching `q`, exact free-text hits before phonetic-only ones,
/// then by name and id.
pub fn search_datasets<'a>(store: &'a Store, q: &DatasetQuery) -> Vec<&'a DatasetRecord> {
    store
        .index()
        .search_ids(q)
        .into_iter()
        .filter_map(|id| store.dataset(id))
        .collect()
}

/// Publications matching `q`, newest first, then by title.
pub fn search_publications<'a>(store: &'a Store, q: &PublicationQuery) -> Vec<&'a PublicationRecord> {
    let mut out: Vec<&PublicationRecord> = store
        .publications()
        .filter(|p| {
            if q.health_terms.is_empty() {
                return true;
            }
            let values: Vec<&str> = p
                .health_applications
                .iter()
                .chain(p.study_topics.iter())
                .map(|t| t.as_str())
                .collect();
            q.health_terms.iter().any(|t| fuzzy_match(t, &values))
        })
        .filter(|p| match &q.dataset_name {
            None => true,
            Some(name) => {
                let names: Vec<&str> =
                    p.dataset_ids.iter().filter_map(|id| store.dataset(id)).map(|d| d.name.as_str()).collect();
                fuzzy_match(name, &names)
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.year
            .cmp(&a.year)
            .then_with(|| fold(&a.title).cmp(&fold(&b.title)))
            .then_with(|| a.title.cmp(&b.title))
            .then_with(|| a.id.cmp(&b.id))
    });
    out
}
