//! In-memory catalogue with referential integrity between datasets and
//! publications, and the snapshot cell that serializes writers.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use crate::model::{DatasetRecord, FieldProblem, PublicationRecord, RecordKind};
use crate::report::{Issue, ValidationReport};
use crate::search::DatasetIndex;

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("invalid {kind}: {}", describe(.problems))]
    Invalid { kind: RecordKind, problems: Vec<FieldProblem> },
    #[error("unknown {kind} id {id:?}")]
    NotFound { kind: RecordKind, id: String },
    #[error("{kind} {id:?} is referenced by {}", .by.join(", "))]
    Referenced { kind: RecordKind, id: String, by: Vec<String> },
}

fn describe(problems: &[FieldProblem]) -> String {
    problems.iter().map(|p| format!("{}: {}", p.field, p.message)).collect::<Vec<_>>().join("; ")
}

/// Both record tables. List fields are kept in canonical order, so two stores
/// holding the same catalogue compare equal.
#[derive(Debug, Default)]
pub struct Store {
    datasets: BTreeMap<String, DatasetRecord>,
    publications: BTreeMap<String, PublicationRecord>,
    index: OnceLock<DatasetIndex>,
}

impl Clone for Store {
    fn clone(&self) -> Self {
        Store {
            datasets: self.datasets.clone(),
            publications: self.publications.clone(),
            index: OnceLock::new(),
        }
    }
}

impl PartialEq for Store {
    fn eq(&self, other: &Self) -> bool {
        self.datasets == other.datasets && self.publications == other.publications
    }
}

fn insert_sorted(ids: &mut Vec<String>, id: &str) -> bool {
    match ids.binary_search_by(|x| x.as_str().cmp(id)) {
        Ok(_) => false,
        Err(pos) => {
            ids.insert(pos, id.to_string());
            true
        }
    }
}

fn remove_id(ids: &mut Vec<String>, id: &str) -> bool {
    let before = ids.len();
    ids.retain(|x| x != id);
    ids.len() != before
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    pub fn dataset(&self, id: &str) -> Option<&DatasetRecord> {
        self.datasets.get(id)
    }

    pub fn publication(&self, id: &str) -> Option<&PublicationRecord> {
        self.publications.get(id)
    }

    /// Datasets in id order.
    pub fn datasets(&self) -> impl ExactSizeIterator<Item = &DatasetRecord> + Clone {
        self.datasets.values()
    }

    /// Publications in id order.
    pub fn publications(&self) -> impl ExactSizeIterator<Item = &PublicationRecord> + Clone {
        self.publications.values()
    }

    pub fn dataset_count(&self) -> usize {
        self.datasets.len()
    }

    pub fn publication_count(&self) -> usize {
        self.publications.len()
    }

    pub fn contains(&self, kind: RecordKind, id: &str) -> bool {
        match kind {
            RecordKind::Dataset => self.datasets.contains_key(id),
            RecordKind::Publication => self.publications.contains_key(id),
        }
    }

    /// Inverted index over the current contents, built on first use.
    pub fn index(&self) -> &DatasetIndex {
        self.index.get_or_init(|| DatasetIndex::build(self))
    }

    fn touch(&mut self) {
        self.index = OnceLock::new();
    }

    /// Smallest `base`, `base-2`, `base-3`, ... not yet used for `kind`.
    pub fn unused_id(&self, kind: RecordKind, base: &str) -> String {
        if !self.contains(kind, base) {
            return base.to_string();
        }
        (2..)
            .map(|n| format!("{base}-{n}"))
            .find(|candidate| !self.contains(kind, candidate))
            .expect("unbounded suffix search")
    }

    /// Stores `record`, replacing any prior version. The record's publication
    /// list is authoritative: every stored publication it names gains a
    /// back-link, and every other publication loses one.
    pub fn upsert_dataset(&mut self, mut record: DatasetRecord) -> Result<String, CatalogError> {
        record.canonicalize();
        let problems = record.problems();
        if !problems.is_empty() {
            return Err(CatalogError::Invalid { kind: RecordKind::Dataset, problems });
        }
        let id = record.id.clone();
        for publication in self.publications.values_mut() {
            if record.publication_ids.binary_search(&publication.id).is_ok() {
                insert_sorted(&mut publication.dataset_ids, &id);
            } else {
                remove_id(&mut publication.dataset_ids, &id);
            }
        }
        self.datasets.insert(id.clone(), record);
        self.touch();
        Ok(id)
    }

    pub fn upsert_publication(&mut self, mut record: PublicationRecord) -> Result<String, CatalogError> {
        record.canonicalize();
        let problems = record.problems();
        if !problems.is_empty() {
            return Err(CatalogError::Invalid { kind: RecordKind::Publication, problems });
        }
        let id = record.id.clone();
        for dataset in self.datasets.values_mut() {
            if record.dataset_ids.binary_search(&dataset.id).is_ok() {
                insert_sorted(&mut dataset.publication_ids, &id);
            } else {
                remove_id(&mut dataset.publication_ids, &id);
            }
        }
        self.publications.insert(id.clone(), record);
        self.touch();
        Ok(id)
    }

    /// Ids of records of the other kind that list `id`.
    pub fn referrers(&self, kind: RecordKind, id: &str) -> Vec<String> {
        match kind {
            RecordKind::Dataset => self
                .publications
                .values()
                .filter(|p| p.dataset_ids.iter().any(|d| d == id))
                .map(|p| p.id.clone())
                .collect(),
            RecordKind::Publication => self
                .datasets
                .values()
                .filter(|d| d.publication_ids.iter().any(|p| p == id))
                .map(|d| d.id.clone())
                .collect(),
        }
    }

    /// Removes a record. Without `force`, a record still referenced by others
    /// is left in place; with it, inbound references are unlinked first.
    pub fn delete(&mut self, kind: RecordKind, id: &str, force: bool) -> Result<(), CatalogError> {
        if !self.contains(kind, id) {
            return Err(CatalogError::NotFound { kind, id: id.to_string() });
        }
        let by = self.referrers(kind, id);
        if !by.is_empty() && !force {
            return Err(CatalogError::Referenced { kind, id: id.to_string(), by });
        }
        match kind {
            RecordKind::Dataset => {
                self.datasets.remove(id);
                for p in self.publications.values_mut() {
                    remove_id(&mut p.dataset_ids, id);
                }
            }
            RecordKind::Publication => {
                self.publications.remove(id);
                for d in self.datasets.values_mut() {
                    remove_id(&mut d.publication_ids, id);
                }
            }
        }
        self.touch();
        Ok(())
    }

    /// One error per dangling reference and per one-sided link. Publications
    /// without any dataset only produce a warning.
    pub fn validate_cross_references(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for d in self.datasets.values() {
            for pid in &d.publication_ids {
                match self.publications.get(pid) {
                    None => report.error(
                        Issue::new("related_publication_ids", format!("unknown publication {pid:?}"))
                            .for_record(&d.id),
                    ),
                    Some(p) if !p.dataset_ids.contains(&d.id) => report.error(
                        Issue::new(
                            "related_publication_ids",
                            format!("publication {pid:?} does not list this dataset back"),
                        )
                        .for_record(&d.id),
                    ),
                    Some(_) => {}
                }
            }
        }
        for p in self.publications.values() {
            if p.dataset_ids.is_empty() {
                report.warn(Issue::new("dataset_ids", "publication references no dataset").for_record(&p.id));
            }
            for did in &p.dataset_ids {
                match self.datasets.get(did) {
                    None => report.error(
                        Issue::new("dataset_ids", format!("unknown dataset {did:?}")).for_record(&p.id),
                    ),
                    Some(d) if !d.publication_ids.contains(&p.id) => report.error(
                        Issue::new("dataset_ids", format!("dataset {did:?} does not list this publication back"))
                            .for_record(&p.id),
                    ),
                    Some(_) => {}
                }
            }
        }
        report
    }

    /// Inserts without touching other records. Ingest uses this and then
    /// repairs the link graph in bulk.
    pub(crate) fn insert_dataset_raw(&mut self, mut record: DatasetRecord) {
        record.canonicalize();
        self.datasets.insert(record.id.clone(), record);
        self.touch();
    }

    pub(crate) fn insert_publication_raw(&mut self, mut record: PublicationRecord) {
        record.canonicalize();
        self.publications.insert(record.id.clone(), record);
        self.touch();
    }

    /// Drops references to ids that do not exist, one error per dropped link.
    pub(crate) fn drop_dangling(&mut self) -> Vec<Issue> {
        let mut issues = Vec::new();
        let pub_ids: Vec<String> = self.publications.keys().cloned().collect();
        let ds_ids: Vec<String> = self.datasets.keys().cloned().collect();
        for d in self.datasets.values_mut() {
            d.publication_ids.retain(|pid| {
                let ok = pub_ids.binary_search(pid).is_ok();
                if !ok {
                    issues.push(
                        Issue::new("related_publication_ids", format!("unknown publication {pid:?}; link dropped"))
                            .for_record(&d.id),
                    );
                }
                ok
            });
        }
        for p in self.publications.values_mut() {
            p.dataset_ids.retain(|did| {
                let ok = ds_ids.binary_search(did).is_ok();
                if !ok {
                    issues.push(
                        Issue::new("dataset_ids", format!("unknown dataset {did:?}; link dropped")).for_record(&p.id),
                    );
                }
                ok
            });
        }
        self.touch();
        issues
    }

    /// Completes one-sided links by adding the missing back-reference, one
    /// warning per repair. Assumes no dangling ids remain.
    pub(crate) fn symmetrize_links(&mut self) -> Vec<Issue> {
        let mut issues = Vec::new();
        let mut add_to_pub = Vec::new();
        for d in self.datasets.values() {
            for pid in &d.publication_ids {
                if let Some(p) = self.publications.get(pid) {
                    if !p.dataset_ids.contains(&d.id) {
                        add_to_pub.push((pid.clone(), d.id.clone()));
                    }
                }
            }
        }
        let mut add_to_ds = Vec::new();
        for p in self.publications.values() {
            for did in &p.dataset_ids {
                if let Some(d) = self.datasets.get(did) {
                    if !d.publication_ids.contains(&p.id) {
                        add_to_ds.push((did.clone(), p.id.clone()));
                    }
                }
            }
        }
        for (pid, did) in add_to_pub {
            if let Some(p) = self.publications.get_mut(&pid) {
                insert_sorted(&mut p.dataset_ids, &did);
            }
            issues.push(
                Issue::new("dataset_ids", format!("added missing back-link to dataset {did:?}")).for_record(pid),
            );
        }
        for (did, pid) in add_to_ds {
            if let Some(d) = self.datasets.get_mut(&did) {
                insert_sorted(&mut d.publication_ids, &pid);
            }
            issues.push(
                Issue::new("related_publication_ids", format!("added missing back-link to publication {pid:?}"))
                    .for_record(did),
            );
        }
        self.touch();
        issues
    }
}

/// Many readers share an immutable snapshot; writers queue on one mutex, work
/// on a private copy, and publish it with a single pointer swap.
#[derive(Debug, Default)]
pub struct SnapshotCell<T> {
    current: RwLock<Arc<T>>,
    writer: Mutex<()>,
}

impl<T: Clone> SnapshotCell<T> {
    pub fn new(value: T) -> Self {
        SnapshotCell { current: RwLock::new(Arc::new(value)), writer: Mutex::new(()) }
    }

    pub fn load(&self) -> Arc<T> {
        self.current.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Applies `f` to a copy of the current value. The copy is published only
    /// if `f` succeeds; readers never see a partially applied change.
    pub fn update<R, E>(&self, f: impl FnOnce(&mut T) -> Result<R, E>) -> Result<R, E> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut next = (*self.load()).clone();
        let out = f(&mut next)?;
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(next);
        Ok(out)
    }
}
