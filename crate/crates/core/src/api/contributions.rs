//! Public submissions awaiting curator review.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::model::{slugify, DatasetRecord, PublicationRecord, RecordKind};
use crate::report::Issue;
use crate::store::{CatalogError, Store};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContributionState {
    Pending,
    Approved,
    Rejected,
}

impl fmt::Display for ContributionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContributionState::Pending => "pending",
            ContributionState::Approved => "approved",
            ContributionState::Rejected => "rejected",
        })
    }
}

impl FromStr for ContributionState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pending" => Ok(ContributionState::Pending),
            "approved" => Ok(ContributionState::Approved),
            "rejected" => Ok(ContributionState::Rejected),
            _ => Err(format!("unknown state {s:?}; accepted values: pending, approved, rejected")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub id: String,
    pub kind: RecordKind,
    /// Candidate record in its JSON shape; validated only on approval.
    pub payload: serde_json::Value,
    #[serde(default)]
    pub submitter: Option<String>,
    pub state: ContributionState,
    pub submitted_at: DateTime<Utc>,
    #[serde(default)]
    pub reviewed_at: Option<DateTime<Utc>>,
    #[serde(default)]
    pub reviewer_note: Option<String>,
    /// Id of the catalogue record created on approval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_id: Option<String>,
}

/// Body of `POST /api/contributions`.
#[derive(Debug, Clone, Deserialize)]
pub struct Submission {
    pub kind: RecordKind,
    pub payload: serde_json::Value,
    #[serde(default)]
    pub submitter: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReviewError {
    #[error("unknown contribution {0:?}")]
    NotFound(String),
    #[error("contribution {id:?} is already {state}")]
    NotPending { id: String, state: ContributionState },
    #[error("contribution payload is not a valid record")]
    Invalid(Vec<Issue>),
}

/// Moderation queue in submission order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ContributionQueue {
    items: Vec<Contribution>,
}

impl ContributionQueue {
    pub fn items(&self) -> &[Contribution] {
        &self.items
    }

    pub fn get(&self, id: &str) -> Option<&Contribution> {
        self.items.iter().find(|c| c.id == id)
    }

    pub fn with_state(&self, state: Option<ContributionState>) -> Vec<&Contribution> {
        self.items.iter().filter(|c| state.is_none_or(|s| c.state == s)).collect()
    }

    fn next_id(&self) -> String {
        let highest = self
            .items
            .iter()
            .filter_map(|c| c.id.strip_prefix("contrib-").and_then(|n| n.parse::<u64>().ok()))
            .max()
            .unwrap_or(0);
        format!("contrib-{:06}", highest + 1)
    }

    /// Queues a submission as pending. Only the payload's shape (a JSON
    /// object) is checked here.
    pub fn submit(&mut self, submission: Submission, now: DateTime<Utc>) -> Result<&Contribution, Vec<Issue>> {
        if !submission.payload.is_object() {
            return Err(vec![Issue::new("payload", "payload must be a JSON object")]);
        }
        let contribution = Contribution {
            id: self.next_id(),
            kind: submission.kind,
            payload: submission.payload,
            submitter: submission.submitter.filter(|s| !s.trim().is_empty()),
            state: ContributionState::Pending,
            submitted_at: now,
            reviewed_at: None,
            reviewer_note: None,
            record_id: None,
        };
        self.items.push(contribution);
        Ok(self.items.last().expect("just pushed"))
    }

    fn pending_mut(&mut self, id: &str) -> Result<&mut Contribution, ReviewError> {
        let c = self.items.iter_mut().find(|c| c.id == id).ok_or_else(|| ReviewError::NotFound(id.to_string()))?;
        if c.state != ContributionState::Pending {
            return Err(ReviewError::NotPending { id: id.to_string(), state: c.state });
        }
        Ok(c)
    }

    /// Validates the payload as a full record and adds it to `store`. On any
    /// problem both the store and the contribution are left unchanged.
    pub fn approve(
        &mut self,
        id: &str,
        store: &mut Store,
        note: Option<String>,
        now: DateTime<Utc>,
    ) -> Result<String, ReviewError> {
        let contribution = self.pending_mut(id)?;
        let record_id = match contribution.kind {
            RecordKind::Dataset => {
                let record: DatasetRecord = serde_json::from_value(contribution.payload.clone())
                    .map_err(|e| ReviewError::Invalid(vec![Issue::new("payload", e.to_string())]))?;
                insert_new_dataset(store, record).map_err(ReviewError::Invalid)?
            }
            RecordKind::Publication => {
                let record: PublicationRecord = serde_json::from_value(contribution.payload.clone())
                    .map_err(|e| ReviewError::Invalid(vec![Issue::new("payload", e.to_string())]))?;
                insert_new_publication(store, record).map_err(ReviewError::Invalid)?
            }
        };
        contribution.state = ContributionState::Approved;
        contribution.reviewed_at = Some(now);
        contribution.reviewer_note = note;
        contribution.record_id = Some(record_id.clone());
        Ok(record_id)
    }

    pub fn reject(&mut self, id: &str, note: Option<String>, now: DateTime<Utc>) -> Result<(), ReviewError> {
        let contribution = self.pending_mut(id)?;
        contribution.state = ContributionState::Rejected;
        contribution.reviewed_at = Some(now);
        contribution.reviewer_note = note;
        Ok(())
    }
}

pub(crate) fn catalog_issues(err: CatalogError) -> Vec<Issue> {
    match err {
        CatalogError::Invalid { problems, .. } => {
            problems.into_iter().map(|p| Issue::new(p.field, p.message)).collect()
        }
        other => vec![Issue::new("id", other.to_string())],
    }
}

fn missing_refs(store: &Store, kind: RecordKind, ids: &[String], field: &str) -> Vec<Issue> {
    ids.iter()
        .filter(|id| !store.contains(kind, id))
        .map(|id| Issue::new(field, format!("unknown {kind} {id:?}")))
        .collect()
}

/// Checks that every id `record` refers to exists.
pub(crate) fn dataset_ref_issues(store: &Store, record: &DatasetRecord) -> Vec<Issue> {
    missing_refs(store, RecordKind::Publication, &record.publication_ids, "publication_ids")
}

pub(crate) fn publication_ref_issues(store: &Store, record: &PublicationRecord) -> Vec<Issue> {
    missing_refs(store, RecordKind::Dataset, &record.dataset_ids, "dataset_ids")
}

/// Adds a dataset that must not exist yet; a blank id is derived from the name.
pub(crate) fn insert_new_dataset(store: &mut Store, mut record: DatasetRecord) -> Result<String, Vec<Issue>> {
    if record.id.trim().is_empty() {
        record.id = store.unused_id(RecordKind::Dataset, &slugify(&record.name));
    } else if store.contains(RecordKind::Dataset, &record.id) {
        return Err(vec![Issue::new("id", format!("dataset {:?} already exists", record.id))]);
    }
    let refs = dataset_ref_issues(store, &record);
    if !refs.is_empty() {
        return Err(refs);
    }
    store.upsert_dataset(record).map_err(catalog_issues)
}

pub(crate) fn insert_new_publication(
    store: &mut Store,
    mut record: PublicationRecord,
) -> Result<String, Vec<Issue>> {
    if record.id.trim().is_empty() {
        record.id = store.unused_id(RecordKind::Publication, &slugify(&record.title));
    } else if store.contains(RecordKind::Publication, &record.id) {
        return Err(vec![Issue::new("id", format!("publication {:?} already exists", record.id))]);
    }
    let refs = publication_ref_issues(store, &record);
    if !refs.is_empty() {
        return Err(refs);
    }
    store.upsert_publication(record).map_err(catalog_issues)
}
