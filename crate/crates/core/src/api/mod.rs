//! JSON-over-HTTP service.
//!
//! Reads are served from an immutable snapshot of the catalogue. Mutations run
//! one at a time on a copy, write the data directory, and only then publish
//! the copy, so a 2xx response means the change is both durable and visible.

mod contributions;
mod error;
mod views;

use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, RawQuery, Request, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;
use chrono::Utc;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use tokio::net::TcpListener;
use tower_http::cors::CorsLayer;

pub use contributions::{Contribution, ContributionQueue, ContributionState, ReviewError, Submission};
pub use error::ApiError;
pub use views::{
    dataset_list, dataset_query_from_pairs, dataset_view, hotspot_body, json_body, publication_list,
    publication_query_from_pairs, publication_view, stats_body, DatasetSummary, DatasetView, PublicationSummary,
    PublicationView,
};

use crate::geo::Gazetteer;
use crate::ingest::{export_csv, DATASETS_FILE, PUBLICATIONS_FILE};
use crate::model::{DatasetRecord, PublicationRecord, RecordKind};
use crate::persist::{DataDir, PersistError};
use crate::report::Issue;
use crate::stats::{StudyAreaBuckets, TableName};
use crate::store::{SnapshotCell, Store};

pub const CONTRIBUTIONS_FILE: &str = "contributions.json";
pub const GAZETTEER_FILE: &str = "gazetteer.csv";
pub const BUCKETS_FILE: &str = "study_area_buckets.csv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    /// Admin routes answer 401 to everyone when unset.
    pub admin_token: Option<String>,
    pub bind_addr: IpAddr,
    pub port: u16,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            data_dir: PathBuf::from("./data"),
            admin_token: None,
            bind_addr: IpAddr::from([127, 0, 0, 1]),
            port: 8080,
        }
    }
}

impl ServiceConfig {
    /// Reads `GEOX_DATA_DIR`, `GEOX_ADMIN_TOKEN`, `GEOX_BIND_ADDR` and
    /// `GEOX_PORT`, falling back to the defaults.
    pub fn from_env() -> Result<Self, ServiceError> {
        Self::from_lookup(|key| std::env::var(key).ok())
    }

    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self, ServiceError> {
        let mut config = ServiceConfig::default();
        if let Some(dir) = lookup("GEOX_DATA_DIR").filter(|s| !s.is_empty()) {
            config.data_dir = PathBuf::from(dir);
        }
        config.admin_token = lookup("GEOX_ADMIN_TOKEN").filter(|s| !s.is_empty());
        if let Some(addr) = lookup("GEOX_BIND_ADDR").filter(|s| !s.is_empty()) {
            config.bind_addr =
                addr.parse().map_err(|_| ServiceError::Config(format!("GEOX_BIND_ADDR {addr:?} is not an IP address")))?;
        }
        if let Some(port) = lookup("GEOX_PORT").filter(|s| !s.is_empty()) {
            config.port = port.parse().map_err(|_| ServiceError::Config(format!("GEOX_PORT {port:?} is not a port")))?;
        }
        Ok(config)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Persist(#[from] PersistError),
    #[error("{path}: {message}")]
    Reference { path: String, message: String },
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Everything a request can observe, swapped as one value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CatalogState {
    pub store: Store,
    pub contributions: ContributionQueue,
}

pub struct Service {
    state: SnapshotCell<CatalogState>,
    data: DataDir,
    admin_token: Option<String>,
    gazetteer: Gazetteer,
    buckets: StudyAreaBuckets,
}

fn reference_error(path: PathBuf, issues: &[Issue]) -> ServiceError {
    let message = issues.iter().map(Issue::to_string).collect::<Vec<_>>().join("; ");
    ServiceError::Reference { path: path.display().to_string(), message }
}

impl Service {
    /// Loads the catalogue, moderation queue and optional reference tables
    /// from the data directory.
    pub fn open(data_dir: impl Into<PathBuf>, admin_token: Option<String>) -> Result<Self, ServiceError> {
        let data = DataDir::new(data_dir);
        let (store, _) = data.load_store()?;
        let contributions = match data.read(CONTRIBUTIONS_FILE)? {
            Some(bytes) => serde_json::from_slice(&bytes).map_err(|e| ServiceError::Reference {
                path: data.path(CONTRIBUTIONS_FILE).display().to_string(),
                message: e.to_string(),
            })?,
            None => ContributionQueue::default(),
        };
        let gazetteer = match data.read(GAZETTEER_FILE)? {
            Some(bytes) => Gazetteer::from_csv(bytes.as_slice())
                .map_err(|issues| reference_error(data.path(GAZETTEER_FILE), &issues))?,
            None => Gazetteer::builtin(),
        };
        let buckets = match data.read(BUCKETS_FILE)? {
            Some(bytes) => StudyAreaBuckets::from_csv(bytes.as_slice())
                .map_err(|issue| reference_error(data.path(BUCKETS_FILE), &[issue]))?,
            None => StudyAreaBuckets::builtin(),
        };
        Ok(Service {
            state: SnapshotCell::new(CatalogState { store, contributions }),
            data,
            admin_token,
            gazetteer,
            buckets,
        })
    }

    pub fn from_config(config: &ServiceConfig) -> Result<Self, ServiceError> {
        Self::open(&config.data_dir, config.admin_token.clone())
    }

    pub fn snapshot(&self) -> Arc<CatalogState> {
        self.state.load()
    }

    pub fn gazetteer(&self) -> &Gazetteer {
        &self.gazetteer
    }

    pub fn buckets(&self) -> &StudyAreaBuckets {
        &self.buckets
    }

    fn persist(&self, state: &CatalogState) -> Result<(), PersistError> {
        let csv = export_csv(&state.store);
        let queue = json_body(&state.contributions);
        self.data.commit(&[
            (DATASETS_FILE, &csv.datasets_csv),
            (PUBLICATIONS_FILE, &csv.publications_csv),
            (CONTRIBUTIONS_FILE, queue.as_bytes()),
        ])
    }

    /// Applies `f` to a copy of the state, saves it, then publishes it.
    pub fn mutate<R>(&self, f: impl FnOnce(&mut CatalogState) -> Result<R, ApiError>) -> Result<R, ApiError> {
        self.state.update(|next| {
            let out = f(next)?;
            self.persist(next)?;
            Ok(out)
        })
    }

    fn authorized(&self, headers: &HeaderMap) -> bool {
        let Some(expected) = self.admin_token.as_deref() else {
            return false;
        };
        let presented = headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .map(str::trim);
        presented.is_some_and(|p| constant_time_eq(p.as_bytes(), expected.as_bytes()))
    }

    pub fn router(self: Arc<Self>) -> Router {
        let admin = Router::new()
            .route("/datasets", post(create_dataset))
            .route("/datasets/{id}", put(replace_dataset).delete(delete_dataset))
            .route("/publications", post(create_publication))
            .route("/publications/{id}", put(replace_publication).delete(delete_publication))
            .route("/contributions", get(list_contributions))
            .route("/contributions/{id}/approve", post(approve_contribution))
            .route("/contributions/{id}/reject", post(reject_contribution))
            .fallback(admin_fallback)
            .route_layer(middleware::from_fn_with_state(self.clone(), require_admin));

        Router::new()
            .route("/api/datasets", get(list_datasets))
            .route("/api/datasets/{id}", get(get_dataset))
            .route("/api/publications", get(list_publications))
            .route("/api/publications/{id}", get(get_publication))
            .route("/api/stats", get(list_tables))
            .route("/api/stats/{table}", get(get_stats))
            .route("/api/hotspots", get(get_hotspots))
            .route("/api/contributions", post(submit_contribution))
            .nest("/api/admin", admin)
            .fallback(not_found)
            .layer(CorsLayer::permissive())
            .with_state(self)
    }
}

fn constant_time_eq(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}

type Shared = State<Arc<Service>>;

fn json(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn query_pairs(raw: &Option<String>) -> Vec<(String, String)> {
    form_urlencoded::parse(raw.as_deref().unwrap_or("").as_bytes()).into_owned().collect()
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| {
        let field = e.to_string().split('`').nth(1).unwrap_or("body").to_string();
        ApiError::invalid(vec![Issue::new(field, e.to_string())])
    })
}

/// Runs a mutation off the async executor, since it does file I/O.
async fn mutate_blocking<R: Send + 'static>(
    svc: Arc<Service>,
    f: impl FnOnce(&mut CatalogState) -> Result<R, ApiError> + Send + 'static,
) -> Result<R, ApiError> {
    tokio::task::spawn_blocking(move || svc.mutate(f))
        .await
        .map_err(|e| ApiError::internal(format!("mutation task failed: {e}")))?
}

async fn require_admin(State(svc): Shared, request: Request, next: Next) -> Response {
    if svc.authorized(request.headers()) {
        next.run(request).await
    } else {
        ApiError::unauthorized().into_response()
    }
}

async fn not_found() -> ApiError {
    ApiError::not_found("no such route")
}

async fn admin_fallback() -> ApiError {
    ApiError::not_found("no such admin route")
}

async fn list_datasets(State(svc): Shared, RawQuery(raw): RawQuery) -> Result<Response, ApiError> {
    let pairs = query_pairs(&raw);
    let query = dataset_query_from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
        .map_err(ApiError::bad_request)?;
    Ok(json(StatusCode::OK, dataset_list(&svc.snapshot().store, &query)))
}

async fn list_publications(State(svc): Shared, RawQuery(raw): RawQuery) -> Response {
    let pairs = query_pairs(&raw);
    let query = publication_query_from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())));
    json(StatusCode::OK, publication_list(&svc.snapshot().store, &query))
}

async fn get_dataset(State(svc): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snap = svc.snapshot();
    let record = snap.store.dataset(&id).ok_or_else(|| ApiError::not_found(format!("unknown dataset {id:?}")))?;
    Ok(json(StatusCode::OK, json_body(&dataset_view(&snap.store, record))))
}

async fn get_publication(State(svc): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snap = svc.snapshot();
    let record =
        snap.store.publication(&id).ok_or_else(|| ApiError::not_found(format!("unknown publication {id:?}")))?;
    Ok(json(StatusCode::OK, json_body(&publication_view(&snap.store, record))))
}

async fn list_tables() -> Response {
    json(StatusCode::OK, json_body(&TableName::names()))
}

async fn get_stats(State(svc): Shared, Path(table): Path<String>) -> Result<Response, ApiError> {
    let table: TableName = table.parse().map_err(|e: crate::stats::UnknownTable| ApiError::not_found(e.to_string()))?;
    Ok(json(StatusCode::OK, stats_body(table, &svc.snapshot().store, &svc.buckets)))
}

async fn get_hotspots(State(svc): Shared) -> Response {
    json(StatusCode::OK, hotspot_body(&svc.snapshot().store, &svc.gazetteer))
}

#[derive(serde::Serialize)]
struct Created<'a> {
    id: &'a str,
}

async fn create_dataset(State(svc): Shared, body: Bytes) -> Result<Response, ApiError> {
    let record: DatasetRecord = parse_body(&body)?;
    let id = mutate_blocking(svc, move |state| {
        contributions::insert_new_dataset(&mut state.store, record).map_err(ApiError::invalid)
    })
    .await?;
    Ok(json(StatusCode::CREATED, json_body(&Created { id: &id })))
}

async fn create_publication(State(svc): Shared, body: Bytes) -> Result<Response, ApiError> {
    let record: PublicationRecord = parse_body(&body)?;
    let id = mutate_blocking(svc, move |state| {
        contributions::insert_new_publication(&mut state.store, record).map_err(ApiError::invalid)
    })
    .await?;
    Ok(json(StatusCode::CREATED, json_body(&Created { id: &id })))
}

fn path_id_matches(body_id: &mut String, path_id: &str) -> Result<(), ApiError> {
    if body_id.trim().is_empty() {
        *body_id = path_id.to_string();
    }
    if body_id != path_id {
        return Err(ApiError::invalid(vec![Issue::new(
            "id",
            format!("body id {body_id:?} does not match the URL id {path_id:?}"),
        )]));
    }
    Ok(())
}

async fn replace_dataset(State(svc): Shared, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let mut record: DatasetRecord = parse_body(&body)?;
    path_id_matches(&mut record.id, &id)?;
    let reader = svc.clone();
    mutate_blocking(svc, move |state| {
        if state.store.dataset(&id).is_none() {
            return Err(ApiError::not_found(format!("unknown dataset {id:?}")));
        }
        let refs = contributions::dataset_ref_issues(&state.store, &record);
        if !refs.is_empty() {
            return Err(ApiError::invalid(refs));
        }
        Ok(state.store.upsert_dataset(record)?)
    })
    .await
    .map(|id| {
        let snap = reader.snapshot();
        let record = snap.store.dataset(&id).expect("just written");
        json(StatusCode::OK, json_body(&dataset_view(&snap.store, record)))
    })
}

async fn replace_publication(State(svc): Shared, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let mut record: PublicationRecord = parse_body(&body)?;
    path_id_matches(&mut record.id, &id)?;
    let reader = svc.clone();
    mutate_blocking(svc, move |state| {
        if state.store.publication(&id).is_none() {
            return Err(ApiError::not_found(format!("unknown publication {id:?}")));
        }
        let refs = contributions::publication_ref_issues(&state.store, &record);
        if !refs.is_empty() {
            return Err(ApiError::invalid(refs));
        }
        Ok(state.store.upsert_publication(record)?)
    })
    .await
    .map(|id| {
        let snap = reader.snapshot();
        let record = snap.store.publication(&id).expect("just written");
        json(StatusCode::OK, json_body(&publication_view(&snap.store, record)))
    })
}

#[derive(Debug, Default, Deserialize)]
struct DeleteParams {
    #[serde(default)]
    force: bool,
}

fn delete_params(raw: &Option<String>) -> Result<DeleteParams, ApiError> {
    let mut params = DeleteParams::default();
    for (key, value) in query_pairs(raw) {
        if key == "force" {
            params.force = value.parse().map_err(|_| {
                ApiError::bad_request(Issue::new("force", format!("{value:?} is not true or false")))
            })?;
        }
    }
    Ok(params)
}

async fn delete_record(svc: Arc<Service>, kind: RecordKind, id: String, raw: Option<String>) -> Result<Response, ApiError> {
    let params = delete_params(&raw)?;
    mutate_blocking(svc, move |state| Ok(state.store.delete(kind, &id, params.force)?)).await?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn delete_dataset(State(svc): Shared, Path(id): Path<String>, RawQuery(raw): RawQuery) -> Result<Response, ApiError> {
    delete_record(svc, RecordKind::Dataset, id, raw).await
}

async fn delete_publication(
    State(svc): Shared,
    Path(id): Path<String>,
    RawQuery(raw): RawQuery,
) -> Result<Response, ApiError> {
    delete_record(svc, RecordKind::Publication, id, raw).await
}

async fn submit_contribution(State(svc): Shared, body: Bytes) -> Result<Response, ApiError> {
    let submission: Submission = parse_body(&body)?;
    let contribution = mutate_blocking(svc, move |state| {
        state.contributions.submit(submission, Utc::now()).cloned().map_err(ApiError::invalid)
    })
    .await?;
    Ok(json(StatusCode::CREATED, json_body(&contribution)))
}

async fn list_contributions(State(svc): Shared, RawQuery(raw): RawQuery) -> Result<Response, ApiError> {
    let mut state = None;
    for (key, value) in query_pairs(&raw) {
        if key == "state" && !value.is_empty() {
            state = Some(value.parse::<ContributionState>().map_err(|e| ApiError::bad_request(Issue::new("state", e)))?);
        }
    }
    let snap = svc.snapshot();
    Ok(json(StatusCode::OK, json_body(&snap.contributions.with_state(state))))
}

#[derive(Debug, Default, Deserialize)]
struct ReviewBody {
    #[serde(default)]
    note: Option<String>,
}

fn review_body(body: &Bytes) -> Result<ReviewBody, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(ReviewBody::default());
    }
    parse_body(body)
}

async fn review(svc: Arc<Service>, id: String, body: Bytes, approve: bool) -> Result<Response, ApiError> {
    let note = review_body(&body)?.note.filter(|n| !n.trim().is_empty());
    let reader = svc.clone();
    let cid = id.clone();
    mutate_blocking(svc, move |state| {
        let now = Utc::now();
        if approve {
            state.contributions.approve(&cid, &mut state.store, note, now).map(|_| ())?;
        } else {
            state.contributions.reject(&cid, note, now)?;
        }
        Ok(())
    })
    .await?;
    let snap = reader.snapshot();
    let contribution = snap.contributions.get(&id).expect("reviewed contribution exists");
    Ok(json(StatusCode::OK, json_body(contribution)))
}

async fn approve_contribution(State(svc): Shared, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    review(svc, id, body, true).await
}

async fn reject_contribution(State(svc): Shared, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    review(svc, id, body, false).await
}

/// A running service bound to a local port.
pub struct RunningService {
    pub addr: SocketAddr,
    pub service: Arc<Service>,
    shutdown: Option<tokio::sync::oneshot::Sender<()>>,
    task: tokio::task::JoinHandle<std::io::Result<()>>,
}

impl RunningService {
    pub fn url(&self, path: &str) -> String {
        format!("http://{}{}", self.addr, path)
    }

    /// Stops accepting connections and waits for in-flight requests.
    pub async fn shutdown(mut self) -> std::io::Result<()> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        self.task.await.map_err(std::io::Error::other)?
    }
}

/// Opens the data directory and starts serving in the background. Port 0
/// picks a free port; see [`RunningService::addr`].
pub async fn spawn(config: &ServiceConfig) -> Result<RunningService, ServiceError> {
    let cfg = config.clone();
    let service = Arc::new(tokio::task::spawn_blocking(move || Service::from_config(&cfg)).await.map_err(std::io::Error::other)??);
    let addr = SocketAddr::new(config.bind_addr, config.port);
    let listener = TcpListener::bind(addr).await.map_err(|source| ServiceError::Bind { addr, source })?;
    let addr = listener.local_addr()?;
    let (tx, rx) = tokio::sync::oneshot::channel::<()>();
    let app = service.clone().router();
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = rx.await;
            })
            .await
    });
    Ok(RunningService { addr, service, shutdown: Some(tx), task })
}

/// Serves until Ctrl-C.
pub async fn serve(config: &ServiceConfig) -> Result<(), ServiceError> {
    let running = spawn(config).await?;
    if config.admin_token.is_none() {
        tracing::warn!("GEOX_ADMIN_TOKEN is not set; admin routes are disabled");
    }
    tracing::info!(addr = %running.addr, data_dir = %config.data_dir.display(), "listening");
    tokio::signal::ctrl_c().await?;
    running.shutdown().await?;
    Ok(())
}
