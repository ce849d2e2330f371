use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use serde::Serialize;

use super::contributions::ReviewError;
use super::views::json_body;
use crate::persist::PersistError;
use crate::report::Issue;
use crate::store::CatalogError;

/// An error response: `{"error": ..., "details": [...]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub error: String,
    pub details: Vec<Issue>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    details: &'a [Issue],
}

impl ApiError {
    pub fn new(status: StatusCode, error: impl Into<String>) -> Self {
        ApiError { status, error: error.into(), details: Vec::new() }
    }

    pub fn with_details(mut self, details: Vec<Issue>) -> Self {
        self.details = details;
        self
    }

    pub fn unauthorized() -> Self {
        ApiError::new(StatusCode::UNAUTHORIZED, "missing or invalid admin token")
    }

    pub fn not_found(what: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, what)
    }

    pub fn bad_request(issue: Issue) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, issue.message.clone()).with_details(vec![issue])
    }

    pub fn invalid(details: Vec<Issue>) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "validation failed").with_details(details)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json_body(&ErrorBody { error: &self.error, details: &self.details });
        (self.status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}

impl From<CatalogError> for ApiError {
    fn from(err: CatalogError) -> Self {
        match err {
            CatalogError::NotFound { .. } => ApiError::not_found(err.to_string()),
            CatalogError::Referenced { .. } => ApiError::new(StatusCode::CONFLICT, err.to_string()),
            CatalogError::Invalid { .. } => ApiError::invalid(super::contributions::catalog_issues(err)),
        }
    }
}

impl From<ReviewError> for ApiError {
    fn from(err: ReviewError) -> Self {
        match err {
            ReviewError::NotFound(_) => ApiError::not_found(err.to_string()),
            ReviewError::NotPending { .. } => ApiError::new(StatusCode::CONFLICT, err.to_string()),
            ReviewError::Invalid(details) => ApiError::invalid(details),
        }
    }
}

impl From<PersistError> for ApiError {
    fn from(err: PersistError) -> Self {
        tracing::error!(error = %err, "write to data directory failed");
        ApiError::internal(format!("could not save changes: {err}"))
    }
}
