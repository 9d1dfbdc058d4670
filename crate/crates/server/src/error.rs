use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

use eqproof::focus::FocusError;
use eqproof::matcher::{MatchError, MatchLookupError};
use eqproof::proof::ProofError;
use eqproof::syntax::SyntaxError;
use eqproof::theory::StoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

/// Error body: `{code, message, position?}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<Position>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            position: None,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }

    pub fn unknown_session(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "UnknownSession", format!("no proof session `{id}`"))
    }

    pub fn syntax(context: &str, e: &SyntaxError) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: "SyntaxError",
            message: format!("{context}: {e}"),
            position: Some(Position {
                line: e.line,
                column: e.column,
            }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::UnknownTheory(_) => Self::new(StatusCode::NOT_FOUND, "UnknownTheory", message),
            StoreError::UnknownRow { .. } => Self::new(StatusCode::NOT_FOUND, "UnknownRow", message),
            StoreError::DuplicateName(_) | StoreError::DuplicateTheory(_) => {
                Self::new(StatusCode::CONFLICT, "DuplicateName", message)
            }
            StoreError::NotEditable { .. } => Self::new(StatusCode::METHOD_NOT_ALLOWED, "NotEditable", message),
            StoreError::Syntax { context, source } => Self::syntax(&context, &source),
            StoreError::Type { .. } => Self::new(StatusCode::BAD_REQUEST, "TypeError", message),
            StoreError::InvalidSideCondition { .. }
            | StoreError::RepeatedBinder { .. }
            | StoreError::ProvenLawWithoutProof { .. } => Self::new(StatusCode::BAD_REQUEST, "InvalidRow", message),
            StoreError::Format { line, column, .. } => ApiError {
                status: StatusCode::INTERNAL_SERVER_ERROR,
                code: "FormatError",
                message,
                position: Some(Position { line, column }),
            },
            StoreError::Io { .. } => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "IoError", message),
        }
    }
}

impl From<MatchError> for ApiError {
    fn from(e: MatchError) -> Self {
        let message = e.to_string();
        let code = match e {
            MatchError::NoMatch { .. } => "NoMatch",
            MatchError::NotRewritable(_) => "NotRewritable",
            MatchError::IncompleteBinding(_) => "IncompleteBinding",
            MatchError::UnknownInstance(_) => "UnknownInstance",
            MatchError::BinderNotVariable(_) => "BinderNotVariable",
            MatchError::ClassMismatch { .. } => "ClassMismatch",
            MatchError::SideConditionViolated { .. } => "SideConditionViolated",
            MatchError::TypeMismatch { .. } | MatchError::Type(_) => "TypeError",
            MatchError::Kernel(_) => "IncompleteBinding",
        };
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, message)
    }
}

impl From<FocusError> for ApiError {
    fn from(e: FocusError) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "InvalidPath", e.to_string())
    }
}

impl From<ProofError> for ApiError {
    fn from(e: ProofError) -> Self {
        let message = e.to_string();
        match e {
            ProofError::UnknownConjecture { .. } => Self::new(StatusCode::NOT_FOUND, "UnknownConjecture", message),
            ProofError::StrategyInapplicable { .. } => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "StrategyInapplicable", message)
            }
            ProofError::ProofAlreadyComplete => Self::new(StatusCode::CONFLICT, "ProofAlreadyComplete", message),
            ProofError::NothingToUndo => Self::new(StatusCode::CONFLICT, "NothingToUndo", message),
            ProofError::NotComplete => Self::new(StatusCode::CONFLICT, "NotComplete", message),
            ProofError::OutsideActiveSide => Self::new(StatusCode::BAD_REQUEST, "OutsideActiveSide", message),
            ProofError::NoSides => Self::new(StatusCode::BAD_REQUEST, "NoSides", message),
            ProofError::StaleMatch { .. } => Self::new(StatusCode::CONFLICT, "StaleMatch", message),
            ProofError::Focus(f) => f.into(),
            ProofError::Match(m) => m.into(),
            ProofError::Lookup(MatchLookupError::UnknownLaw(_)) => Self::new(StatusCode::NOT_FOUND, "UnknownLaw", message),
            ProofError::Lookup(MatchLookupError::Store(s)) => s.into(),
            ProofError::Lookup(MatchLookupError::Match(m)) => m.into(),
            ProofError::Store(s) => s.into(),
        }
    }
}
