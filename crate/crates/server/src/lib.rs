//! HTTP/JSON service around the `eqproof` engine.
//!
//! One live theory stack is shared by all clients. Each proof session takes
//! a snapshot of the stack when it starts; promotion writes the theorem back
//! into the live stack.

mod error;
pub mod view;

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};

use eqproof::matcher::{default_instantiation, match_named, RankingHeuristic, DEFAULT_MENU_LIMIT};
use eqproof::proof::{promote, ProofState, Strategy};
use eqproof::syntax::{parse_path, parse_term};
use eqproof::term::Binding;
use eqproof::theory::{StoreError, Table, TheoryStack};

pub use error::{ApiError, Position};
use view::*;

type ApiResult<T> = Result<T, ApiError>;

struct Session {
    stack: Arc<TheoryStack>,
    state: ProofState,
}

/// Shared server state.
pub struct AppState {
    stack: RwLock<Arc<TheoryStack>>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
    ranking: RankingHeuristic,
    stack_path: Option<PathBuf>,
    dirty: AtomicBool,
}

impl AppState {
    pub fn new(stack: TheoryStack) -> Self {
        AppState {
            stack: RwLock::new(Arc::new(stack)),
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
            ranking: RankingHeuristic::Standard,
            stack_path: None,
            dirty: AtomicBool::new(false),
        }
    }

    /// Default menu ordering when a request names none.
    pub fn with_ranking(mut self, ranking: RankingHeuristic) -> Self {
        self.ranking = ranking;
        self
    }

    /// File the stack is saved to by [`AppState::save`].
    pub fn with_stack_path(mut self, path: impl Into<PathBuf>) -> Self {
        self.stack_path = Some(path.into());
        self
    }

    pub fn stack(&self) -> Arc<TheoryStack> {
        self.stack.read().expect("stack lock").clone()
    }

    fn replace_stack(&self, next: TheoryStack) {
        *self.stack.write().expect("stack lock") = Arc::new(next);
        self.dirty.store(true, Ordering::SeqCst);
    }

    /// Whether the stack changed since the last save.
    pub fn is_dirty(&self) -> bool {
        self.dirty.load(Ordering::SeqCst)
    }

    /// Write the stack to its file if it changed. Returns whether a write happened.
    pub fn save(&self) -> Result<bool, StoreError> {
        let Some(path) = &self.stack_path else {
            return Ok(false);
        };
        if !self.dirty.swap(false, Ordering::SeqCst) {
            return Ok(false);
        }
        let mut guard = self.stack.write().expect("stack lock");
        let mut next = (**guard).clone();
        if let Err(e) = next.save(path) {
            self.dirty.store(true, Ordering::SeqCst);
            return Err(e);
        }
        *guard = Arc::new(next);
        Ok(true)
    }

    fn session(&self, id: &str) -> ApiResult<Arc<Mutex<Session>>> {
        self.sessions
            .lock()
            .expect("session lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::unknown_session(id))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/theories", get(list_theories))
        .route("/theories/{name}/{table}", get(get_table).post(edit_table))
        .route("/proofs", post(start_proof))
        .route("/proofs/{id}", get(get_proof))
        .route("/proofs/{id}/focus", post(set_focus))
        .route("/proofs/{id}/side", post(switch_side))
        .route("/proofs/{id}/matches", get(get_matches))
        .route("/proofs/{id}/apply", post(apply))
        .route("/proofs/{id}/undo", post(undo))
        .route("/proofs/{id}/promote", post(promote_proof))
        .route("/proofs/{id}/transcript", get(transcript))
        .with_state(state)
}

fn parse_table(s: &str) -> ApiResult<Table> {
    s.parse()
        .map_err(|m: String| ApiError::new(StatusCode::NOT_FOUND, "UnknownTable", m))
}

async fn list_theories(State(app): State<Arc<AppState>>) -> Json<StackSummary> {
    let stack = app.stack();
    Json(StackSummary {
        theories: stack.theories().iter().map(TheorySummary::from).collect(),
    })
}

async fn get_table(
    State(app): State<Arc<AppState>>,
    Path((name, table)): Path<(String, String)>,
) -> ApiResult<Json<TableView>> {
    let table = parse_table(&table)?;
    let stack = app.stack();
    Ok(Json(table_view(stack.theory(&name)?, table)))
}

async fn edit_table(
    State(app): State<Arc<AppState>>,
    Path((name, table)): Path<(String, String)>,
    Json(req): Json<EditRequest>,
) -> ApiResult<Json<TableView>> {
    let table = parse_table(&table)?;
    let mut guard = app.stack.write().expect("stack lock");
    let next = guard.edit_table(&name, table, req.action, &req.row)?;
    let body = table_view(next.theory(&name)?, table);
    *guard = Arc::new(next);
    app.dirty.store(true, Ordering::SeqCst);
    Ok(Json(body))
}

async fn start_proof(
    State(app): State<Arc<AppState>>,
    Json(req): Json<StartRequest>,
) -> ApiResult<impl IntoResponse> {
    let strategy: Strategy = req.strategy.parse().map_err(ApiError::bad_request)?;
    let stack = app.stack();
    let state = ProofState::start(&stack, &req.theory, &req.conjecture, strategy)?;
    let id = format!("p{}", app.next_id.fetch_add(1, Ordering::SeqCst));
    let view = proof_view(&id, &state);
    app.sessions
        .lock()
        .expect("session lock")
        .insert(id, Arc::new(Mutex::new(Session { stack, state })));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_proof(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<ProofView>> {
    let s = app.session(&id)?;
    let s = s.lock().expect("session lock");
    Ok(Json(proof_view(&id, &s.state)))
}

async fn set_focus(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<FocusRequest>,
) -> ApiResult<Json<FocusResponse>> {
    let s = app.session(&id)?;
    let mut s = s.lock().expect("session lock");
    let result = match (req.mv, req.path) {
        (Some(m), None) => s.state.move_focus(m),
        (None, Some(p)) => {
            let path = parse_path(&p).map_err(|e| ApiError::syntax("path", &e))?;
            s.state.set_focus(path)
        }
        _ => return Err(ApiError::bad_request("give exactly one of `move` or `path`")),
    };
    let reason = result.err().map(|e| e.to_string());
    Ok(Json(FocusResponse {
        blocked: reason.is_some(),
        reason,
        view: proof_view(&id, &s.state),
    }))
}

async fn switch_side(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<ProofView>> {
    let s = app.session(&id)?;
    let mut s = s.lock().expect("session lock");
    s.state.switch_side()?;
    Ok(Json(proof_view(&id, &s.state)))
}

async fn get_matches(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<MatchesQuery>,
) -> ApiResult<Json<MatchesView>> {
    let heuristic = match q.heuristic {
        Some(h) => h.parse().map_err(ApiError::bad_request)?,
        None => app.ranking,
    };
    let limit = q.limit.unwrap_or(DEFAULT_MENU_LIMIT).min(DEFAULT_MENU_LIMIT);
    let s = app.session(&id)?;
    let s = s.lock().expect("session lock");
    let menu = s.state.menu(&s.stack, limit, heuristic)?;
    Ok(Json(matches_view(&s.state, &menu)))
}

fn parse_instantiation(raw: &BTreeMap<String, String>) -> ApiResult<Binding> {
    let mut b = Binding::new();
    for (name, text) in raw {
        let name = name.strip_prefix('?').unwrap_or(name);
        let term = parse_term(text).map_err(|e| ApiError::syntax(&format!("instance for `{name}`"), &e))?;
        b.terms.insert(name.to_string(), term);
    }
    Ok(b)
}

async fn apply(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<ApplyRequest>,
) -> ApiResult<Json<ApplyResponse>> {
    let s = app.session(&id)?;
    let mut guard = s.lock().expect("session lock");
    let Session { stack, state } = &mut *guard;
    let path = match &req.path {
        Some(p) => parse_path(p).map_err(|e| ApiError::syntax("path", &e))?,
        None => state.focus_path().clone(),
    };
    match &req.instantiation {
        Some(raw) => {
            let inst = parse_instantiation(raw)?;
            state.apply_named(stack, &req.law_name, req.direction, &path, &inst)?;
            Ok(Json(ApplyResponse {
                needs_instantiation: false,
                unbound: Vec::new(),
                view: proof_view(&id, state),
            }))
        }
        None => {
            if state.is_complete() {
                return Err(eqproof::proof::ProofError::ProofAlreadyComplete.into());
            }
            let mut probe = state.clone();
            probe.set_focus(path.clone())?;
            let focused = probe.focused();
            let m = match_named(&focused, stack, &probe.theory, &req.law_name, req.direction)
                .map_err(eqproof::proof::ProofError::from)?;
            if m.unbound.is_empty() {
                probe.step(&m, &Binding::new())?;
                *state = probe;
                return Ok(Json(ApplyResponse {
                    needs_instantiation: false,
                    unbound: Vec::new(),
                    view: proof_view(&id, state),
                }));
            }
            let defaults = default_instantiation(&m, &focused);
            Ok(Json(ApplyResponse {
                needs_instantiation: true,
                unbound: unbound_views(&m, &defaults),
                view: proof_view(&id, state),
            }))
        }
    }
}

async fn undo(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<ProofView>> {
    let s = app.session(&id)?;
    let mut s = s.lock().expect("session lock");
    s.state.undo()?;
    Ok(Json(proof_view(&id, &s.state)))
}

async fn promote_proof(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<PromoteResponse>> {
    let s = app.session(&id)?;
    let s = s.lock().expect("session lock");
    let live = app.stack();
    let next = promote(&live, &s.state)?;
    let theorems = table_view(next.theory(&s.state.theory)?, Table::Theorems);
    app.replace_stack(next);
    Ok(Json(PromoteResponse {
        theory: s.state.theory.clone(),
        theorem: s.state.name.clone(),
        theorems,
        view: proof_view(&id, &s.state),
    }))
}

async fn transcript(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let s = app.session(&id)?;
    let s = s.lock().expect("session lock");
    Ok((
        [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
        s.state.transcript(),
    ))
}

