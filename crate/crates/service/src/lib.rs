//! HTTP API over consultation sessions.
//!
//! Sessions live in memory behind one mutex each, so requests touching
//! different sessions run concurrently while mutations of one session are
//! serialized. With a data directory every event is also appended to the
//! session's JSON Lines log, and existing logs are replayed at startup.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use bayeslex::belief::{BeliefTrace, Polarity, Probability};
use bayeslex::kb::{KnowledgeBase, TestSpec};
use bayeslex::lexicon::Lexicons;
use bayeslex::narrative::{Narrator, Slot, StepRendering};
use bayeslex::session::{Assertion, Consultant, FileStore, Session, SessionError, SessionId};

/// `{error_code, message}` with an HTTP status.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ErrorEnvelope {
    pub error_code: String,
    pub message: String,
}

impl ApiError {
    fn bad_request(code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: code.to_owned(),
            message: message.into(),
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let code = e.code();
        let status = match code {
            "unknown_session" => StatusCode::NOT_FOUND,
            "duplicate_assertion" | "nothing_to_undo" | "no_candidates" | "degenerate_belief" => StatusCode::CONFLICT,
            "store_error" | "malformed_log" | "invalid_kb" => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError {
            status,
            code: code.to_owned(),
            message: e.to_string(),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::bad_request("bad_request", e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::bad_request("bad_request", e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorEnvelope {
            error_code: self.code,
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub struct AppState {
    kb: KnowledgeBase,
    lexicons: Lexicons,
    store: Option<FileStore>,
    sessions: RwLock<HashMap<SessionId, Arc<Mutex<Session>>>>,
}

impl AppState {
    pub fn new(kb: KnowledgeBase, lexicons: Lexicons) -> Self {
        AppState {
            kb,
            lexicons,
            store: None,
            sessions: RwLock::new(HashMap::new()),
        }
    }

    /// Persists sessions under `dir`, replaying any logs already there.
    pub fn with_store(kb: KnowledgeBase, lexicons: Lexicons, dir: impl Into<PathBuf>) -> Result<Self, SessionError> {
        let store = FileStore::open(dir)?;
        let mut state = AppState::new(kb, lexicons);
        let mut loaded = HashMap::new();
        for id in store.list()? {
            let session = store.load(&state.consultant(), &id)?;
            loaded.insert(id, Arc::new(Mutex::new(session)));
        }
        state.sessions = RwLock::new(loaded);
        state.store = Some(store);
        Ok(state)
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn consultant(&self) -> Consultant<'_> {
        Consultant::new(&self.kb, Narrator::new(&self.lexicons))
    }

    fn session(&self, id: &str) -> ApiResult<Arc<Mutex<Session>>> {
        let id = SessionId::parse(id)?;
        self.sessions
            .read()
            .expect("session map lock")
            .get(&id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()).into())
    }

    /// Runs a mutation under the session's lock and logs the new event.
    /// On a store failure the in-memory session is rolled back.
    fn mutate<T>(
        &self,
        id: &str,
        op: impl FnOnce(&Consultant<'_>, &mut Session) -> Result<T, SessionError>,
    ) -> ApiResult<(T, SessionView)> {
        let handle = self.session(id)?;
        let mut session = handle.lock().expect("session lock");
        let before = session.clone();
        let out = op(&self.consultant(), &mut session)?;
        if let (Some(store), Some(event)) = (&self.store, session.events().last()) {
            if let Err(e) = store.append(session.id(), event) {
                *session = before;
                return Err(e.into());
            }
        }
        Ok((out, self.view(&session)))
    }

    fn view(&self, session: &Session) -> SessionView {
        SessionView {
            session_id: session.id().to_string(),
            class_id: session.class_id().to_owned(),
            belief: Slot::probability(session.belief(), &self.lexicons),
            trace: session.trace().clone(),
            asserted: session.assertions().to_vec(),
            prior: session.prior_slot().clone(),
            rendered: session.rendered().to_vec(),
            renderings: session.renderings().to_vec(),
            explanation: session.explanation(),
        }
    }
}

/// Everything the client needs to draw a session.
#[derive(Debug, Serialize)]
pub struct SessionView {
    pub session_id: String,
    pub class_id: String,
    pub belief: Slot,
    pub trace: BeliefTrace,
    pub asserted: Vec<Assertion>,
    pub prior: Slot,
    /// Opening sentence, then one paragraph per live assertion.
    pub rendered: Vec<String>,
    pub renderings: Vec<StepRendering>,
    pub explanation: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    pub class_id: String,
}

#[derive(Debug, Serialize)]
pub struct Created {
    pub session_id: String,
    pub belief: Probability,
    pub explanation: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvidenceRequest {
    pub test_id: String,
    pub polarity: Polarity,
}

#[derive(Debug, Serialize)]
pub struct EvidenceResponse {
    pub belief: Probability,
    pub explanation: String,
    pub rendering: StepRendering,
    pub session: SessionView,
}

#[derive(Debug, Deserialize)]
pub struct WhatIfQuery {
    pub test: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ClassView<'a> {
    pub id: &'a str,
    pub display_name: &'a str,
    pub prior: Slot,
}

#[derive(Debug, Serialize)]
pub struct KbView<'a> {
    pub domain_name: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<&'a str>,
    pub hypothesis_text: &'a str,
    pub prior_basis_text: &'a str,
    pub classes: Vec<ClassView<'a>>,
    pub tests: &'a [TestSpec],
}

async fn get_kb(State(state): State<Arc<AppState>>) -> Response {
    let kb = &state.kb;
    let view = KbView {
        domain_name: &kb.domain_name,
        notes: kb.notes.as_deref(),
        hypothesis_text: &kb.hypothesis_text,
        prior_basis_text: &kb.prior_basis_text,
        classes: kb
            .classes
            .iter()
            .map(|c| ClassView {
                id: &c.id,
                display_name: &c.display_name,
                prior: Slot::probability(c.prior, &state.lexicons),
            })
            .collect(),
        tests: &kb.tests,
    };
    Json(view).into_response()
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Result<Json<CreateRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<Created>)> {
    let Json(req) = body?;
    let session = state.consultant().create_session(&req.class_id)?;
    if let Some(store) = &state.store {
        store.create(&session)?;
    }
    let created = Created {
        session_id: session.id().to_string(),
        belief: session.belief(),
        explanation: session.explanation(),
    };
    tracing::info!(session = %session.id(), class = %req.class_id, "session created");
    state
        .sessions
        .write()
        .expect("session map lock")
        .insert(session.id().clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(created)))
}

async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let handle = state.session(&id)?;
    let session = handle.lock().expect("session lock");
    Ok(Json(state.view(&session)))
}

async fn post_evidence(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<EvidenceRequest>, JsonRejection>,
) -> ApiResult<Json<EvidenceResponse>> {
    let Json(req) = body?;
    let (outcome, session) = state.mutate(&id, |c, s| c.assert_result(s, &req.test_id, req.polarity))?;
    Ok(Json(EvidenceResponse {
        belief: outcome.belief,
        explanation: outcome.explanation,
        rendering: outcome.rendering,
        session,
    }))
}

async fn post_undo(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let ((), view) = state.mutate(&id, |c, s| c.undo(s))?;
    Ok(Json(view))
}

async fn get_what_if(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<WhatIfQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let Query(query) = query?;
    let test = query
        .test
        .ok_or_else(|| ApiError::bad_request("bad_request", "missing query parameter `test`"))?;
    let handle = state.session(&id)?;
    let session = handle.lock().expect("session lock");
    Ok(Json(state.consultant().what_if(&session, &test)?).into_response())
}

async fn get_recommendation(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let handle = state.session(&id)?;
    let session = handle.lock().expect("session lock");
    Ok(Json(state.consultant().recommend(&session)?).into_response())
}

async fn fallback() -> ApiError {
    ApiError {
        status: StatusCode::NOT_FOUND,
        code: "not_found".into(),
        message: "no such route".into(),
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/kb", get(get_kb))
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}", get(get_session))
        .route("/v1/sessions/{id}/evidence", post(post_evidence))
        .route("/v1/sessions/{id}/undo", post(post_undo))
        .route("/v1/sessions/{id}/whatif", get(get_what_if))
        .route("/v1/sessions/{id}/recommendation", get(get_recommendation))
        .fallback(fallback)
        .with_state(state)
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(Arc::new(state))).await
}
