//! HTTP API. One session at a time: each upload replaces the previous
//! dataset and starts a fresh engine run in the background.

use std::collections::{BTreeSet, HashMap};
use std::convert::Infallible;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use std::thread;

use axum::body::{Body, Bytes};
use axum::extract::{DefaultBodyLimit, FromRequest, Multipart, Path, Query, Request, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use insight_core::feed::{FeedError, FeedEvent};
use insight_core::insight::ModuleKind;
use insight_core::tabular::{parse_table, KindCounts};
use insight_core::{
    engine, ChartSpec, Dataset, EngineConfig, FeedQuery, FeedStore, Field, Insight, ModuleRegistry, RunSummary,
    SortOrder, TableFormat, TaskOutput,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Largest accepted upload.
pub const MAX_UPLOAD_BYTES: usize = 50 * 1024 * 1024;

pub struct Session {
    pub id: String,
    pub dataset: Arc<Dataset>,
    pub feed: Arc<FeedStore>,
    pub charts: Arc<RwLock<HashMap<String, ChartSpec>>>,
    pub task_count: usize,
}

pub struct AppState {
    config: EngineConfig,
    registry: ModuleRegistry,
    session: RwLock<Option<Arc<Session>>>,
    uploads: AtomicU64,
    pins: AtomicU64,
}

impl AppState {
    pub fn new(config: EngineConfig, registry: ModuleRegistry) -> Arc<Self> {
        Arc::new(AppState {
            config,
            registry,
            session: RwLock::new(None),
            uploads: AtomicU64::new(0),
            pins: AtomicU64::new(0),
        })
    }

    pub fn session(&self) -> Option<Arc<Session>> {
        self.session.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Installs `dataset` as the active session and starts its run on a
    /// background thread.
    pub fn start_session(&self, dataset: Dataset) -> Arc<Session> {
        let n = self.uploads.fetch_add(1, Ordering::SeqCst) + 1;
        let dataset = Arc::new(dataset);
        let tasks = engine::plan(&dataset, &self.registry);
        let session = Arc::new(Session {
            id: format!("s{n}-{}", &dataset.id()[..dataset.id().len().min(8)]),
            dataset: Arc::clone(&dataset),
            feed: Arc::new(FeedStore::new()),
            charts: Arc::new(RwLock::new(HashMap::new())),
            task_count: tasks.len(),
        });
        *self.session.write().unwrap_or_else(|e| e.into_inner()) = Some(Arc::clone(&session));

        let feed = Arc::clone(&session.feed);
        let charts = Arc::clone(&session.charts);
        let config = self.config;
        let registry = self.registry.clone();
        thread::spawn(move || {
            // the chart goes in first so an item's chart resolves as soon as
            // the item is visible
            let sink = |out: TaskOutput| {
                charts
                    .write()
                    .unwrap_or_else(|e| e.into_inner())
                    .insert(out.chart.chart_id.clone(), out.chart);
                let _ = feed.add(out.insight);
            };
            let summary = engine::analyze(dataset, &config, registry, &sink);
            feed.complete(summary);
        });
        session
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/datasets", post(upload))
        .route("/feed", get(feed))
        .route("/feed/stream", get(stream))
        .route("/feed/pin", post(pin))
        .route("/charts/{id}", get(chart))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

#[derive(Debug, Deserialize)]
pub struct SessionParam {
    session: Option<String>,
}

fn active_session(state: &AppState, wanted: Option<&str>) -> Result<Arc<Session>, ApiError> {
    match (state.session(), wanted) {
        (Some(s), None) => Ok(s),
        (Some(s), Some(id)) if s.id == id => Ok(s),
        (_, Some(id)) => Err(ApiError::not_found(format!("unknown session `{id}`"))),
        (None, None) => Err(ApiError::not_found("no dataset has been uploaded")),
    }
}

#[derive(Debug, Deserialize)]
pub struct UploadParams {
    format: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct DatasetSummary {
    pub id: String,
    pub name: String,
    pub rows: usize,
    pub fields: usize,
    pub kinds: KindCounts,
    pub schema: Vec<Field>,
}

#[derive(Debug, Serialize)]
pub struct UploadResponse {
    pub session_id: String,
    pub dataset: DatasetSummary,
    pub tasks: usize,
}

fn format_from_name(name: &str) -> Option<TableFormat> {
    let lower = name.to_ascii_lowercase();
    if lower.ends_with(".json") {
        Some(TableFormat::Json)
    } else if lower.ends_with(".csv") {
        Some(TableFormat::Csv)
    } else {
        None
    }
}

async fn upload(
    State(state): State<Arc<AppState>>,
    Query(params): Query<UploadParams>,
    request: Request,
) -> Result<Json<UploadResponse>, Response> {
    let mut format = match params.format.as_deref() {
        Some(f) => Some(
            f.parse::<TableFormat>()
                .map_err(|e| ApiError::bad_request(e.to_string()).into_response())?,
        ),
        None => None,
    };
    let is_multipart = request
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("multipart/form-data"));
    let is_json = request
        .headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("application/json"));

    let (bytes, name) = if is_multipart {
        let mut multipart = Multipart::from_request(request, &state)
            .await
            .map_err(IntoResponse::into_response)?;
        let field = multipart
            .next_field()
            .await
            .map_err(IntoResponse::into_response)?
            .ok_or_else(|| ApiError::bad_request("multipart body has no file part").into_response())?;
        let name = field.file_name().map(str::to_string);
        let bytes = field.bytes().await.map_err(IntoResponse::into_response)?;
        (bytes, name)
    } else {
        let bytes = Bytes::from_request(request, &state)
            .await
            .map_err(IntoResponse::into_response)?;
        (bytes, None)
    };

    if format.is_none() {
        format = name.as_deref().and_then(format_from_name);
    }
    let format = format.unwrap_or(if is_json { TableFormat::Json } else { TableFormat::Csv });

    let mut dataset = parse_table(&bytes, format).map_err(|e| ApiError::bad_request(e.to_string()).into_response())?;
    if let Some(name) = name {
        dataset = dataset.with_name(name);
    }
    let session = state.start_session(dataset);
    let d = &session.dataset;
    Ok(Json(UploadResponse {
        session_id: session.id.clone(),
        dataset: DatasetSummary {
            id: d.id().to_string(),
            name: d.name().to_string(),
            rows: d.row_count(),
            fields: d.fields().len(),
            kinds: d.kind_counts(),
            schema: d.fields().to_vec(),
        },
        tasks: session.task_count,
    }))
}

#[derive(Debug, Default, Deserialize)]
pub struct FeedParams {
    session: Option<String>,
    sort: Option<String>,
    /// Comma-separated kind names or labels.
    kinds: Option<String>,
    q: Option<String>,
    /// Comma-separated field names.
    selected: Option<String>,
    group: Option<bool>,
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty())
}

impl FeedParams {
    fn to_query(&self) -> Result<FeedQuery, ApiError> {
        let sort = match self.sort.as_deref() {
            Some(s) => s.parse::<SortOrder>().map_err(|e| ApiError::bad_request(e.to_string()))?,
            None => SortOrder::default(),
        };
        let kinds = match self.kinds.as_deref() {
            Some(list) => Some(
                split_list(list)
                    .map(|k| k.parse::<ModuleKind>())
                    .collect::<Result<BTreeSet<_>, _>>()
                    .map_err(|e| ApiError::bad_request(e.to_string()))?,
            ),
            None => None,
        };
        Ok(FeedQuery {
            kinds,
            text: self.q.clone(),
            sort,
            group_by_kind: self.group.unwrap_or(false),
            selected_fields: self
                .selected
                .as_deref()
                .map(|s| split_list(s).map(str::to_string).collect())
                .unwrap_or_default(),
        })
    }
}

async fn feed(State(state): State<Arc<AppState>>, Query(params): Query<FeedParams>) -> Result<Json<Vec<Insight>>, ApiError> {
    let session = active_session(&state, params.session.as_deref())?;
    let query = params.to_query()?;
    Ok(Json(session.feed.query(&query)))
}

/// One line of the feed stream.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", content = "data", rename_all = "snake_case")]
pub enum StreamLine {
    Insight(Insight),
    RunComplete(RunSummary),
}

fn encode_line(line: &StreamLine) -> Bytes {
    let mut text = serde_json::to_string(line).expect("stream lines serialize");
    text.push('\n');
    Bytes::from(text)
}

/// JSON lines: every existing item, then new items as they arrive, then a
/// final `run_complete` line.
async fn stream(State(state): State<Arc<AppState>>, Query(params): Query<SessionParam>) -> Result<Response, ApiError> {
    let session = active_session(&state, params.session.as_deref())?;
    let sub = session.feed.subscribe();
    let (tx, rx) = tokio::sync::mpsc::channel::<Bytes>(64);

    // the feed's subscription channel blocks, so forward it from a thread
    thread::spawn(move || {
        for item in sub.backlog {
            if tx.blocking_send(encode_line(&StreamLine::Insight(item))).is_err() {
                return;
            }
        }
        if let Some(summary) = sub.completed {
            let _ = tx.blocking_send(encode_line(&StreamLine::RunComplete(summary)));
            return;
        }
        while let Ok(event) = sub.events.recv() {
            let (line, last) = match event {
                FeedEvent::Insight(i) => (StreamLine::Insight(i), false),
                FeedEvent::RunComplete(s) => (StreamLine::RunComplete(s), true),
            };
            if tx.blocking_send(encode_line(&line)).is_err() || last {
                return;
            }
        }
    });

    let body = futures::stream::unfold(rx, |mut rx| async move {
        rx.recv().await.map(|b| (Ok::<_, Infallible>(b), rx))
    });
    Ok(Response::builder()
        .header(header::CONTENT_TYPE, "application/x-ndjson")
        .header(header::CACHE_CONTROL, "no-cache")
        .body(Body::from_stream(body))
        .expect("valid response"))
}

async fn chart(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(params): Query<SessionParam>,
) -> Result<Json<ChartSpec>, ApiError> {
    let session = active_session(&state, params.session.as_deref())?;
    let charts = session.charts.read().unwrap_or_else(|e| e.into_inner());
    charts
        .get(&id)
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::not_found(format!("unknown chart `{id}`")))
}

#[derive(Debug, Deserialize)]
pub struct PinRequest {
    pub chart: ChartSpec,
    pub title: String,
}

/// Stores the chart under a fresh id and adds a pinned item for it.
async fn pin(
    State(state): State<Arc<AppState>>,
    Query(params): Query<SessionParam>,
    Json(req): Json<PinRequest>,
) -> Result<(StatusCode, Json<Insight>), ApiError> {
    let session = active_session(&state, params.session.as_deref())?;
    let mut chart = req.chart;
    chart.chart_id = format!("u{:04}", state.pins.fetch_add(1, Ordering::SeqCst) + 1);
    let problems = insight_core::chart::validate(&chart);
    if !problems.is_empty() {
        return Err(ApiError::bad_request(FeedError::InvalidChart(problems).to_string()));
    }
    session
        .charts
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .insert(chart.chart_id.clone(), chart.clone());
    let item = session
        .feed
        .pin(&chart, &req.title)
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    Ok((StatusCode::CREATED, Json(item)))
}
