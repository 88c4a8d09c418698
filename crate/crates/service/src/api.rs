//! HTTP routes. Handlers parse the request, run the session operation on
//! the blocking pool and serialize the result.

use std::collections::BTreeMap;

use axum::body::Bytes;
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, FromRequest, FromRequestParts, Path, Request, State};
use axum::http::request::Parts;
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use drx_core::dataset::load_csv;
use drx_core::interactions::FeatureConstraint;
use drx_core::model::ModelKind;
use drx_core::{PlaneBounds, Point2, TrainConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{ApiError, ApiResult};
use crate::session::{fit_model, AppState, DatasetInfo, DEFAULT_RESOLUTION};

/// Request bodies up to this size are accepted (CSV uploads).
pub const BODY_LIMIT: usize = 512 * 1024 * 1024;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/datasets", post(create_dataset))
        .route("/datasets/{id}", get(get_dataset))
        .route("/datasets/{id}/models", post(create_model))
        .route("/models/{id}", get(get_model))
        .route("/models/{id}/points/{point_id}", get(get_point))
        .route("/models/{id}/forward", post(forward))
        .route("/models/{id}/backward", post(backward))
        .route("/models/{id}/prolines", get(prolines))
        .route("/models/{id}/constraints", get(get_constraints).put(put_constraints))
        .route("/models/{id}/feasibility", post(feasibility))
        .route("/models/{id}/knn", get(knn))
        .route("/models/{id}/reset", post(reset))
        .route("/models/{id}/snapshot", post(snapshot))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

/// `Json` whose rejections use the service error body.
pub struct ApiJson<T>(pub T);

impl<T: DeserializeOwned, S: Send + Sync> FromRequest<S> for ApiJson<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, ApiError> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(v)) => Ok(ApiJson(v)),
            Err(e) => Err(json_rejection(e)),
        }
    }
}

fn json_rejection(e: JsonRejection) -> ApiError {
    ApiError::new(e.status(), "invalid_body", e.body_text())
}

/// `Query` whose rejections use the service error body.
pub struct ApiQuery<T>(pub T);

impl<T: DeserializeOwned, S: Send + Sync> FromRequestParts<S> for ApiQuery<T> {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, ApiError> {
        match axum::extract::Query::<T>::from_request_parts(parts, state).await {
            Ok(q) => Ok(ApiQuery(q.0)),
            Err(e) => Err(query_rejection(e)),
        }
    }
}

fn query_rejection(e: QueryRejection) -> ApiError {
    ApiError::new(StatusCode::BAD_REQUEST, "invalid_query", e.body_text())
}

async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

#[derive(Debug, Deserialize)]
struct DatasetQuery {
    id_column: Option<String>,
}

async fn create_dataset(
    State(state): State<AppState>,
    ApiQuery(q): ApiQuery<DatasetQuery>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<DatasetInfo>)> {
    let data = blocking(move || Ok(load_csv(&body[..], q.id_column.as_deref())?)).await?;
    let (id, data) = state.add_dataset(data);
    tracing::info!(dataset = %id, n = data.n(), d = data.d(), "dataset loaded");
    Ok((StatusCode::CREATED, Json(DatasetInfo::new(&id, &data))))
}

#[derive(Serialize)]
struct DatasetBody {
    #[serde(flatten)]
    info: DatasetInfo,
    values: Vec<Vec<f64>>,
}

async fn get_dataset(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let data = state.dataset(&id)?;
    Ok(Json(DatasetBody {
        info: DatasetInfo::new(&id, &data),
        values: data.rows().map(<[f64]>::to_vec).collect(),
    }))
}

#[derive(Debug, Deserialize)]
struct FitRequest {
    method: String,
    train_config: Option<TrainConfig>,
    standardize: Option<bool>,
}

#[derive(Serialize)]
struct FitResponse {
    model_id: String,
    dataset_id: String,
    kind: ModelKind,
    ids: Vec<String>,
    positions: Vec<Point2>,
    plane_bounds: PlaneBounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    training: Option<drx_core::autoencoder::TrainHistory>,
}

async fn create_model(
    State(state): State<AppState>,
    Path(dataset_id): Path<String>,
    ApiJson(req): ApiJson<FitRequest>,
) -> ApiResult<(StatusCode, Json<FitResponse>)> {
    let kind: ModelKind = req
        .method
        .parse()
        .map_err(|m: String| ApiError::bad_request(m).with_details(json!({ "method": req.method })))?;
    let data = state.dataset(&dataset_id)?;
    let fit_data = data.clone();
    let (model, training) = blocking(move || fit_model(&fit_data, kind, req.train_config, req.standardize)).await?;
    let session = state.add_session(&dataset_id, data, model)?;
    tracing::info!(model = %session.model_id, dataset = %dataset_id, %kind, "model fitted");
    Ok((
        StatusCode::CREATED,
        Json(FitResponse {
            model_id: session.model_id.clone(),
            dataset_id,
            kind,
            ids: session.dataset.ids().to_vec(),
            positions: session.base_positions.clone(),
            plane_bounds: session.plane_bounds,
            training,
        }),
    ))
}

async fn get_model(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = state.session(&id)?;
    Ok(Json(json!({
        "model_id": s.model_id,
        "dataset_id": s.dataset_id,
        "kind": s.kind(),
        "model": *s.model,
        "ids": s.dataset.ids(),
        "positions": s.current_positions(),
        "plane_bounds": s.plane_bounds,
    })))
}

async fn get_point(
    State(state): State<AppState>,
    Path((id, point_id)): Path<(String, String)>,
) -> ApiResult<impl IntoResponse> {
    let s = state.session(&id)?;
    Ok(Json(blocking(move || s.point_state(&point_id)).await?))
}

#[derive(Debug, Deserialize)]
struct ForwardRequest {
    point_id: String,
    #[serde(default)]
    features: BTreeMap<String, f64>,
}

async fn forward(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<ForwardRequest>,
) -> ApiResult<impl IntoResponse> {
    let s = state.session(&id)?;
    Ok(Json(blocking(move || s.forward(&req.point_id, &req.features)).await?))
}

#[derive(Debug, Deserialize)]
struct BackwardRequest {
    point_id: String,
    target_position: Point2,
    #[serde(default)]
    constrained: bool,
}

async fn backward(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<BackwardRequest>,
) -> ApiResult<impl IntoResponse> {
    let s = state.session(&id)?;
    Ok(Json(
        blocking(move || s.backward(&req.point_id, req.target_position, req.constrained)).await?,
    ))
}

#[derive(Debug, Deserialize)]
struct ProlineQuery {
    point_id: String,
    top_k: Option<usize>,
    c: Option<f64>,
}

async fn prolines(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiQuery(q): ApiQuery<ProlineQuery>,
) -> ApiResult<impl IntoResponse> {
    let s = state.session(&id)?;
    Ok(Json(blocking(move || s.prolines(&q.point_id, q.top_k, q.c)).await?))
}

#[derive(Debug, Deserialize)]
struct PointQuery {
    point_id: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ConstraintsBody {
    point_id: String,
    /// Feature name -> constraint; absent features are free.
    #[serde(default, alias = "constraint_set")]
    constraints: BTreeMap<String, FeatureConstraint>,
}

async fn put_constraints(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<ConstraintsBody>,
) -> ApiResult<StatusCode> {
    let s = state.session(&id)?;
    blocking(move || s.set_constraints(&req.point_id, &req.constraints)).await?;
    Ok(StatusCode::NO_CONTENT)
}

async fn get_constraints(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiQuery(q): ApiQuery<PointQuery>,
) -> ApiResult<impl IntoResponse> {
    let s = state.session(&id)?;
    let constraints = blocking({
        let point_id = q.point_id.clone();
        move || s.constraints(&point_id)
    })
    .await?;
    Ok(Json(ConstraintsBody {
        point_id: q.point_id,
        constraints,
    }))
}

/// Either `n` (square grid) or `[nx, ny]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Resolution {
    Square(usize),
    Grid([usize; 2]),
}

#[derive(Debug, Deserialize)]
struct FeasibilityRequest {
    point_id: String,
    resolution: Option<Resolution>,
    plane_bounds: Option<PlaneBounds>,
}

async fn feasibility(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<FeasibilityRequest>,
) -> ApiResult<impl IntoResponse> {
    let s = state.session(&id)?;
    let resolution = match req.resolution {
        None => (DEFAULT_RESOLUTION, DEFAULT_RESOLUTION),
        Some(Resolution::Square(n)) => (n, n),
        Some(Resolution::Grid([nx, ny])) => (nx, ny),
    };
    Ok(Json(
        blocking(move || s.feasibility(&req.point_id, resolution, req.plane_bounds)).await?,
    ))
}

#[derive(Debug, Deserialize)]
struct KnnQuery {
    point_id: String,
    #[serde(default = "default_k")]
    k: usize,
}

fn default_k() -> usize {
    10
}

async fn knn(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiQuery(q): ApiQuery<KnnQuery>,
) -> ApiResult<impl IntoResponse> {
    let s = state.session(&id)?;
    Ok(Json(blocking(move || s.knn(&q.point_id, q.k)).await?))
}

async fn reset(
    State(state): State<AppState>,
    Path(id): Path<String>,
    ApiJson(req): ApiJson<PointQuery>,
) -> ApiResult<impl IntoResponse> {
    let s = state.session(&id)?;
    Ok(Json(blocking(move || s.reset(&req.point_id)).await?))
}

async fn snapshot(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let path = blocking({
        let state = state.clone();
        move || state.save_snapshot(&id)
    })
    .await?;
    Ok(Json(json!({ "path": path })))
}
