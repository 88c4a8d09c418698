//! In-memory datasets, fitted models and per-point working copies.
//!
//! Datasets and models are immutable once stored and shared through `Arc`.
//! Everything an interaction changes lives in a [`WorkingCopy`] keyed by
//! point id inside its [`Session`]; a session's working copies sit behind one
//! mutex, so requests against the same model are applied in a total order.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use axum::http::StatusCode;
use drx_core::autoencoder::{train_with_history, TrainHistory, Violation};
use drx_core::evaluation::knn;
use drx_core::interactions::proline::rank_by_length;
use drx_core::interactions::{
    compute_feasibility_map, compute_prolines, projection_marks, snap_state, FeatureConstraint, ProlineConfig,
    PCA_FEASIBILITY_TOL,
};
use drx_core::model::ModelKind;
use drx_core::pca::{fit_pca, PcaConfig};
use drx_core::{
    ConstraintSet, Dataset, DrModel, Execution, FeasibilityMap, FeatureStats, PlaneBounds, Point2, Proline,
    ProjectionMark, TrainConfig,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{ApiError, ApiResult};

/// Largest feasibility grid side accepted by the service.
pub const MAX_RESOLUTION: usize = 512;
pub const DEFAULT_RESOLUTION: usize = 32;

/// Fits `kind` on `data`. Autoencoder batches are clamped to the sample
/// count so small datasets train with the default configuration.
pub fn fit_model(
    data: &Dataset,
    kind: ModelKind,
    train_config: Option<TrainConfig>,
    standardize: Option<bool>,
) -> ApiResult<(DrModel, Option<TrainHistory>)> {
    match kind {
        ModelKind::Pca => {
            let config = PcaConfig {
                standardize: standardize.unwrap_or(true),
                ..PcaConfig::default()
            };
            Ok((fit_pca(data, &config)?.into(), None))
        }
        ModelKind::Autoencoder => {
            let mut config = train_config.unwrap_or_default();
            config.batch_size = config.batch_size.min(data.n());
            let (model, history) = train_with_history(data, &config)?;
            Ok((model.into(), Some(history)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkingCopy {
    pub current_x: Vec<f64>,
    pub position: Point2,
    pub last_feasible_position: Point2,
    pub constraints: ConstraintSet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetInfo {
    pub dataset_id: String,
    pub n: usize,
    pub d: usize,
    pub ids: Vec<String>,
    pub feature_names: Vec<String>,
    pub stats: Vec<FeatureStats>,
}

impl DatasetInfo {
    pub fn new(dataset_id: &str, data: &Dataset) -> Self {
        DatasetInfo {
            dataset_id: dataset_id.to_string(),
            n: data.n(),
            d: data.d(),
            ids: data.ids().to_vec(),
            feature_names: data.feature_names().to_vec(),
            stats: data.stats().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointState {
    pub point_id: String,
    pub touched: bool,
    pub original_features: Vec<f64>,
    pub features: Vec<f64>,
    pub original_position: Point2,
    pub position: Point2,
    pub last_feasible_position: Point2,
    pub constraints: BTreeMap<String, FeatureConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardResult {
    pub point_id: String,
    pub features: Vec<f64>,
    pub position: Point2,
    /// Displacement from the point's original position.
    pub delta_y: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackwardResult {
    pub point_id: String,
    /// Features realizing the move; stored only when the move is feasible.
    pub features: Vec<f64>,
    pub position_feasible: bool,
    /// PCA: distance between the reached and requested position.
    /// Autoencoder: distance between `encode(decode(target))` and target.
    pub residual: f64,
    /// Position the returned features project to.
    pub position: Point2,
    /// Where the point should be drawn after this move.
    pub snapped_position: Point2,
    /// Autoencoder constraint violations of the decoded features.
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProlineLength {
    pub feature_index: usize,
    pub feature: String,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProlinesResult {
    pub point_id: String,
    /// The `top_k` longest prolines, longest first.
    pub prolines: Vec<Proline>,
    /// Every feature's proline length, longest first.
    pub lengths: Vec<ProlineLength>,
    /// Projection marks of the point's current values.
    pub marks: Vec<ProjectionMark>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbor {
    pub id: String,
    pub index: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnnResult {
    pub point_id: String,
    pub neighbors: Vec<Neighbor>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResetResult {
    pub point_id: String,
    pub features: Vec<f64>,
    pub position: Point2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSnapshot {
    pub ids: Vec<String>,
    pub feature_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// On-disk form of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub model_id: String,
    pub dataset_id: String,
    pub model: DrModel,
    pub dataset: DatasetSnapshot,
    pub plane_bounds: PlaneBounds,
    pub working: BTreeMap<String, WorkingCopy>,
}

pub struct Session {
    pub model_id: String,
    pub dataset_id: String,
    pub model: Arc<DrModel>,
    pub dataset: Arc<Dataset>,
    pub base_positions: Vec<Point2>,
    pub plane_bounds: PlaneBounds,
    working: Mutex<HashMap<String, WorkingCopy>>,
}

impl Session {
    pub fn new(model_id: String, dataset_id: String, model: Arc<DrModel>, dataset: Arc<Dataset>) -> ApiResult<Self> {
        let base_positions = model.project_all(&dataset)?;
        let plane_bounds = PlaneBounds::default_for(&base_positions);
        Ok(Session {
            model_id,
            dataset_id,
            model,
            dataset,
            base_positions,
            plane_bounds,
            working: Mutex::new(HashMap::new()),
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.model.kind()
    }

    fn lock(&self) -> MutexGuard<'_, HashMap<String, WorkingCopy>> {
        // A panicking request cannot leave a copy half-written: every
        // mutation is a single insert/remove.
        self.working.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn point(&self, point_id: &str) -> ApiResult<usize> {
        self.dataset
            .index_of(point_id)
            .ok_or_else(|| ApiError::not_found("point", point_id))
    }

    fn fresh_copy(&self, i: usize) -> WorkingCopy {
        WorkingCopy {
            current_x: self.dataset.row(i).to_vec(),
            position: self.base_positions[i],
            last_feasible_position: self.base_positions[i],
            constraints: ConstraintSet::unconstrained(self.dataset.d()),
        }
    }

    fn constraint_map(&self, cs: &ConstraintSet) -> BTreeMap<String, FeatureConstraint> {
        cs.features()
            .iter()
            .zip(self.dataset.feature_names())
            .filter(|(c, _)| !c.is_free())
            .map(|(c, name)| (name.clone(), *c))
            .collect()
    }

    /// Position of `x` given the point's original row: PCA adds the exact
    /// forward change to the stored base position.
    fn position_of(&self, i: usize, x: &[f64]) -> ApiResult<Point2> {
        match &*self.model {
            DrModel::Pca(m) => {
                let dx: Vec<f64> = x.iter().zip(self.dataset.row(i)).map(|(a, b)| a - b).collect();
                let dy = m.forward(&dx)?;
                let p = self.base_positions[i];
                Ok([p[0] + dy[0], p[1] + dy[1]])
            }
            DrModel::Autoencoder(m) => Ok(m.encode(x)?),
        }
    }

    pub fn point_state(&self, point_id: &str) -> ApiResult<PointState> {
        let i = self.point(point_id)?;
        let working = self.lock();
        let touched = working.contains_key(point_id);
        let copy = working.get(point_id).cloned().unwrap_or_else(|| self.fresh_copy(i));
        Ok(PointState {
            point_id: point_id.to_string(),
            touched,
            original_features: self.dataset.row(i).to_vec(),
            features: copy.current_x,
            original_position: self.base_positions[i],
            position: copy.position,
            last_feasible_position: copy.last_feasible_position,
            constraints: self.constraint_map(&copy.constraints),
        })
    }

    /// Current position of every point: working copies override the base.
    pub fn current_positions(&self) -> Vec<Point2> {
        let working = self.lock();
        self.current_positions_locked(&working)
    }

    fn current_positions_locked(&self, working: &HashMap<String, WorkingCopy>) -> Vec<Point2> {
        let mut positions = self.base_positions.clone();
        for (id, copy) in working {
            if let Some(i) = self.dataset.index_of(id) {
                positions[i] = copy.position;
            }
        }
        positions
    }

    /// Applies `features` (name -> new value) on top of the point's current
    /// values.
    pub fn forward(&self, point_id: &str, features: &BTreeMap<String, f64>) -> ApiResult<ForwardResult> {
        let i = self.point(point_id)?;
        let mut updates = Vec::with_capacity(features.len());
        for (name, &value) in features {
            let j = self
                .dataset
                .feature_index(name)
                .ok_or_else(|| drx_core::Error::UnknownFeature(name.clone()))?;
            if !value.is_finite() {
                return Err(ApiError::unprocessable("invalid_value", format!("value for '{name}' must be finite"))
                    .with_details(json!({ "feature": name })));
            }
            updates.push((j, value));
        }
        let mut working = self.lock();
        let mut copy = working.get(point_id).cloned().unwrap_or_else(|| self.fresh_copy(i));
        for (j, v) in updates {
            copy.current_x[j] = v;
        }
        copy.position = self.position_of(i, &copy.current_x)?;
        copy.last_feasible_position = copy.position;
        let base = self.base_positions[i];
        let result = ForwardResult {
            point_id: point_id.to_string(),
            features: copy.current_x.clone(),
            position: copy.position,
            delta_y: [copy.position[0] - base[0], copy.position[1] - base[1]],
        };
        if !features.is_empty() || working.contains_key(point_id) {
            working.insert(point_id.to_string(), copy);
        }
        Ok(result)
    }

    /// Moves the point towards `target` in the plane, starting from its
    /// working copy.
    pub fn backward(&self, point_id: &str, target: Point2, constrained: bool) -> ApiResult<BackwardResult> {
        let i = self.point(point_id)?;
        if !target.iter().all(|v| v.is_finite()) {
            return Err(ApiError::unprocessable("invalid_value", "target_position must be finite"));
        }
        let mut working = self.lock();
        let copy = working.get(point_id).cloned().unwrap_or_else(|| self.fresh_copy(i));
        let constraints = if constrained {
            copy.constraints.validate().map_err(ApiError::constraint_conflict)?;
            copy.constraints.clone()
        } else {
            ConstraintSet::unconstrained(self.dataset.d())
        };
        let x = &copy.current_x;
        let (features, reached, residual, feasible, violations) = match &*self.model {
            DrModel::Pca(m) => {
                let anchor = copy.position;
                let dy = [target[0] - anchor[0], target[1] - anchor[1]];
                let dx = if constrained {
                    m.backward_constrained(dy, &constraints, x, &PcaConfig::default())
                        .map_err(ApiError::constraint_conflict)?
                        .delta_x
                } else {
                    m.backward(dy)?
                };
                let moved = m.forward(&dx)?;
                let reached = [anchor[0] + moved[0], anchor[1] + moved[1]];
                let residual = (reached[0] - target[0]).hypot(reached[1] - target[1]);
                let feasible = residual <= PCA_FEASIBILITY_TOL * self.plane_bounds.width();
                let features: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
                (features, reached, residual, feasible, Vec::new())
            }
            DrModel::Autoencoder(m) => {
                let f = m.feasibility(target, &constraints);
                let back = m.encode(&f.x)?;
                let residual = (back[0] - target[0]).hypot(back[1] - target[1]);
                (f.x, target, residual, f.feasible, f.violations)
            }
        };
        let snapped = snap_state(copy.last_feasible_position, reached, feasible);
        if feasible {
            working.insert(
                point_id.to_string(),
                WorkingCopy {
                    current_x: features.clone(),
                    position: reached,
                    last_feasible_position: reached,
                    constraints: copy.constraints,
                },
            );
        }
        Ok(BackwardResult {
            point_id: point_id.to_string(),
            features,
            position_feasible: feasible,
            residual,
            position: reached,
            snapped_position: snapped,
            violations,
        })
    }

    pub fn prolines(&self, point_id: &str, top_k: Option<usize>, step_factor: Option<f64>) -> ApiResult<ProlinesResult> {
        let i = self.point(point_id)?;
        let config = ProlineConfig {
            step_factor: step_factor.unwrap_or(ProlineConfig::default().step_factor),
            ..ProlineConfig::default()
        };
        if !(config.step_factor > 0.0 && config.step_factor.is_finite()) {
            return Err(ApiError::unprocessable("invalid_config", "c must be positive"));
        }
        let working = self.lock();
        let x = working
            .get(point_id)
            .map(|c| c.current_x.clone())
            .unwrap_or_else(|| self.dataset.row(i).to_vec());
        let mut lines = compute_prolines(&self.model, self.dataset.stats(), point_id, &x, &config, Execution::Parallel)?;
        let ranked = rank_by_length(&lines);
        let marks = projection_marks(&self.model, self.dataset.row(i), &x)?;
        drop(working);
        let keep = top_k.unwrap_or(lines.len()).min(lines.len());
        let mut by_feature: Vec<Option<Proline>> = lines.drain(..).map(Some).collect();
        let prolines = ranked[..keep]
            .iter()
            .map(|&(j, _)| by_feature[j].take().expect("each feature ranked once"))
            .collect();
        let names = self.dataset.feature_names();
        Ok(ProlinesResult {
            point_id: point_id.to_string(),
            prolines,
            lengths: ranked
                .into_iter()
                .map(|(j, length)| ProlineLength {
                    feature_index: j,
                    feature: names[j].clone(),
                    length,
                })
                .collect(),
            marks,
        })
    }

    /// Replaces the point's constraint set. Features missing from the map
    /// are unconstrained.
    pub fn set_constraints(&self, point_id: &str, map: &BTreeMap<String, FeatureConstraint>) -> ApiResult<()> {
        let i = self.point(point_id)?;
        let mut cs = ConstraintSet::unconstrained(self.dataset.d());
        for (name, c) in map {
            let j = self
                .dataset
                .feature_index(name)
                .ok_or_else(|| drx_core::Error::UnknownFeature(name.clone()))?;
            let bad_bounds = c.lower.is_nan() || c.upper.is_nan() || c.lower == f64::INFINITY || c.upper == f64::NEG_INFINITY;
            if bad_bounds || c.lower > c.upper {
                return Err(ApiError::unprocessable(
                    "invalid_constraint",
                    format!("'{name}': lower bound {} exceeds upper bound {}", c.lower, c.upper),
                )
                .with_details(json!({ "feature": name })));
            }
            if c.lock.is_some_and(|v| !v.is_finite()) {
                return Err(ApiError::unprocessable("invalid_constraint", format!("'{name}': lock must be finite")));
            }
            cs.set_bounds(j, c.lower, c.upper);
            if let Some(v) = c.lock {
                cs.lock(j, v);
            }
        }
        let mut working = self.lock();
        match working.get_mut(point_id) {
            Some(copy) => copy.constraints = cs,
            None if !cs.is_empty() => {
                let mut copy = self.fresh_copy(i);
                copy.constraints = cs;
                working.insert(point_id.to_string(), copy);
            }
            None => {}
        }
        Ok(())
    }

    pub fn constraints(&self, point_id: &str) -> ApiResult<BTreeMap<String, FeatureConstraint>> {
        self.point(point_id)?;
        let working = self.lock();
        Ok(working
            .get(point_id)
            .map(|c| self.constraint_map(&c.constraints))
            .unwrap_or_default())
    }

    pub fn feasibility(
        &self,
        point_id: &str,
        resolution: (usize, usize),
        bounds: Option<PlaneBounds>,
    ) -> ApiResult<FeasibilityMap> {
        let i = self.point(point_id)?;
        if resolution.0 > MAX_RESOLUTION || resolution.1 > MAX_RESOLUTION {
            return Err(ApiError::unprocessable(
                "invalid_config",
                format!("resolution is capped at {MAX_RESOLUTION} per side"),
            ));
        }
        let working = self.lock();
        let copy = working.get(point_id).cloned().unwrap_or_else(|| self.fresh_copy(i));
        copy.constraints.validate().map_err(ApiError::constraint_conflict)?;
        let bounds = bounds.unwrap_or(self.plane_bounds);
        let map = compute_feasibility_map(
            &self.model,
            &copy.current_x,
            &copy.constraints,
            resolution,
            bounds,
            Execution::Parallel,
        )?;
        Ok(map)
    }

    pub fn knn(&self, point_id: &str, k: usize) -> ApiResult<KnnResult> {
        let i = self.point(point_id)?;
        let n = self.dataset.n();
        if k == 0 || k >= n {
            return Err(ApiError::unprocessable("invalid_k", format!("k must be in [1, {}), got {k}", n))
                .with_details(json!({ "k": k, "n": n })));
        }
        let positions = self.current_positions();
        let ids = self.dataset.ids();
        Ok(KnnResult {
            point_id: point_id.to_string(),
            neighbors: knn(&positions, i, k)
                .into_iter()
                .map(|(j, distance)| Neighbor {
                    id: ids[j].clone(),
                    index: j,
                    distance,
                })
                .collect(),
        })
    }

    /// Drops the point's working copy.
    pub fn reset(&self, point_id: &str) -> ApiResult<ResetResult> {
        let i = self.point(point_id)?;
        self.lock().remove(point_id);
        Ok(ResetResult {
            point_id: point_id.to_string(),
            features: self.dataset.row(i).to_vec(),
            position: self.base_positions[i],
        })
    }

    pub fn snapshot(&self) -> SessionSnapshot {
        let working = self.lock();
        SessionSnapshot {
            model_id: self.model_id.clone(),
            dataset_id: self.dataset_id.clone(),
            model: (*self.model).clone(),
            dataset: DatasetSnapshot {
                ids: self.dataset.ids().to_vec(),
                feature_names: self.dataset.feature_names().to_vec(),
                rows: self.dataset.rows().map(<[f64]>::to_vec).collect(),
            },
            plane_bounds: self.plane_bounds,
            working: working.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }
}

#[derive(Default)]
struct Inner {
    datasets: RwLock<HashMap<String, Arc<Dataset>>>,
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    next_id: AtomicU64,
    snapshot_dir: Option<PathBuf>,
}

/// Shared service state. Cloning is cheap.
#[derive(Clone, Default)]
pub struct AppState {
    inner: Arc<Inner>,
}

impl AppState {
    pub fn new(snapshot_dir: Option<PathBuf>) -> Self {
        AppState {
            inner: Arc::new(Inner {
                snapshot_dir,
                ..Inner::default()
            }),
        }
    }

    pub fn snapshot_dir(&self) -> Option<&Path> {
        self.inner.snapshot_dir.as_deref()
    }

    fn next_id(&self, prefix: &str) -> String {
        format!("{prefix}{}", self.inner.next_id.fetch_add(1, Ordering::Relaxed) + 1)
    }

    /// Keeps generated ids clear of a restored `id`.
    fn reserve(&self, id: &str) {
        let n: u64 = id.trim_start_matches(|c: char| !c.is_ascii_digit()).parse().unwrap_or(0);
        self.inner.next_id.fetch_max(n, Ordering::Relaxed);
    }

    pub fn add_dataset(&self, data: Dataset) -> (String, Arc<Dataset>) {
        let id = self.next_id("ds");
        let data = Arc::new(data);
        write(&self.inner.datasets).insert(id.clone(), data.clone());
        (id, data)
    }

    pub fn dataset(&self, id: &str) -> ApiResult<Arc<Dataset>> {
        read(&self.inner.datasets)
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("dataset", id))
    }

    pub fn add_session(&self, dataset_id: &str, dataset: Arc<Dataset>, model: DrModel) -> ApiResult<Arc<Session>> {
        let session = Arc::new(Session::new(
            self.next_id("m"),
            dataset_id.to_string(),
            Arc::new(model),
            dataset,
        )?);
        write(&self.inner.sessions).insert(session.model_id.clone(), session.clone());
        Ok(session)
    }

    pub fn session(&self, model_id: &str) -> ApiResult<Arc<Session>> {
        read(&self.inner.sessions)
            .get(model_id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("model", model_id))
    }

    /// Writes the session to `<snapshot_dir>/<model_id>.json`.
    pub fn save_snapshot(&self, model_id: &str) -> ApiResult<PathBuf> {
        let session = self.session(model_id)?;
        let dir = self.snapshot_dir().ok_or_else(|| {
            ApiError::new(StatusCode::CONFLICT, "snapshots_disabled", "the service was started without a snapshot directory")
        })?;
        let path = dir.join(format!("{model_id}.json"));
        let body = serde_json::to_vec(&session.snapshot()).map_err(|e| ApiError::internal(e.to_string()))?;
        std::fs::create_dir_all(dir)
            .and_then(|_| std::fs::write(&path, body))
            .map_err(|e| ApiError::internal(format!("writing {}: {e}", path.display())))?;
        Ok(path)
    }

    /// Registers a saved session (and its dataset, unless already present).
    pub fn restore(&self, snap: SessionSnapshot) -> ApiResult<Arc<Session>> {
        let dataset = match read(&self.inner.datasets).get(&snap.dataset_id) {
            Some(d) => d.clone(),
            None => Arc::new(Dataset::from_rows(snap.dataset.ids, snap.dataset.feature_names, snap.dataset.rows)?),
        };
        if snap.model.dim() != dataset.d() {
            return Err(drx_core::Error::DimensionMismatch {
                expected: dataset.d(),
                found: snap.model.dim(),
            }
            .into());
        }
        let mut session = Session::new(snap.model_id.clone(), snap.dataset_id.clone(), Arc::new(snap.model), dataset.clone())?;
        session.plane_bounds = snap.plane_bounds;
        *session.working.get_mut().unwrap_or_else(|e| e.into_inner()) = snap.working.into_iter().collect();
        self.reserve(&snap.dataset_id);
        self.reserve(&snap.model_id);
        write(&self.inner.datasets).entry(snap.dataset_id).or_insert(dataset);
        let session = Arc::new(session);
        write(&self.inner.sessions).insert(snap.model_id, session.clone());
        Ok(session)
    }

    /// Restores every `*.json` snapshot in the snapshot directory.
    pub fn restore_all(&self) -> Result<usize, Box<dyn std::error::Error>> {
        let Some(dir) = self.snapshot_dir() else {
            return Ok(0);
        };
        if !dir.exists() {
            return Ok(0);
        }
        let mut count = 0;
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let snap: SessionSnapshot = serde_json::from_slice(&std::fs::read(&path)?)?;
            self.restore(snap)?;
            count += 1;
        }
        Ok(count)
    }
}

fn read<T>(lock: &RwLock<T>) -> std::sync::RwLockReadGuard<'_, T> {
    lock.read().unwrap_or_else(|e| e.into_inner())
}

fn write<T>(lock: &RwLock<T>) -> std::sync::RwLockWriteGuard<'_, T> {
    lock.write().unwrap_or_else(|e| e.into_inner())
}
