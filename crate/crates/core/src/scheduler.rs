//! Task enumeration, cost/relevance estimates, priority order and the
//! failure-isolating worker pool.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::AnalyticsError;
use crate::chart::{ChartError, ChartSpec};
use crate::insight::{Insight, InsightError, ModuleKind};
use crate::tabular::{DatasetMeta, Field, FieldKind};

/// Cluster counts tried by k-means.
pub const KMEANS_CLUSTER_COUNTS: [usize; 3] = [3, 5, 7];
/// DBSCAN `(min_pts, eps)` configurations, eps in min-max scaled units.
pub const DBSCAN_CONFIGS: [(usize, f64); 2] = [(4, 0.05), (8, 0.1)];
pub const POLY_DEGREES: [usize; 2] = [2, 3];
/// Categorical fields with more distinct values than
/// `min(HIGH_CARDINALITY_CAP, rows / 2)` get no frequency tasks.
pub const HIGH_CARDINALITY_CAP: f64 = 100.0;

pub const DEFAULT_WORKERS: usize = 4;
pub const DEFAULT_TASK_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TaskParams {
    None,
    Clusters { k: usize },
    Density { min_pts: usize, eps: f64 },
    Degree { degree: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskState {
    Pending,
    Running,
    Done,
    Failed,
    Skipped,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("illegal task transition {from:?} -> {to:?}")]
pub struct InvalidTransition {
    pub from: TaskState,
    pub to: TaskState,
}

/// One unit of work: a module applied to one or two fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeTask {
    pub id: u32,
    pub kind: ModuleKind,
    pub fields: Vec<String>,
    pub params: TaskParams,
    pub cost: f64,
    pub relevance: f64,
    pub state: TaskState,
}

impl ComputeTask {
    fn new(kind: ModuleKind, fields: Vec<String>, params: TaskParams) -> Self {
        ComputeTask {
            id: 0,
            kind,
            fields,
            params,
            cost: 0.0,
            relevance: 0.0,
            state: TaskState::Pending,
        }
    }

    /// pending → running → {done, failed, skipped}
    pub fn transition(&mut self, to: TaskState) -> Result<(), InvalidTransition> {
        let ok = matches!(
            (self.state, to),
            (TaskState::Pending, TaskState::Running)
                | (TaskState::Running, TaskState::Done | TaskState::Failed | TaskState::Skipped)
        );
        if !ok {
            return Err(InvalidTransition { from: self.state, to });
        }
        self.state = to;
        Ok(())
    }

    /// Canonical text form of `(kind, fields, params)`.
    pub fn key(&self) -> String {
        let params = match self.params {
            TaskParams::None => String::new(),
            TaskParams::Clusters { k } => format!("k={k}"),
            TaskParams::Density { min_pts, eps } => format!("min_pts={min_pts},eps={eps}"),
            TaskParams::Degree { degree } => format!("degree={degree}"),
        };
        format!("{}({})[{}]", self.kind, self.fields.join(","), params)
    }
}

fn is_high_cardinality(field: &Field, row_count: usize) -> bool {
    field.distinct_count as f64 > HIGH_CARDINALITY_CAP.min(row_count as f64 / 2.0)
}

/// Every applicable task for a schema, restricted to the modules in
/// `registry`. Ids follow enumeration order, starting at 1.
///
/// Per numerical field one merged mean/variance + range task; per
/// category-source field one frequency count; per unordered pair of
/// categorical (non-temporal) fields one co-occurrence count; per unordered
/// numerical pair a correlation, k-means for each k, DBSCAN for each
/// configuration, a linear fit and a polynomial fit for each degree.
pub fn enumerate_tasks(meta: &DatasetMeta, registry: &[ModuleKind]) -> Vec<ComputeTask> {
    let has = |k: ModuleKind| registry.contains(&k);
    let names = |fs: &[&Field]| fs.iter().map(|f| f.name.clone()).collect::<Vec<_>>();
    let rows = meta.row_count;
    let mut tasks = Vec::new();

    let numerical: Vec<&Field> = meta.fields.iter().filter(|f| f.kind == FieldKind::Numerical).collect();
    let categorical: Vec<&Field> = meta
        .fields
        .iter()
        .filter(|f| f.is_category_source() && !is_high_cardinality(f, rows))
        .collect();

    if has(ModuleKind::MeanVariance) {
        for f in &numerical {
            tasks.push(ComputeTask::new(ModuleKind::MeanVariance, names(&[f]), TaskParams::None));
        }
    }
    if has(ModuleKind::FreqCounts) {
        for f in &categorical {
            tasks.push(ComputeTask::new(ModuleKind::FreqCounts, names(&[f]), TaskParams::None));
        }
    }
    if has(ModuleKind::FreqComb) {
        let plain: Vec<&Field> = categorical
            .iter()
            .copied()
            .filter(|f| f.kind != FieldKind::Temporal)
            .collect();
        for (i, a) in plain.iter().enumerate() {
            for b in &plain[i + 1..] {
                tasks.push(ComputeTask::new(ModuleKind::FreqComb, names(&[a, b]), TaskParams::None));
            }
        }
    }
    for (i, a) in numerical.iter().enumerate() {
        for b in &numerical[i + 1..] {
            let pair = names(&[a, b]);
            if has(ModuleKind::Correlation) {
                tasks.push(ComputeTask::new(ModuleKind::Correlation, pair.clone(), TaskParams::None));
            }
            if has(ModuleKind::Kmeans) {
                for k in KMEANS_CLUSTER_COUNTS {
                    tasks.push(ComputeTask::new(ModuleKind::Kmeans, pair.clone(), TaskParams::Clusters { k }));
                }
            }
            if has(ModuleKind::Dbscan) {
                for (min_pts, eps) in DBSCAN_CONFIGS {
                    tasks.push(ComputeTask::new(
                        ModuleKind::Dbscan,
                        pair.clone(),
                        TaskParams::Density { min_pts, eps },
                    ));
                }
            }
            if has(ModuleKind::Linreg) {
                tasks.push(ComputeTask::new(ModuleKind::Linreg, pair.clone(), TaskParams::None));
            }
            if has(ModuleKind::Polyreg) {
                for degree in POLY_DEGREES {
                    tasks.push(ComputeTask::new(ModuleKind::Polyreg, pair.clone(), TaskParams::Degree { degree }));
                }
            }
        }
    }

    for (i, t) in tasks.iter_mut().enumerate() {
        t.id = i as u32 + 1;
        let (cost, relevance) = estimate(t, meta);
        t.cost = cost;
        t.relevance = relevance;
    }
    tasks
}

/// `(cost, relevance)` from the dataset size and the task shape.
///
/// Single-field tasks are main effects (relevance 3), correlations and
/// co-occurrences are trends (2), clustering and regression come last (1).
pub fn estimate(task: &ComputeTask, meta: &DatasetMeta) -> (f64, f64) {
    let rows = meta.row_count as f64;
    let cost = match (task.kind, task.params) {
        (ModuleKind::Kmeans, TaskParams::Clusters { k }) => rows * k as f64 * crate::analytics::KMEANS_MAX_ITERATIONS as f64,
        (ModuleKind::Dbscan, _) => rows * rows,
        _ => rows,
    };
    let relevance = match task.kind {
        ModuleKind::MeanVariance | ModuleKind::Range | ModuleKind::FreqCounts => 3.0,
        ModuleKind::Correlation | ModuleKind::FreqComb => 2.0,
        ModuleKind::Kmeans | ModuleKind::Dbscan | ModuleKind::Linreg | ModuleKind::Polyreg => 1.0,
        ModuleKind::UserPinned => 0.0,
    };
    (cost, relevance)
}

/// Relevance descending, then cost ascending, then id ascending.
pub fn order(mut tasks: Vec<ComputeTask>) -> Vec<ComputeTask> {
    tasks.sort_by(|a, b| {
        b.relevance
            .total_cmp(&a.relevance)
            .then(a.cost.total_cmp(&b.cost))
            .then(a.id.cmp(&b.id))
    });
    tasks
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub worker_count: usize,
    pub per_task_timeout: Duration,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            worker_count: DEFAULT_WORKERS,
            per_task_timeout: DEFAULT_TASK_TIMEOUT,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid value `{value}` for {key}")]
pub struct ConfigError {
    pub key: &'static str,
    pub value: String,
}

impl EngineConfig {
    /// Reads `WORKERS`, `TASK_TIMEOUT_SECS` and `SEED` from the environment;
    /// unset variables keep their defaults.
    pub fn from_env() -> Result<Self, ConfigError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        fn parse<T: std::str::FromStr>(key: &'static str, raw: Option<String>) -> Result<Option<T>, ConfigError> {
            raw.map(|v| v.trim().parse().map_err(|_| ConfigError { key, value: v.clone() }))
                .transpose()
        }
        let mut cfg = EngineConfig::default();
        if let Some(w) = parse::<usize>("WORKERS", lookup("WORKERS"))? {
            if w == 0 {
                return Err(ConfigError {
                    key: "WORKERS",
                    value: "0".into(),
                });
            }
            cfg.worker_count = w;
        }
        if let Some(t) = parse::<f64>("TASK_TIMEOUT_SECS", lookup("TASK_TIMEOUT_SECS"))? {
            if !(t > 0.0) || !t.is_finite() {
                return Err(ConfigError {
                    key: "TASK_TIMEOUT_SECS",
                    value: t.to_string(),
                });
            }
            cfg.per_task_timeout = Duration::from_secs_f64(t);
        }
        if let Some(s) = parse::<u64>("SEED", lookup("SEED"))? {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

/// What a finished task hands to the sink.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskOutput {
    pub insight: Insight,
    pub chart: ChartSpec,
}

#[derive(Debug, Error)]
pub enum TaskFailure {
    #[error("module error: {0}")]
    Module(AnalyticsError),
    #[error(transparent)]
    Insight(#[from] InsightError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error("no module registered for {0}")]
    Unregistered(ModuleKind),
    #[error("{0}")]
    Other(String),
}

/// Runs one task. `Ok(None)` means the module had nothing to report.
pub trait TaskExecutor: Send + Sync + 'static {
    fn execute(&self, task: &ComputeTask) -> Result<Option<TaskOutput>, TaskFailure>;
}

/// Receives outputs as tasks finish; called concurrently from workers.
pub trait InsightSink: Sync {
    fn emit(&self, output: TaskOutput);
}

impl<F: Fn(TaskOutput) + Sync> InsightSink for F {
    fn emit(&self, output: TaskOutput) {
        self(output)
    }
}

impl InsightSink for Mutex<Vec<TaskOutput>> {
    fn emit(&self, output: TaskOutput) {
        self.lock().expect("sink poisoned").push(output);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub done: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl RunSummary {
    pub fn total(&self) -> usize {
        self.done + self.failed + self.skipped
    }
}

enum Outcome {
    Done(TaskOutput),
    Skipped,
    Failed,
}

/// Executes `tasks` in the given order on at most `worker_count` workers.
///
/// Each task runs on its own thread so that a panic or an overrun of
/// `per_task_timeout` only fails that task. A timed-out task's thread is
/// abandoned and its eventual result discarded. Task states are updated in
/// place.
pub fn run(
    tasks: &mut [ComputeTask],
    config: &EngineConfig,
    executor: Arc<dyn TaskExecutor>,
    sink: &dyn InsightSink,
) -> RunSummary {
    let next = AtomicUsize::new(0);
    let states: Mutex<Vec<TaskState>> = Mutex::new(vec![TaskState::Pending; tasks.len()]);
    let snapshot: Vec<ComputeTask> = tasks.to_vec();
    let workers = config.worker_count.max(1).min(snapshot.len().max(1));

    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(task) = snapshot.get(i) else { break };
                states.lock().expect("state lock")[i] = TaskState::Running;
                let outcome = execute_isolated(task, &executor, config.per_task_timeout);
                let state = match outcome {
                    Outcome::Done(out) => {
                        sink.emit(out);
                        TaskState::Done
                    }
                    Outcome::Skipped => TaskState::Skipped,
                    Outcome::Failed => TaskState::Failed,
                };
                states.lock().expect("state lock")[i] = state;
            });
        }
    });

    let states = states.into_inner().expect("state lock");
    let mut summary = RunSummary::default();
    for (task, state) in tasks.iter_mut().zip(states) {
        task.transition(TaskState::Running).ok();
        task.transition(state).ok();
        match state {
            TaskState::Done => summary.done += 1,
            TaskState::Skipped => summary.skipped += 1,
            // a worker never leaves a task pending or running
            _ => summary.failed += 1,
        }
    }
    summary
}

fn execute_isolated(task: &ComputeTask, executor: &Arc<dyn TaskExecutor>, timeout: Duration) -> Outcome {
    let (tx, rx) = mpsc::sync_channel(1);
    let exec = Arc::clone(executor);
    let owned = task.clone();
    let spawned = thread::Builder::new()
        .name(format!("task-{}", task.id))
        .spawn(move || {
            let _ = tx.send(exec.execute(&owned));
        });
    if spawned.is_err() {
        return Outcome::Failed;
    }
    match rx.recv_timeout(timeout) {
        Ok(Ok(Some(out))) => Outcome::Done(out),
        Ok(Ok(None)) => Outcome::Skipped,
        // error, panic (sender dropped) or timeout
        Ok(Err(_)) | Err(_) => Outcome::Failed,
    }
}

/// Distinct task kinds present, for reporting.
pub fn kinds_of(tasks: &[ComputeTask]) -> BTreeSet<ModuleKind> {
    tasks.iter().map(|t| t.kind).collect()
}
