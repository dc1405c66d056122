//! Wires the modules to a dataset: a replaceable module registry, the
//! executor the scheduler runs, and a one-call driver.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::analytics::{self, AnalyticsError, AnalyticsResult};
use crate::chart::chart_for;
use crate::hash::Fnv64;
use crate::insight::{Insight, ModuleKind};
use crate::scheduler::{
    self, ComputeTask, EngineConfig, InsightSink, RunSummary, TaskExecutor, TaskFailure, TaskParams,
};
use crate::tabular::{Dataset, TableError};

pub use crate::scheduler::TaskOutput;

/// One computational module: turns a task over a dataset into a result.
pub trait Module: Send + Sync {
    fn compute(&self, dataset: &Dataset, task: &ComputeTask, seed: u64) -> Result<AnalyticsResult<f64>, ModuleError>;
}

impl<F> Module for F
where
    F: Fn(&Dataset, &ComputeTask, u64) -> Result<AnalyticsResult<f64>, ModuleError> + Send + Sync,
{
    fn compute(&self, dataset: &Dataset, task: &ComputeTask, seed: u64) -> Result<AnalyticsResult<f64>, ModuleError> {
        self(dataset, task, seed)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ModuleError {
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Data(#[from] TableError),
    #[error("{0}")]
    Other(String),
}

/// Module per kind. Lookups for the merged descriptive task go to
/// [`ModuleKind::MeanVariance`].
#[derive(Clone)]
pub struct ModuleRegistry {
    modules: BTreeMap<ModuleKind, Arc<dyn Module>>,
}

impl ModuleRegistry {
    pub fn empty() -> Self {
        ModuleRegistry {
            modules: BTreeMap::new(),
        }
    }

    /// All built-in modules.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        for kind in ModuleKind::MODULES {
            r.modules.insert(kind, Arc::new(Builtin(kind)));
        }
        r
    }

    /// Replaces (or adds) the module for `kind`.
    pub fn with_module(mut self, kind: ModuleKind, module: Arc<dyn Module>) -> Self {
        self.modules.insert(kind, module);
        self
    }

    pub fn without(mut self, kind: ModuleKind) -> Self {
        self.modules.remove(&kind);
        self
    }

    pub fn kinds(&self) -> Vec<ModuleKind> {
        self.modules.keys().copied().collect()
    }

    pub fn get(&self, kind: ModuleKind) -> Option<&Arc<dyn Module>> {
        self.modules.get(&kind)
    }
}

impl Default for ModuleRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

struct Builtin(ModuleKind);

/// The built-in module for `kind`, for wrapping or reinstalling.
pub fn builtin(kind: ModuleKind) -> Arc<dyn Module> {
    Arc::new(Builtin(kind))
}

impl Module for Builtin {
    fn compute(&self, dataset: &Dataset, task: &ComputeTask, seed: u64) -> Result<AnalyticsResult<f64>, ModuleError> {
        compute_builtin(self.0, dataset, task, seed)
    }
}

fn pair_field<'a>(task: &'a ComputeTask) -> Result<(&'a str, &'a str), ModuleError> {
    match task.fields.as_slice() {
        [a, b] => Ok((a, b)),
        other => Err(ModuleError::Other(format!("expected two fields, got {}", other.len()))),
    }
}

fn single_field(task: &ComputeTask) -> Result<&str, ModuleError> {
    match task.fields.as_slice() {
        [a] => Ok(a),
        other => Err(ModuleError::Other(format!("expected one field, got {}", other.len()))),
    }
}

fn scaled_points(dataset: &Dataset, task: &ComputeTask) -> Result<Vec<[f64; 2]>, ModuleError> {
    let (a, b) = pair_field(task)?;
    let pts: Vec<[f64; 2]> = dataset.pair_columns(a, b)?.into_iter().map(|(x, y)| [x, y]).collect();
    Ok(analytics::min_max_scale(&pts))
}

fn compute_builtin(
    kind: ModuleKind,
    dataset: &Dataset,
    task: &ComputeTask,
    seed: u64,
) -> Result<AnalyticsResult<f64>, ModuleError> {
    use AnalyticsResult as R;
    let r = match (kind, task.params) {
        (ModuleKind::MeanVariance, _) => analytics::summary(&dataset.numeric_column(single_field(task)?)?)?,
        (ModuleKind::Range, _) => R::Range(analytics::min_max(&dataset.numeric_column(single_field(task)?)?)?),
        (ModuleKind::FreqCounts, _) => {
            let cats: Vec<String> = dataset.category_column(single_field(task)?)?.into_iter().flatten().collect();
            R::FreqCounts(analytics::freq_counts(&cats)?)
        }
        (ModuleKind::FreqComb, _) => {
            let (a, b) = pair_field(task)?;
            let (xs, ys) = dataset.category_pairs(a, b)?;
            R::FreqComb(analytics::freq_comb(&xs, &ys)?)
        }
        (ModuleKind::Correlation, _) => {
            let (a, b) = pair_field(task)?;
            R::Correlation(analytics::pearson(&dataset.pair_columns(a, b)?)?)
        }
        (ModuleKind::Kmeans, TaskParams::Clusters { k }) => {
            R::KMeans(analytics::kmeans(&scaled_points(dataset, task)?, k, seed)?)
        }
        (ModuleKind::Dbscan, TaskParams::Density { min_pts, eps }) => {
            R::Dbscan(analytics::dbscan(&scaled_points(dataset, task)?, eps, min_pts)?)
        }
        (ModuleKind::Linreg, _) => {
            let (a, b) = pair_field(task)?;
            R::Regression(analytics::linreg(&dataset.pair_columns(a, b)?)?)
        }
        (ModuleKind::Polyreg, TaskParams::Degree { degree }) => {
            let (a, b) = pair_field(task)?;
            R::Regression(analytics::polyreg(&dataset.pair_columns(a, b)?, degree)?)
        }
        (kind, params) => {
            return Err(ModuleError::Other(format!("{kind} cannot run with {params:?}")));
        }
    };
    Ok(r)
}

/// Seed for one task, stable across runs and worker counts.
pub fn task_seed(base: u64, dataset_id: &str, task: &ComputeTask) -> u64 {
    let mut h = Fnv64::default();
    h.write_u64(base);
    h.write_str(dataset_id);
    h.write_str(task.kind.as_str());
    for f in &task.fields {
        h.write_str(f);
    }
    if let TaskParams::Clusters { k } = task.params {
        h.write_u64(k as u64);
    }
    h.finish()
}

pub fn insight_id(task: &ComputeTask) -> String {
    format!("i{:04}", task.id)
}

pub fn chart_id(task: &ComputeTask) -> String {
    format!("c{:04}", task.id)
}

/// Runs tasks against one dataset.
pub struct DatasetExecutor {
    dataset: Arc<Dataset>,
    registry: ModuleRegistry,
    seed: u64,
}

impl DatasetExecutor {
    pub fn new(dataset: Arc<Dataset>, registry: ModuleRegistry, seed: u64) -> Self {
        DatasetExecutor {
            dataset,
            registry,
            seed,
        }
    }
}

impl TaskExecutor for DatasetExecutor {
    fn execute(&self, task: &ComputeTask) -> Result<Option<TaskOutput>, TaskFailure> {
        let module = self
            .registry
            .get(task.kind)
            .ok_or(TaskFailure::Unregistered(task.kind))?;
        let seed = task_seed(self.seed, self.dataset.id(), task);
        let result = match module.compute(&self.dataset, task, seed) {
            Ok(r) => r,
            Err(ModuleError::Analytics(e)) if e.is_skip() => return Ok(None),
            Err(ModuleError::Analytics(e)) => return Err(TaskFailure::Module(e)),
            Err(e) => return Err(TaskFailure::Other(e.to_string())),
        };
        let chart_id = chart_id(task);
        let insight = Insight::from_result(insight_id(task), task.kind, task.fields.clone(), &result, &chart_id)?;
        let chart = chart_for(&chart_id, task.kind, &task.fields, &result, &self.dataset, seed)?;
        Ok(Some(TaskOutput { insight, chart }))
    }
}

/// Enumerates, orders and runs every task for `dataset`.
pub fn analyze(
    dataset: Arc<Dataset>,
    config: &EngineConfig,
    registry: ModuleRegistry,
    sink: &dyn InsightSink,
) -> RunSummary {
    let mut tasks = plan(&dataset, &registry);
    let executor = Arc::new(DatasetExecutor::new(dataset, registry, config.seed));
    scheduler::run(&mut tasks, config, executor, sink)
}

/// The ordered task list [`analyze`] would run.
pub fn plan(dataset: &Dataset, registry: &ModuleRegistry) -> Vec<ComputeTask> {
    scheduler::order(scheduler::enumerate_tasks(&dataset.meta(), &registry.kinds()))
}
