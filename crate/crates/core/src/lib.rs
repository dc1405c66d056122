//! Proactive insight engine for tabular data.
//!
//! A dataset is parsed into typed columns ([`tabular`]), every applicable
//! analysis over one or two attributes is enumerated and ordered
//! ([`scheduler`]), each analysis runs as an isolated task on a worker pool
//! ([`analytics`], [`engine`]), and each finding becomes a ranked feed item
//! ([`insight`]) with a declarative chart ([`chart`]) collected in a
//! queryable feed ([`feed`]).
//!
//! The numeric kernels are generic over [`Scalar`]; the aliases at the crate
//! root fix them to `f64`, which is what the engine uses.

pub mod analytics;
pub mod chart;
pub mod engine;
pub mod feed;
pub mod insight;
pub mod scalar;
pub mod scheduler;
pub mod tabular;

mod hash;

pub use chart::{ChannelType, ChartSpec, Encoding, Mark, Overlay};
pub use engine::{DatasetExecutor, ModuleRegistry, TaskOutput};
pub use feed::{FeedEvent, FeedQuery, FeedStore, FeedSubscription, SortOrder};
pub use insight::{Insight, ModuleKind, Origin};
pub use scalar::{Point, Scalar};
pub use scheduler::{ComputeTask, EngineConfig, InsightSink, RunSummary, TaskParams, TaskState};
pub use tabular::{Dataset, DatasetMeta, Field, FieldKind, TableFormat, Value};

/// Analytics result at engine precision.
pub type AnalyticsResult = analytics::AnalyticsResult<f64>;
pub type MeanVariance = analytics::MeanVariance<f64>;
pub type Range = analytics::Range<f64>;
pub type Correlation = analytics::Correlation<f64>;
pub type KMeans = analytics::KMeans<f64>;
pub type Dbscan = analytics::Dbscan<f64>;
pub type Regression = analytics::Regression<f64>;
