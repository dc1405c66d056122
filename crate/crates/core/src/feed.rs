//! The insight feed: an append-only, queryable collection with live
//! subscriptions.

use std::collections::{BTreeSet, HashSet};
use std::str::FromStr;
use std::sync::mpsc::{self, Receiver, Sender};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::{validate, ChannelType, ChartSpec, CLUSTER_KEY};
use crate::insight::{Insight, ModuleKind};
use crate::scheduler::{InsightSink, RunSummary, TaskOutput};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SortOrder {
    /// Newest first.
    #[default]
    Time,
    /// Highest score first, newest first among equal scores.
    Score,
    /// By title, then id.
    Alpha,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown sort order `{0}` (expected time, score or alpha)")]
pub struct UnknownSort(pub String);

impl FromStr for SortOrder {
    type Err = UnknownSort;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "time" => Ok(SortOrder::Time),
            "score" => Ok(SortOrder::Score),
            "alpha" => Ok(SortOrder::Alpha),
            _ => Err(UnknownSort(s.to_string())),
        }
    }
}

/// Filter, search, sort and layout options. The default returns every item,
/// newest first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeedQuery {
    /// Keep only these kinds; `None` keeps all.
    pub kinds: Option<BTreeSet<ModuleKind>>,
    /// Case-insensitive substring over title, description and field names.
    pub text: Option<String>,
    pub sort: SortOrder,
    /// Cluster items of the same kind, groups in order of first appearance.
    pub group_by_kind: bool,
    /// Fields selected elsewhere in the UI; related items move up.
    pub selected_fields: BTreeSet<String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeedError {
    #[error("duplicate insight id `{0}`")]
    DuplicateId(String),
    #[error("invalid chart: {}", .0.join("; "))]
    InvalidChart(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeedEvent {
    Insight(Insight),
    RunComplete(RunSummary),
}

/// Everything already in the feed plus a channel for what comes next.
pub struct FeedSubscription {
    pub backlog: Vec<Insight>,
    /// Set when the run finished before subscribing.
    pub completed: Option<RunSummary>,
    pub events: Receiver<FeedEvent>,
}

#[derive(Default)]
struct Inner {
    items: Vec<Insight>,
    ids: HashSet<String>,
    clock: u64,
    pins: u64,
    completed: Option<RunSummary>,
    subscribers: Vec<Sender<FeedEvent>>,
}

impl Inner {
    fn broadcast(&mut self, event: &FeedEvent) {
        self.subscribers.retain(|tx| tx.send(event.clone()).is_ok());
    }
}

#[derive(Default)]
pub struct FeedStore {
    inner: Mutex<Inner>,
}

impl FeedStore {
    pub fn new() -> Self {
        Self::default()
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Appends an item, stamping `created_at` with the next clock tick, and
    /// notifies subscribers.
    pub fn add(&self, mut insight: Insight) -> Result<Insight, FeedError> {
        let mut inner = self.lock();
        if !inner.ids.insert(insight.id.clone()) {
            return Err(FeedError::DuplicateId(insight.id));
        }
        inner.clock += 1;
        insight.created_at = inner.clock;
        inner.items.push(insight.clone());
        inner.broadcast(&FeedEvent::Insight(insight.clone()));
        Ok(insight)
    }

    /// Records the end of the run and notifies subscribers.
    pub fn complete(&self, summary: RunSummary) {
        let mut inner = self.lock();
        inner.completed = Some(summary);
        inner.broadcast(&FeedEvent::RunComplete(summary));
    }

    pub fn completed(&self) -> Option<RunSummary> {
        self.lock().completed
    }

    pub fn len(&self) -> usize {
        self.lock().items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Items in insertion order.
    pub fn snapshot(&self) -> Vec<Insight> {
        self.lock().items.clone()
    }

    pub fn get(&self, id: &str) -> Option<Insight> {
        self.lock().items.iter().find(|i| i.id == id).cloned()
    }

    pub fn query(&self, q: &FeedQuery) -> Vec<Insight> {
        apply_query(&self.snapshot(), q)
    }

    /// Adds a user-pinned item for `chart`. The chart must be well formed;
    /// the item references `chart.chart_id`.
    pub fn pin(&self, chart: &ChartSpec, title: &str) -> Result<Insight, FeedError> {
        let problems = validate(chart);
        if !problems.is_empty() {
            return Err(FeedError::InvalidChart(problems));
        }
        let fields: Vec<String> = [Some(&chart.x), Some(&chart.y), chart.color.as_ref()]
            .into_iter()
            .flatten()
            .filter(|e| e.channel_type != ChannelType::Count)
            .filter_map(|e| e.field.clone())
            .filter(|f| f != CLUSTER_KEY)
            .fold(Vec::new(), |mut acc, f| {
                if !acc.contains(&f) {
                    acc.push(f);
                }
                acc
            });
        let id = {
            let mut inner = self.lock();
            loop {
                inner.pins += 1;
                let id = format!("pin-{}", inner.pins);
                if !inner.ids.contains(&id) {
                    break id;
                }
            }
        };
        self.add(Insight::pinned(id, title, fields, chart.chart_id.clone()))
    }

    /// Current items plus a receiver for later events, taken atomically so
    /// nothing is missed or repeated.
    pub fn subscribe(&self) -> FeedSubscription {
        let (tx, rx) = mpsc::channel();
        let mut inner = self.lock();
        inner.subscribers.push(tx);
        FeedSubscription {
            backlog: inner.items.clone(),
            completed: inner.completed,
            events: rx,
        }
    }
}

impl InsightSink for FeedStore {
    fn emit(&self, output: TaskOutput) {
        // ids come from task ids, so a duplicate means the same task twice
        let _ = self.add(output.insight);
    }
}

fn matches_text(item: &Insight, needle: &str) -> bool {
    item.title.to_lowercase().contains(needle)
        || item.description.to_lowercase().contains(needle)
        || item.fields.iter().any(|f| f.to_lowercase().contains(needle))
}

/// Applies a query to a list of items: filter, search, sort, group, then
/// the selected-fields reorder.
pub fn apply_query(items: &[Insight], q: &FeedQuery) -> Vec<Insight> {
    let needle = q.text.as_deref().map(str::trim).filter(|t| !t.is_empty()).map(str::to_lowercase);
    let mut out: Vec<Insight> = items
        .iter()
        .filter(|i| q.kinds.as_ref().is_none_or(|ks| ks.contains(&i.kind)))
        .filter(|i| needle.as_deref().is_none_or(|n| matches_text(i, n)))
        .cloned()
        .collect();
    sort_items(&mut out, q.sort);
    if q.group_by_kind {
        out = group_by_kind(out);
    }
    reorder_for_selection(out, &q.selected_fields)
}

pub fn sort_items(items: &mut [Insight], order: SortOrder) {
    match order {
        SortOrder::Time => items.sort_by(|a, b| b.created_at.cmp(&a.created_at).then_with(|| a.id.cmp(&b.id))),
        SortOrder::Score => items.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then(b.created_at.cmp(&a.created_at))
                .then_with(|| a.id.cmp(&b.id))
        }),
        SortOrder::Alpha => items.sort_by(|a, b| a.title.cmp(&b.title).then_with(|| a.id.cmp(&b.id))),
    }
}

/// Stable grouping by kind; groups appear in order of their first item.
pub fn group_by_kind(items: Vec<Insight>) -> Vec<Insight> {
    let mut kinds: Vec<ModuleKind> = Vec::new();
    for i in &items {
        if !kinds.contains(&i.kind) {
            kinds.push(i.kind);
        }
    }
    kinds
        .into_iter()
        .flat_map(|k| items.iter().filter(move |i| i.kind == k).cloned().collect::<Vec<_>>())
        .collect()
}

/// Moves every kind that has an item touching a selected field to the top,
/// in order of first appearance, with the touching items first inside each
/// kind. Everything else keeps its relative order. An empty selection, or
/// one nothing touches, leaves the list unchanged.
pub fn reorder_for_selection(items: Vec<Insight>, selected: &BTreeSet<String>) -> Vec<Insight> {
    if selected.is_empty() {
        return items;
    }
    let touches = |i: &Insight| i.touches_any(selected.iter().map(String::as_str));
    let mut hot: Vec<ModuleKind> = Vec::new();
    for i in items.iter().filter(|i| touches(i)) {
        if !hot.contains(&i.kind) {
            hot.push(i.kind);
        }
    }
    if hot.is_empty() {
        return items;
    }
    let mut out = Vec::with_capacity(items.len());
    for k in &hot {
        out.extend(items.iter().filter(|i| i.kind == *k && touches(i)).cloned());
        out.extend(items.iter().filter(|i| i.kind == *k && !touches(i)).cloned());
    }
    out.extend(items.into_iter().filter(|i| !hot.contains(&i.kind)));
    out
}
