use std::fmt::Write;

use insight_core::{Dataset, Insight, RunSummary};

/// Markdown report: one section per item, in the given order.
pub fn markdown(dataset: &Dataset, summary: &RunSummary, items: &[Insight]) -> String {
    let mut out = String::new();
    let name = if dataset.name().is_empty() { "dataset" } else { dataset.name() };
    writeln!(out, "# Insights for {name}\n").unwrap();
    writeln!(
        out,
        "{} rows, {} fields. {} tasks done, {} skipped, {} failed.\n",
        dataset.row_count(),
        dataset.fields().len(),
        summary.done,
        summary.skipped,
        summary.failed
    )
    .unwrap();
    for (i, item) in items.iter().enumerate() {
        writeln!(out, "## {}. {}\n", i + 1, item.title).unwrap();
        writeln!(out, "{}\n", item.description).unwrap();
        writeln!(out, "_{} · score {:.3}_\n", item.kind.label(), item.score).unwrap();
    }
    out
}
