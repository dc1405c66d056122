//! Command-line interface: `run` analyzes a file offline, `serve` starts the
//! HTTP API.

use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use insight_core::tabular::parse_table;
use insight_core::{engine, EngineConfig, FeedQuery, FeedStore, ModuleRegistry, SortOrder, TableFormat};

use crate::report;

#[derive(Debug, Parser)]
#[command(name = "insightd", version, about = "Proactive insight engine for tabular data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a CSV or JSON file and write the feed.
    Run(RunArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Md,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SortArg {
    Time,
    Score,
    Alpha,
}

impl From<SortArg> for SortOrder {
    fn from(s: SortArg) -> Self {
        match s {
            SortArg::Time => SortOrder::Time,
            SortArg::Score => SortOrder::Score,
            SortArg::Alpha => SortOrder::Alpha,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    /// Worker threads [env: WORKERS]
    #[arg(long)]
    pub workers: Option<usize>,
    /// Base random seed [env: SEED]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-task timeout in seconds [env: TASK_TIMEOUT_SECS]
    #[arg(long)]
    pub timeout: Option<f64>,
}

impl EngineArgs {
    /// Environment first, flags on top.
    pub fn config(&self) -> Result<EngineConfig, String> {
        let mut cfg = EngineConfig::from_env().map_err(|e| e.to_string())?;
        if let Some(w) = self.workers {
            if w == 0 {
                return Err("--workers must be at least 1".into());
            }
            cfg.worker_count = w;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.timeout {
            if !(t > 0.0 && t.is_finite()) {
                return Err("--timeout must be a positive number of seconds".into());
            }
            cfg.per_task_timeout = Duration::from_secs_f64(t);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Input table; `.json` files are read as JSON, anything else as CSV.
    pub path: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Feed order; defaults to time for JSON and score for Markdown.
    #[arg(long, value_enum)]
    pub sort: Option<SortArg>,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080", env = "INSIGHTD_ADDR")]
    pub addr: SocketAddr,
    #[command(flatten)]
    pub engine: EngineArgs,
}

pub const EXIT_INPUT_ERROR: u8 = 2;

fn input_format(path: &Path) -> TableFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => TableFormat::Json,
        _ => TableFormat::Csv,
    }
}

/// Runs the full pipeline on one file and returns the rendered report.
pub fn render_run(args: &RunArgs) -> Result<String, String> {
    let config = args.engine.config()?;
    let bytes = fs::read(&args.path).map_err(|e| format!("{}: {e}", args.path.display()))?;
    let mut dataset = parse_table(&bytes, input_format(&args.path)).map_err(|e| format!("{}: {e}", args.path.display()))?;
    if let Some(name) = args.path.file_name().and_then(|n| n.to_str()) {
        dataset = dataset.with_name(name);
    }
    let dataset = Arc::new(dataset);
    let feed = FeedStore::new();
    let summary = engine::analyze(Arc::clone(&dataset), &config, ModuleRegistry::standard(), &feed);
    let sort = args.sort.map(SortOrder::from).unwrap_or(match args.format {
        OutputFormat::Json => SortOrder::Time,
        OutputFormat::Md => SortOrder::Score,
    });
    let items = feed.query(&FeedQuery {
        sort,
        ..FeedQuery::default()
    });
    Ok(match args.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&items).expect("insights serialize");
            s.push('\n');
            s
        }
        OutputFormat::Md => report::markdown(&dataset, &summary, &items),
    })
}

pub fn run(args: &RunArgs) -> ExitCode {
    let text = match render_run(args) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("insightd: {e}");
            return ExitCode::from(EXIT_INPUT_ERROR);
        }
    };
    let written = match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("insightd: {e}");
            ExitCode::FAILURE
        }
    }
}

pub fn serve(args: &ServeArgs) -> anyhow::Result<()> {
    let config = args.engine.config().map_err(anyhow::Error::msg)?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(args.addr).await?;
        eprintln!("insightd: listening on http://{}", listener.local_addr()?);
        let app = crate::server::router(crate::server::AppState::new(config, ModuleRegistry::standard()));
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
