//! Command-line entry points: `check`, `eval`, `stability` and `cache clear`.
//!
//! [`run`] parses arguments and dispatches; the `*_with` functions take a
//! ready [`Pipeline`] so callers can substitute providers.

mod config;
mod pipeline;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use config::{load_config, parse_config, ConfigError, ProviderKind, ToolConfig, DEFAULT_CACHE_DIR, LLM_MODULE};
pub use pipeline::{collect_sources, load_allowlist, load_lexicon, FileOutcome, Pipeline, SourceFile};

use crate::cache::ResponseCache;
use crate::finding::Severity;
use crate::harness::{
    compute_metrics, estimate_cost, match_findings, parse_ground_truth, stability_report, summarize_latency, CostModel,
    MetricsSummary, Prediction, StabilityReport,
};
use crate::report::{emit_report, OutputFormat, RunReport, EXIT_CLEAN, EXIT_TOOL_ERROR};

#[derive(Debug, Parser)]
#[command(name = "styleplus", version, about = "Java naming and documentation style checker")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check Java files or directories.
    Check {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Java files or directories to scan
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Score saved check reports against a ground-truth file.
    Eval {
        /// Directory of JSON reports, one per tool variant.
        #[arg(long)]
        results: PathBuf,
        /// Ground truth, one JSON object per line.
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the check repeatedly and measure output similarity.
    Stability {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of runs; at least 2
        #[arg(long)]
        runs: usize,
        /// Directory receiving each run's raw output.
        #[arg(long)]
        save_dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Java files or directories to scan
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Manage the response cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// Remove every cached response.
    Clear {
        /// Checker configuration whose cache directory is cleared
        #[arg(long)]
        config: Option<PathBuf>,
        /// Cache directory to clear; overrides the configuration
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Checker configuration XML
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Response cache directory; overrides the configuration
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Drop warnings; report errors only.
    #[arg(long)]
    pub no_warnings: bool,
    /// Use the built-in analyzer; never contact a model endpoint.
    #[arg(long, conflicts_with = "replay_dir")]
    pub offline: bool,
    /// Answer provider calls from recorded responses in this directory.
    #[arg(long)]
    pub replay_dir: Option<PathBuf>,
    /// Worker threads; defaults to the CPU count.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
        }
    }
}

fn read_config(path: Option<&Path>) -> anyhow::Result<ToolConfig> {
    match path {
        Some(p) => Ok(load_config(p)?),
        None => Ok(ToolConfig::default()),
    }
}

/// Loads the configuration and applies command-line overrides.
pub fn resolve_config(common: &CommonArgs) -> anyhow::Result<ToolConfig> {
    let mut cfg = read_config(common.config.as_deref())?;
    if let Some(dir) = &common.cache_dir {
        cfg.cache_dir = dir.clone();
    }
    if common.no_warnings {
        cfg.provider.show_warnings = false;
    }
    if common.offline {
        cfg.provider_kind = ProviderKind::Offline;
    } else if let Some(dir) = &common.replay_dir {
        cfg.provider_kind = ProviderKind::Replay;
        cfg.replay_dir = Some(dir.clone());
    }
    Ok(cfg)
}

fn sources(paths: &[PathBuf]) -> anyhow::Result<Vec<SourceFile>> {
    let files = collect_sources(paths)?;
    if files.is_empty() {
        bail!("no .java files found under the given paths");
    }
    Ok(files)
}

/// Prints token, cost and latency totals for provider calls to `err`.
fn write_usage(report: &RunReport, err: &mut dyn Write) -> std::io::Result<()> {
    let fresh: Vec<_> = report.audit.values().filter(|a| !a.from_cache).collect();
    if fresh.is_empty() {
        return Ok(());
    }
    let input: u64 = fresh.iter().map(|a| a.input_tokens).sum();
    let output: u64 = fresh.iter().map(|a| a.output_tokens).sum();
    let latencies: Vec<f64> = fresh.iter().map(|a| a.latency_seconds).collect();
    let lat = summarize_latency(&latencies).expect("non-empty");
    writeln!(
        err,
        "provider: {} calls, {} input / {} output tokens, estimated cost ${}, latency mean {:.2}s p50 {:.2}s p95 {:.2}s",
        fresh.len(),
        input,
        output,
        estimate_cost(input, output, &CostModel::default()),
        lat.mean,
        lat.p50,
        lat.p95
    )
}

/// Runs the check over `files`, writes the report to `out` and returns the
/// exit code.
pub fn check_with(
    pipeline: &Pipeline,
    files: &[SourceFile],
    format: OutputFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<i32> {
    let (report, _) = pipeline.run(files);
    emit_report(&report, format, out)?;
    for (path, reason) in &report.failures {
        writeln!(err, "{path}: skipped: {reason}")?;
    }
    write_usage(&report, err)?;
    Ok(report.exit_code())
}

/// One tool variant's scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRow {
    pub tool: String,
    pub metrics: MetricsSummary,
}

impl EvalRow {
    pub fn total_issues(&self) -> u64 {
        self.metrics.tp + self.metrics.fn_
    }
}

pub const TABLE_HEADER: [&str; 8] = [
    "Tool",
    "Total Issues",
    "True Pos.",
    "False Pos.",
    "False Neg.",
    "Precision",
    "Recall",
    "F-Measure",
];

/// Renders rows as an aligned comparison table.
pub fn render_table(rows: &[EvalRow]) -> String {
    let cells: Vec<[String; 8]> = rows
        .iter()
        .map(|r| {
            let m = &r.metrics;
            [
                r.tool.clone(),
                r.total_issues().to_string(),
                m.tp.to_string(),
                m.fp.to_string(),
                m.fn_.to_string(),
                m.precision_display(),
                m.recall_display(),
                m.f1_display(),
            ]
        })
        .collect();
    let mut widths = TABLE_HEADER.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut text = String::new();
    let mut line = |row: &[&str]| {
        let parts: Vec<String> = row
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        text.push_str(parts.join("  ").trim_end());
        text.push('\n');
    };
    line(&TABLE_HEADER);
    for row in &cells {
        line(&row.iter().map(String::as_str).collect::<Vec<_>>());
    }
    text
}

/// Scores every `*.json` report in `results` against the truth file. The
/// tool name is the report's file stem.
pub fn eval(results: &Path, truth: &Path, err: &mut dyn Write) -> anyhow::Result<Vec<EvalRow>> {
    let truth_text = std::fs::read_to_string(truth).with_context(|| format!("reading {}", truth.display()))?;
    let truth = parse_ground_truth(&truth_text).map_err(|e| anyhow::anyhow!("{}: {e}", truth.display()))?;
    let mut reports: Vec<PathBuf> = std::fs::read_dir(results)
        .with_context(|| format!("reading {}", results.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    reports.retain(|p| p.extension().is_some_and(|e| e == "json"));
    reports.sort();
    if reports.is_empty() {
        bail!("no .json reports in {}", results.display());
    }
    let mut rows = Vec::new();
    for path in reports {
        let report: RunReport = serde_json::from_slice(&std::fs::read(&path)?)
            .with_context(|| format!("{}: not a check report", path.display()))?;
        let tool = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        let missing: BTreeSet<&str> = truth
            .iter()
            .map(|t| t.file.as_str())
            .filter(|f| !report.per_file.contains_key(*f))
            .collect();
        for file in &missing {
            log::warn!("{tool}: ground truth references {file}, which the report does not cover");
            writeln!(
                err,
                "{tool}: no results for {file}; its entries count as false negatives"
            )?;
        }
        let predictions: Vec<Prediction> = report
            .per_file
            .iter()
            .flat_map(|(file, findings)| {
                findings
                    .iter()
                    .filter(|f| f.severity == Severity::Error)
                    .map(|f| Prediction {
                        file: file.clone(),
                        finding: f.clone(),
                    })
            })
            .collect();
        let result = match_findings(&predictions, &truth);
        rows.push(EvalRow {
            tool,
            metrics: compute_metrics(result.tp as u64, result.fp as u64, result.fn_ as u64),
        });
    }
    Ok(rows)
}

/// Repeats the pipeline `runs` times and compares the provider's raw output
/// across runs. Each run's output is the responses of all files in path
/// order, joined by newlines. Callers pass a pipeline without a cache.
pub fn stability_with(
    pipeline: &Pipeline,
    files: &[SourceFile],
    runs: usize,
    save_dir: Option<&Path>,
) -> anyhow::Result<StabilityReport> {
    if runs < 2 {
        bail!("--runs must be at least 2, got {runs}");
    }
    if let Some(dir) = save_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut outputs = Vec::with_capacity(runs);
    for i in 1..=runs {
        let (report, raw) = pipeline.run(files);
        if !report.failures.is_empty() {
            let (path, reason) = report.failures.iter().next().expect("non-empty");
            let saved = save_dir.map(|d| format!("; {} completed runs saved in {}", outputs.len(), d.display()));
            bail!("run {i}: {path}: {reason}{}", saved.unwrap_or_default());
        }
        let text = raw.into_values().collect::<Vec<_>>().join("\n");
        if let Some(dir) = save_dir {
            std::fs::write(dir.join(format!("run-{i}.txt")), &text)?;
        }
        outputs.push(text);
    }
    Ok(stability_report(&outputs)?)
}

fn write_stability(report: &StabilityReport, format: Format, out: &mut dyn Write) -> anyhow::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)?;
        }
        Format::Text => {
            writeln!(out, "runs: {}", report.runs)?;
            writeln!(
                out,
                "mean similarity with warnings: {:.2}",
                report.mean_ratio_with_warnings
            )?;
            writeln!(out, "mean similarity errors only: {:.2}", report.mean_ratio_errors_only)?;
        }
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<i32> {
    match cli.command {
        Command::Check { common, format, paths } => {
            let cfg = resolve_config(&common)?;
            let files = sources(&paths)?;
            let pipeline = Pipeline::from_config(&cfg)?.jobs(common.jobs.unwrap_or(0));
            check_with(&pipeline, &files, format.into(), out, err)
        }
        Command::Eval { results, truth, format } => {
            let rows = eval(&results, &truth, err)?;
            match format {
                Format::Text => write!(out, "{}", render_table(&rows))?,
                Format::Json => {
                    serde_json::to_writer_pretty(&mut *out, &rows)?;
                    writeln!(out)?;
                }
            }
            Ok(EXIT_CLEAN)
        }
        Command::Stability {
            common,
            runs,
            save_dir,
            format,
            paths,
        } => {
            if runs < 2 {
                bail!("--runs must be at least 2, got {runs}");
            }
            let cfg = resolve_config(&common)?;
            let files = sources(&paths)?;
            let pipeline = Pipeline::from_config(&cfg)?
                .without_cache()
                .jobs(common.jobs.unwrap_or(0));
            let report = stability_with(&pipeline, &files, runs, save_dir.as_deref())?;
            write_stability(&report, format, out)?;
            Ok(EXIT_CLEAN)
        }
        Command::Cache {
            action: CacheAction::Clear { config, cache_dir },
        } => {
            let cfg = read_config(config.as_deref())?;
            let dir = cache_dir.unwrap_or(cfg.cache_dir);
            let removed = ResponseCache::new(&dir).clear()?;
            writeln!(out, "removed {removed} cache entries from {}", dir.display())?;
            Ok(EXIT_CLEAN)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_TOOL_ERROR;
            }
            let _ = write!(out, "{text}");
            return EXIT_CLEAN;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_TOOL_ERROR
        }
    }
}
