//! Merged diagnostics, console formatting and the machine-readable run report.
//!
//! Each console line matches [`LINE_GRAMMAR`]:
//! `[ERROR] src/A.java:12:9: Method name 'x' .... [MethodName]`.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::finding::{first_quoted, Finding, Origin, Severity};

/// Regular expression every emitted diagnostic line matches. Groups:
/// severity, path, line, column, message, descriptor.
pub const LINE_GRAMMAR: &str = r"^\[(ERROR|WARN)\] (.+):(\d+):(\d+): (.*\.) \[([A-Za-z]+)\]$";

fn sort_key(f: &Finding) -> impl Ord + '_ {
    (
        f.line,
        f.column,
        f.descriptor,
        f.severity,
        f.section,
        f.message.as_str(),
        f.origin,
    )
}

fn dedupe_key(f: &Finding) -> (u32, crate::finding::Descriptor, Severity, Option<&str>) {
    (f.line, f.descriptor, f.severity, first_quoted(&f.message))
}

/// Union of both lists for one file, sorted by (line, column, descriptor).
/// A baseline finding duplicated by an augmented one is dropped in favour of
/// the augmented message.
pub fn merge_findings(baseline: Vec<Finding>, mut augmented: Vec<Finding>) -> Vec<Finding> {
    augmented.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
    let mut out: Vec<Finding> = baseline
        .into_iter()
        .filter(|b| !augmented.iter().any(|a| dedupe_key(a) == dedupe_key(b)))
        .collect();
    for a in augmented {
        if !out
            .iter()
            .any(|o| o.origin != Origin::Baseline && dedupe_key(o) == dedupe_key(&a))
        {
            out.push(a);
        }
    }
    out.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
    out
}

pub fn format_finding(path: &str, f: &Finding) -> String {
    let period = if f.message.ends_with('.') { "" } else { "." };
    format!(
        "[{}] {}:{}:{}: {}{} [{}]",
        f.severity.console_tag(),
        path,
        f.line,
        f.column.max(1),
        f.message,
        period,
        f.descriptor
    )
}

/// Provider metadata for one file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub latency_seconds: f64,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub from_cache: bool,
    /// Response lines that did not parse.
    #[serde(default)]
    pub diagnostics: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub errors: usize,
    pub warnings: usize,
    pub by_descriptor: BTreeMap<String, usize>,
}

impl Totals {
    pub fn compute<'a>(findings: impl IntoIterator<Item = &'a Finding>) -> Self {
        let mut t = Totals::default();
        for f in findings {
            match f.severity {
                Severity::Error => t.errors += 1,
                Severity::Warning => t.warnings += 1,
            }
            *t.by_descriptor.entry(f.descriptor.to_string()).or_default() += 1;
        }
        t
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Every analyzed file, including those without findings.
    pub per_file: BTreeMap<String, Vec<Finding>>,
    pub totals: Totals,
    pub audit: BTreeMap<String, AuditRecord>,
    /// Files that could not be analyzed, with the reason.
    pub failures: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_TOOL_ERROR: i32 = 2;

impl RunReport {
    pub fn new(
        per_file: BTreeMap<String, Vec<Finding>>,
        audit: BTreeMap<String, AuditRecord>,
        failures: BTreeMap<String, String>,
    ) -> Self {
        let totals = Totals::compute(per_file.values().flatten());
        RunReport {
            per_file,
            totals,
            audit,
            failures,
        }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} errors, {} warnings in {} files",
            self.totals.errors,
            self.totals.warnings,
            self.per_file.len()
        )
    }

    /// 2 when no file could be analyzed, 1 when findings exist, else 0.
    /// Failures on some files are reported but do not change the code.
    pub fn exit_code(&self) -> i32 {
        if self.per_file.is_empty() && !self.failures.is_empty() {
            EXIT_TOOL_ERROR
        } else if self.totals.errors + self.totals.warnings > 0 {
            EXIT_FINDINGS
        } else {
            EXIT_CLEAN
        }
    }
}

pub fn emit_report(report: &RunReport, format: OutputFormat, out: &mut dyn Write) -> io::Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, report).map_err(io::Error::other)?;
            writeln!(out)
        }
        OutputFormat::Text => {
            for (path, findings) in &report.per_file {
                for f in findings {
                    writeln!(out, "{}", format_finding(path, f))?;
                }
            }
            writeln!(out, "{}", report.summary_line())
        }
    }
}
