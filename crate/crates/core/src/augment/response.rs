use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::finding::{Finding, Origin, Section, Severity};

/// A non-blank response line that is not a finding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    /// 1-based line within the response text.
    pub response_line: usize,
    pub text: String,
    pub reason: String,
}

fn grammar() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^\s*\[\s*((?i:error|warning))\s*\]\s*\(\s*(\d+)\s*\)\s*\(\s*([0-9.]+)\s*\)\s*\((.*)\)\s*$")
            .expect("grammar compiles")
    })
}

/// Parses `[<sev>](<line>) (<section>) (<message>)` lines. Findings carry
/// column 1 and origin `Llm` until resolved against the source.
pub fn parse_response(raw: &str) -> (Vec<Finding>, Vec<ParseDiagnostic>) {
    let mut findings = Vec::new();
    let mut diagnostics = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let diag = |reason: String| ParseDiagnostic {
            response_line: idx + 1,
            text: line.to_string(),
            reason,
        };
        let Some(caps) = grammar().captures(line) else {
            diagnostics.push(diag("line does not match the response grammar".into()));
            continue;
        };
        let severity = if caps[1].eq_ignore_ascii_case("warning") {
            Severity::Warning
        } else {
            Severity::Error
        };
        let line_no = match caps[2].parse::<u32>() {
            Ok(n) if n > 0 => n,
            _ => {
                diagnostics.push(diag(format!("invalid line number '{}'", &caps[2])));
                continue;
            }
        };
        let section: Section = match caps[3].parse() {
            Ok(s) => s,
            Err(e) => {
                diagnostics.push(diag(e.to_string()));
                continue;
            }
        };
        findings.push(Finding {
            severity,
            line: line_no,
            column: 1,
            section,
            message: caps[4].trim().to_string(),
            descriptor: section.descriptor(),
            origin: Origin::Llm,
        });
    }
    (findings, diagnostics)
}

/// Formats a finding in the response grammar.
pub fn render(finding: &Finding) -> String {
    format!(
        "[{}]({}) ({}) ({})",
        finding.severity.response_tag(),
        finding.line,
        finding.section.id(),
        finding.message
    )
}
