use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finding::{quotes_token, Finding, Section, Severity};

/// One labeled violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthEntry {
    pub file: String,
    pub line: u32,
    pub section: Section,
    pub token: String,
    #[serde(default = "default_severity")]
    pub severity: Severity,
}

fn default_severity() -> Severity {
    Severity::Error
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("ground truth line {line}: {message}")]
pub struct SchemaError {
    pub line: usize,
    pub message: String,
}

/// Parses JSON Lines; blank lines are skipped.
pub fn parse_ground_truth(text: &str) -> Result<Vec<GroundTruthEntry>, SchemaError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let err = |message: String| SchemaError { line: idx + 1, message };
        let entry: GroundTruthEntry = serde_json::from_str(raw).map_err(|e| err(e.to_string()))?;
        if entry.token.is_empty() {
            return Err(err("token is empty".into()));
        }
        if entry.line == 0 {
            return Err(err("line must be at least 1".into()));
        }
        out.push(entry);
    }
    Ok(out)
}

/// A finding with the file it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub file: String,
    pub finding: Finding,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchResult {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    /// (prediction index, truth index) for every true positive.
    pub pairs: Vec<(usize, usize)>,
}

pub const LINE_TOLERANCE: u32 = 2;

pub fn is_match(p: &Prediction, t: &GroundTruthEntry) -> bool {
    p.file == t.file
        && p.finding.section == t.section
        && p.finding.line.abs_diff(t.line) <= LINE_TOLERANCE
        && quotes_token(&p.finding.message, &t.token)
}

/// Greedy one-to-one matching of Error predictions against Error truths.
/// Predictions are taken in input order; each claims the unmatched truth
/// with the smallest line distance, earliest index first.
pub fn match_findings(predicted: &[Prediction], truth: &[GroundTruthEntry]) -> MatchResult {
    let scored_truth: Vec<usize> = (0..truth.len())
        .filter(|&i| truth[i].severity == Severity::Error)
        .collect();
    let mut taken = vec![false; truth.len()];
    let mut result = MatchResult::default();
    for (pi, p) in predicted.iter().enumerate() {
        if p.finding.severity != Severity::Error {
            continue;
        }
        let best = scored_truth
            .iter()
            .copied()
            .filter(|&ti| !taken[ti] && is_match(p, &truth[ti]))
            .min_by_key(|&ti| (p.finding.line.abs_diff(truth[ti].line), ti));
        match best {
            Some(ti) => {
                taken[ti] = true;
                result.tp += 1;
                result.pairs.push((pi, ti));
            }
            None => result.fp += 1,
        }
    }
    result.fn_ = scored_truth.len() - result.tp;
    result
}
