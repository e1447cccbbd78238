//! Model-assisted checks: prompt assembly, providers, response parsing and
//! the deterministic offline analyzer that stands in for a model.

mod offline;
mod prompt;
mod provider;
mod response;

pub use offline::analyze_offline;
pub use prompt::{build_prompt, prompt_version, PromptBundle, TEMPLATE};
pub use provider::{
    remote_request_count, InFlightLimiter, InFlightPermit, LlmResponse, OfflineProvider, Provider, ProviderConfig,
    ProviderError, ProviderRequest, RemoteProvider, ReplayMeta, ReplayProvider, SpyProvider,
};
pub use response::{parse_response, render, ParseDiagnostic};

use crate::extractor::{SourceModel, TokenKind};
use crate::finding::{Finding, Section, Severity};

/// Drops warnings unless `show_warnings`; order is preserved.
pub fn filter_warnings(findings: Vec<Finding>, show_warnings: bool) -> Vec<Finding> {
    if show_warnings {
        return findings;
    }
    findings
        .into_iter()
        .filter(|f| f.severity != Severity::Warning)
        .collect()
}

/// Sets each finding's column to the quoted token's position on its line,
/// or to the first comment on the line for comment findings; 1 otherwise.
pub fn resolve_columns(findings: &mut [Finding], model: &SourceModel) {
    for f in findings {
        let located = if f.section == Section::ImplementationComment {
            model
                .tokens
                .iter()
                .find(|t| t.line == f.line && matches!(t.kind, TokenKind::LineComment | TokenKind::BlockComment))
                .map(|t| t.column)
        } else {
            None
        };
        f.column = located
            .or_else(|| f.quoted_token().and_then(|tok| model.locate(f.line, tok)))
            .unwrap_or(1);
    }
}
