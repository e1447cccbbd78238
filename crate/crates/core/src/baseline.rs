//! Deterministic pattern checks equivalent to Checkstyle's Google
//! configuration for the targeted guidelines.
//!
//! The defaults reproduce that configuration's gaps as well as its
//! detections: `ConstantName` is not part of it, and `MemberName` only sees
//! instance fields, so a lowercase `static final int mod` passes.

use std::collections::BTreeMap;

use regex::Regex;
use thiserror::Error;

use crate::extractor::{CommentBlock, CommentKind, Declaration, DeclarationKind, SourceModel};
use crate::finding::{Descriptor, Finding, Origin, Section, Severity};
use crate::naming::{longest_caps_run_after_first, DEFAULT_MAX_CONSECUTIVE_CAPS};

pub const CLASS_PATTERN: &str = "^[A-Z][a-zA-Z0-9]*$";
pub const CAMEL_PATTERN: &str = "^[a-z]([a-z0-9][a-zA-Z0-9]*)?$";
pub const CONSTANT_PATTERN: &str = "^[A-Z][A-Z0-9]*(_[A-Z0-9]+)*$";
pub const TYPE_VARIABLE_PATTERN: &str = "(^[A-Z][0-9]?$)|(^[A-Z][a-zA-Z0-9]*T$)";

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("invalid pattern for {descriptor}: {source}")]
    InvalidPattern {
        descriptor: Descriptor,
        #[source]
        source: regex::Error,
    },
    #[error("{0} is not a name-pattern check")]
    NotAPatternCheck(Descriptor),
    #[error("maximum consecutive capitals must be at least 1")]
    InvalidCapsLimit,
}

/// One name-pattern check.
#[derive(Debug, Clone)]
pub struct RegexRule {
    pub descriptor: Descriptor,
    pub kind: DeclarationKind,
    pub pattern: Regex,
    /// Message prefix before the quoted name, e.g. `Parameter name`.
    pub label: &'static str,
}

impl RegexRule {
    fn applies_to(&self, decl: &Declaration) -> bool {
        // MemberName covers instance fields only.
        decl.kind == self.kind && !(self.descriptor == Descriptor::MemberName && decl.modifiers.contains("static"))
    }

    pub fn message(&self, name: &str) -> String {
        format!(
            "{} '{}' must match pattern '{}'",
            self.label,
            name,
            self.pattern.as_str()
        )
    }
}

/// Pattern overrides and thresholds; empty means the Google defaults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineConfig {
    /// Descriptor → replacement pattern. Naming `ConstantName` here enables it.
    pub overrides: BTreeMap<Descriptor, String>,
    pub max_consecutive_caps: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            overrides: BTreeMap::new(),
            max_consecutive_caps: DEFAULT_MAX_CONSECUTIVE_CAPS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Baseline {
    rules: Vec<RegexRule>,
    max_consecutive_caps: usize,
}

fn rule_spec(descriptor: Descriptor) -> Option<(DeclarationKind, &'static str, &'static str)> {
    Some(match descriptor {
        Descriptor::ClassName => (DeclarationKind::Class, "Type name", CLASS_PATTERN),
        Descriptor::MethodName => (DeclarationKind::Method, "Method name", CAMEL_PATTERN),
        Descriptor::ConstantName => (DeclarationKind::ConstantField, "Constant name", CONSTANT_PATTERN),
        Descriptor::MemberName => (DeclarationKind::NonConstantField, "Member name", CAMEL_PATTERN),
        Descriptor::ParameterName => (DeclarationKind::Parameter, "Parameter name", CAMEL_PATTERN),
        Descriptor::LocalVariableName => (DeclarationKind::LocalVariable, "Local variable name", CAMEL_PATTERN),
        Descriptor::ClassTypeParameterName => (
            DeclarationKind::TypeVariable,
            "Type parameter name",
            TYPE_VARIABLE_PATTERN,
        ),
        _ => return None,
    })
}

const DEFAULT_ENABLED: [Descriptor; 6] = [
    Descriptor::ClassName,
    Descriptor::MethodName,
    Descriptor::MemberName,
    Descriptor::ParameterName,
    Descriptor::LocalVariableName,
    Descriptor::ClassTypeParameterName,
];

impl Baseline {
    pub fn new(config: &BaselineConfig) -> Result<Self, BaselineError> {
        if config.max_consecutive_caps < 1 {
            return Err(BaselineError::InvalidCapsLimit);
        }
        for d in config.overrides.keys() {
            if rule_spec(*d).is_none() {
                return Err(BaselineError::NotAPatternCheck(*d));
            }
        }
        let mut descriptors: Vec<Descriptor> = DEFAULT_ENABLED.to_vec();
        if config.overrides.contains_key(&Descriptor::ConstantName) {
            descriptors.push(Descriptor::ConstantName);
        }
        let mut rules = Vec::new();
        for descriptor in descriptors {
            let (kind, label, default) = rule_spec(descriptor).expect("pattern descriptor");
            let source = config.overrides.get(&descriptor).map_or(default, String::as_str);
            let pattern = Regex::new(source).map_err(|source| BaselineError::InvalidPattern { descriptor, source })?;
            rules.push(RegexRule {
                descriptor,
                kind,
                pattern,
                label,
            });
        }
        Ok(Baseline {
            rules,
            max_consecutive_caps: config.max_consecutive_caps,
        })
    }

    pub fn google() -> Self {
        Self::new(&BaselineConfig::default()).expect("default patterns compile")
    }

    pub fn rules(&self) -> &[RegexRule] {
        &self.rules
    }

    /// All baseline checks, sorted by (line, column, descriptor).
    pub fn check(&self, model: &SourceModel) -> Vec<Finding> {
        let mut out = check_name_patterns(model, &self.rules);
        out.extend(check_abbreviation_as_word(model, self.max_consecutive_caps));
        out.extend(check_summary_javadoc(model));
        out.sort_by_key(|f| (f.line, f.column, f.descriptor));
        out
    }
}

pub fn section_for(kind: DeclarationKind) -> Section {
    match kind {
        DeclarationKind::Class => Section::ClassName,
        DeclarationKind::Method => Section::MethodName,
        DeclarationKind::ConstantField => Section::ConstantName,
        DeclarationKind::NonConstantField => Section::NonConstantFieldName,
        DeclarationKind::Parameter => Section::ParameterName,
        DeclarationKind::LocalVariable => Section::LocalVariableName,
        DeclarationKind::TypeVariable => Section::TypeVariableName,
    }
}

fn error(line: u32, column: u32, section: Section, descriptor: Descriptor, message: String) -> Finding {
    Finding {
        severity: Severity::Error,
        line,
        column,
        section,
        message,
        descriptor,
        origin: Origin::Baseline,
    }
}

pub fn check_name_patterns(model: &SourceModel, rules: &[RegexRule]) -> Vec<Finding> {
    let mut out = Vec::new();
    for decl in &model.declarations {
        for rule in rules.iter().filter(|r| r.applies_to(decl)) {
            if !rule.pattern.is_match(&decl.name) {
                out.push(error(
                    decl.line,
                    decl.column,
                    section_for(decl.kind),
                    rule.descriptor,
                    rule.message(&decl.name),
                ));
            }
        }
    }
    out
}

/// Flags class, method and instance-field names whose longest capital run
/// after the first character exceeds `max_consecutive_caps`.
pub fn check_abbreviation_as_word(model: &SourceModel, max_consecutive_caps: usize) -> Vec<Finding> {
    model
        .declarations
        .iter()
        .filter(|d| match d.kind {
            DeclarationKind::Class | DeclarationKind::Method => true,
            DeclarationKind::NonConstantField => !d.modifiers.contains("static"),
            _ => false,
        })
        .filter(|d| longest_caps_run_after_first(&d.name) > max_consecutive_caps)
        .map(|d| {
            error(
                d.line,
                d.column,
                section_for(d.kind),
                Descriptor::AbbreviationAsWordInName,
                format!(
                    "Abbreviation in name '{}' must contain no more than '{}' consecutive capital letters",
                    d.name, max_consecutive_caps
                ),
            )
        })
        .collect()
}

/// The summary paragraph of a Javadoc comment: text before the first blank
/// line or block tag, with comment markers removed and inline tags replaced
/// by their content. `None` for `{@inheritDoc}` comments.
pub fn summary_fragment(javadoc: &str) -> Option<String> {
    let body = javadoc.strip_prefix("/**").unwrap_or(javadoc);
    let body = body.strip_suffix("*/").unwrap_or(body);
    let mut lines = Vec::new();
    for raw in body.lines() {
        let line = raw.trim_start();
        let line = line.strip_prefix('*').unwrap_or(line).trim();
        if line.starts_with('@') {
            break;
        }
        if line.is_empty() {
            if lines.is_empty() {
                continue;
            }
            break;
        }
        lines.push(line.to_string());
    }
    let joined = lines.join(" ");
    if joined.contains("{@inheritDoc}") {
        return None;
    }
    Some(strip_inline_tags(&joined).trim().to_string())
}

fn strip_inline_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(start) = rest.find("{@") {
        out.push_str(&rest[..start]);
        let tail = &rest[start + 2..];
        let Some(end) = tail.find('}') else {
            out.push_str(&rest[start..]);
            return out;
        };
        let inner = &tail[..end];
        let content = inner.split_once(char::is_whitespace).map_or("", |(_, c)| c.trim());
        out.push_str(content);
        rest = &tail[end + 1..];
    }
    out.push_str(rest);
    out
}

fn summary_problem(block: &CommentBlock) -> Option<String> {
    let fragment = summary_fragment(&block.text)?;
    let first_word = fragment.split_whitespace().next();
    let Some(first_word) = first_word else {
        return Some("Summary javadoc is missing".to_string());
    };
    if fragment
        .chars()
        .find(|c| c.is_alphabetic())
        .is_some_and(char::is_lowercase)
    {
        return Some(format!(
            "First sentence of Javadoc must begin with a capital letter: '{first_word}'"
        ));
    }
    if !fragment.ends_with(['.', '!', '?']) {
        let last_word = fragment.split_whitespace().last().unwrap_or(first_word);
        return Some(format!(
            "First sentence of Javadoc is missing an ending period: '{last_word}'"
        ));
    }
    None
}

pub fn check_summary_javadoc(model: &SourceModel) -> Vec<Finding> {
    model
        .comments
        .iter()
        .filter(|c| c.kind == CommentKind::Javadoc)
        .filter_map(|c| {
            summary_problem(c).map(|message| {
                error(
                    c.start_line,
                    c.column,
                    Section::SummaryFragment,
                    Descriptor::SummaryJavadoc,
                    message,
                )
            })
        })
        .collect()
}
