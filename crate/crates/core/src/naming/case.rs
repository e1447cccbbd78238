use std::fmt;

use serde::{Deserialize, Serialize};

/// Default for the longest run of capitals allowed after the first
/// character of a camel-case identifier.
pub const DEFAULT_MAX_CONSECUTIVE_CAPS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseStyle {
    UpperCamelCase,
    LowerCamelCase,
    UpperSnakeCase,
    TypeVarSingle,
    TypeVarClassT,
    None,
}

impl fmt::Display for CaseStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseStyle::UpperCamelCase => "UpperCamelCase",
            CaseStyle::LowerCamelCase => "lowerCamelCase",
            CaseStyle::UpperSnakeCase => "UPPER_SNAKE_CASE",
            CaseStyle::TypeVarSingle => "a single capital letter with an optional numeral",
            CaseStyle::TypeVarClassT => "class-name form followed by T",
            CaseStyle::None => "no recognized style",
        })
    }
}

/// Longest run of consecutive ASCII capitals, ignoring the first character.
pub fn longest_caps_run_after_first(identifier: &str) -> usize {
    let mut longest = 0;
    let mut run = 0;
    for c in identifier.chars().skip(1) {
        if c.is_ascii_uppercase() {
            run += 1;
            longest = longest.max(run);
        } else {
            run = 0;
        }
    }
    longest
}

fn camel_body_ok(rest: &str) -> bool {
    rest.chars().all(|c| c.is_ascii_alphanumeric())
}

fn is_upper_camel(id: &str, max_caps: usize) -> bool {
    let mut chars = id.chars();
    chars.next().is_some_and(|c| c.is_ascii_uppercase())
        && camel_body_ok(chars.as_str())
        && longest_caps_run_after_first(id) <= max_caps
}

fn is_lower_camel(id: &str, max_caps: usize) -> bool {
    let mut chars = id.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && camel_body_ok(chars.as_str())
        && longest_caps_run_after_first(id) <= max_caps
}

fn is_type_var_single(id: &str) -> bool {
    let b = id.as_bytes();
    match b {
        [c] => c.is_ascii_uppercase(),
        [c, d] => c.is_ascii_uppercase() && d.is_ascii_digit(),
        _ => false,
    }
}

fn is_upper_snake(id: &str) -> bool {
    !id.is_empty()
        && id
            .split('_')
            .all(|part| !part.is_empty() && part.bytes().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit()))
}

/// Classifies an identifier; the first matching style wins in the order
/// single-letter type variable, `FooT` type variable, UPPER_SNAKE_CASE,
/// UpperCamelCase, lowerCamelCase.
pub fn classify_case(identifier: &str) -> CaseStyle {
    classify_case_with(identifier, DEFAULT_MAX_CONSECUTIVE_CAPS)
}

pub fn classify_case_with(identifier: &str, max_consecutive_caps: usize) -> CaseStyle {
    if is_type_var_single(identifier) {
        CaseStyle::TypeVarSingle
    } else if identifier.len() >= 2 && identifier.ends_with('T') && is_upper_camel(identifier, max_consecutive_caps) {
        CaseStyle::TypeVarClassT
    } else if is_upper_snake(identifier) {
        CaseStyle::UpperSnakeCase
    } else if is_upper_camel(identifier, max_consecutive_caps) {
        CaseStyle::UpperCamelCase
    } else if is_lower_camel(identifier, max_consecutive_caps) {
        CaseStyle::LowerCamelCase
    } else {
        CaseStyle::None
    }
}
