use crate::baseline::section_for;
use crate::extractor::{CommentBlock, CommentKind, Declaration, DeclarationKind, SourceModel};
use crate::finding::{Finding, Origin, Section, Severity};
use crate::naming::{
    classify_case, segment_identifier, suggest_fix, to_camel_case, CamelStyle, CaseStyle, ProseName,
    SegmentationLexicon,
};

fn kind_label(kind: DeclarationKind) -> &'static str {
    match kind {
        DeclarationKind::Class => "Class",
        DeclarationKind::Method => "Method",
        DeclarationKind::ConstantField => "Constant",
        DeclarationKind::NonConstantField => "Non-constant field",
        DeclarationKind::Parameter => "Parameter",
        DeclarationKind::LocalVariable => "Local variable",
        DeclarationKind::TypeVariable => "Type variable",
    }
}

/// Styles a name of this kind may take; the first is the one suggested.
fn accepted_styles(kind: DeclarationKind) -> &'static [CaseStyle] {
    use CaseStyle::*;
    match kind {
        DeclarationKind::Class => &[UpperCamelCase, TypeVarClassT, TypeVarSingle],
        DeclarationKind::ConstantField => &[UpperSnakeCase, TypeVarSingle],
        DeclarationKind::TypeVariable => &[TypeVarSingle, TypeVarClassT],
        _ => &[LowerCamelCase],
    }
}

fn finding(severity: Severity, decl: &Declaration, section: Section, message: String) -> Finding {
    Finding {
        severity,
        line: decl.line,
        column: decl.column,
        section,
        message,
        descriptor: section.descriptor(),
        origin: Origin::Offline,
    }
}

/// Removes underscores that separate a digit from its neighbor.
fn without_digit_separators(name: &str) -> String {
    let b = name.as_bytes();
    let mut out = String::with_capacity(name.len());
    for (i, &c) in b.iter().enumerate() {
        let digit_adjacent = (i > 0 && b[i - 1].is_ascii_digit()) || b.get(i + 1).is_some_and(u8::is_ascii_digit);
        if c == b'_' && digit_adjacent {
            continue;
        }
        out.push(c as char);
    }
    out
}

/// Whether `name` is exactly the camel rendering of its own words. This
/// admits single-letter words next to a capital (`remBNew`) while still
/// rejecting acronyms (`newCustomerID`).
fn is_canonical_camel(name: &str, style: CaseStyle, lexicon: &SegmentationLexicon) -> bool {
    let camel = match style {
        CaseStyle::UpperCamelCase => CamelStyle::Upper,
        CaseStyle::LowerCamelCase => CamelStyle::Lower,
        _ => return false,
    };
    segment_identifier(name, lexicon)
        .and_then(|words| ProseName::new(words).ok())
        .is_some_and(|prose| to_camel_case(&prose, camel) == name)
}

fn check_name(decl: &Declaration, lexicon: &SegmentationLexicon) -> Option<Finding> {
    let section = section_for(decl.kind);
    let label = kind_label(decl.kind);
    let name = decl.name.as_str();
    let accepted = accepted_styles(decl.kind);
    let mut actual = classify_case(name);
    if actual == CaseStyle::None && is_canonical_camel(name, accepted[0], lexicon) {
        actual = accepted[0];
    }

    if !accepted.contains(&actual) {
        let expected = accepted[0];
        let message = match suggest_fix(name, expected, lexicon) {
            Some(fix) => format!("{label} name '{name}' should be written in {expected}, for example '{fix}'"),
            None => format!("{label} name '{name}' should be written in {expected}"),
        };
        return Some(finding(Severity::Error, decl, section, message));
    }

    if let Some(fix) = suggest_fix(name, actual, lexicon).filter(|f| f != name) {
        if actual == CaseStyle::UpperSnakeCase && without_digit_separators(&fix) == name {
            return Some(finding(
                Severity::Warning,
                decl,
                section,
                format!("{label} name '{name}' should separate numbers with underscores, for example '{fix}'"),
            ));
        }
        return Some(finding(
            Severity::Error,
            decl,
            section,
            format!("{label} name '{name}' should be written in {actual}, for example '{fix}'"),
        ));
    }

    if name.chars().count() == 1 && decl.kind != DeclarationKind::TypeVariable {
        return Some(finding(
            Severity::Warning,
            decl,
            section,
            format!("{label} name '{name}' is a single character; use a more descriptive name"),
        ));
    }
    None
}

/// Commented-out code rather than prose.
fn looks_like_code(text: &str) -> bool {
    let body = text
        .lines()
        .map(|l| {
            l.trim()
                .trim_start_matches("//")
                .trim_start_matches("/*")
                .trim_end_matches("*/")
                .trim()
        })
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>();
    !body.is_empty() && body.iter().all(|l| l.ends_with([';', '{', '}']))
}

fn same_decl(a: &Declaration, b: &Declaration) -> bool {
    a.kind == b.kind && a.name == b.name && a.line == b.line && a.column == b.column
}

fn check_comment(block: &CommentBlock, comments: &[CommentBlock]) -> Option<Finding> {
    if block.kind == CommentKind::Javadoc || block.trailing || looks_like_code(&block.text) {
        return None;
    }
    let decl = block.attached_declaration.as_ref()?;
    if !matches!(decl.kind, DeclarationKind::Class | DeclarationKind::Method) {
        return None;
    }
    let documented = comments
        .iter()
        .any(|c| c.kind == CommentKind::Javadoc && c.attached_declaration.as_ref().is_some_and(|d| same_decl(d, decl)));
    if documented {
        return None;
    }
    let what = if decl.kind == DeclarationKind::Class {
        "class"
    } else {
        "method"
    };
    let section = Section::ImplementationComment;
    Some(Finding {
        severity: Severity::Error,
        line: block.start_line,
        column: block.column,
        section,
        message: format!(
            "Implementation comment documents {what} '{}'; convert it to a Javadoc comment starting with /**",
            decl.name
        ),
        descriptor: section.descriptor(),
        origin: Origin::Offline,
    })
}

/// Deterministic findings in the same schema as parsed model output,
/// sorted by (line, column, section).
pub fn analyze_offline(model: &SourceModel, lexicon: &SegmentationLexicon) -> Vec<Finding> {
    let mut out: Vec<Finding> = model
        .declarations
        .iter()
        .filter_map(|d| check_name(d, lexicon))
        .collect();
    out.extend(model.comments.iter().filter_map(|c| check_comment(c, &model.comments)));
    out.sort_by_key(|f| (f.line, f.column, f.section));
    out
}
