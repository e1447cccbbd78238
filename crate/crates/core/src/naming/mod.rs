//! Camel-case naming: prose conversion, case-style classification,
//! lexicon-based word segmentation and rename suggestions.

mod case;
mod convert;
mod segment;

pub use case::{
    classify_case, classify_case_with, longest_caps_run_after_first, CaseStyle, DEFAULT_MAX_CONSECUTIVE_CAPS,
};
pub use convert::{fold_to_ascii, to_camel_case, CamelStyle, NameError, ProseName};
pub use segment::{segment_identifier, LexiconError, SegmentationLexicon};

/// Suggests a rename of `identifier` in the `expected` style, or `None` when
/// the identifier cannot be segmented or no suggestion of that style exists.
/// A returned suggestion always classifies as `expected` and segments back
/// to the same words, so applying `suggest_fix` to it is a no-op.
pub fn suggest_fix(identifier: &str, expected: CaseStyle, lexicon: &SegmentationLexicon) -> Option<String> {
    let words = segment_identifier(identifier, lexicon)?;
    let camel = |style| {
        ProseName::new(words.iter().cloned())
            .ok()
            .map(|n| to_camel_case(&n, style))
    };
    let mut expected_words = words.clone();
    let candidate = match expected {
        CaseStyle::UpperCamelCase => camel(CamelStyle::Upper)?,
        CaseStyle::LowerCamelCase => camel(CamelStyle::Lower)?,
        CaseStyle::UpperSnakeCase => words
            .iter()
            .map(|w| w.to_ascii_uppercase())
            .collect::<Vec<_>>()
            .join("_"),
        CaseStyle::TypeVarSingle => {
            let b = identifier.as_bytes();
            let shaped = match b {
                [c] => c.is_ascii_alphabetic(),
                [c, d] => c.is_ascii_alphabetic() && d.is_ascii_digit(),
                _ => false,
            };
            if !shaped {
                return None;
            }
            identifier.to_ascii_uppercase()
        }
        CaseStyle::TypeVarClassT => {
            let mut s = camel(CamelStyle::Upper)?;
            if words.last().map(String::as_str) != Some("t") {
                s.push('T');
                expected_words.push("t".to_string());
            }
            s
        }
        CaseStyle::None => return None,
    };
    let stable = segment_identifier(&candidate, lexicon).as_ref() == Some(&expected_words);
    (stable && classify_case(&candidate) == expected).then_some(candidate)
}
