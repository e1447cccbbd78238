//! Constant versus non-constant field classification.
//!
//! A field is a constant when it is `static final` and its value is deeply
//! immutable: an immutable declared type whose type arguments are immutable
//! too, and no initializer that builds a mutable object.

use std::collections::HashSet;
use std::path::Path;

use super::declarations::{Declaration, DeclarationKind};

const BUNDLED: &str = include_str!("../../data/immutable_types.txt");

/// Immutable type allowlist, keyed by simple type name.
#[derive(Debug, Clone)]
pub struct ImmutableTypes {
    names: HashSet<String>,
}

impl ImmutableTypes {
    pub fn bundled() -> Self {
        Self::from_list(BUNDLED)
    }

    /// Parses one type name per line; `#` starts a comment.
    pub fn from_list(text: &str) -> Self {
        let names = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect();
        ImmutableTypes { names }
    }

    /// Bundled list extended with the entries of `path`.
    pub fn with_file(path: &Path) -> std::io::Result<Self> {
        let mut types = Self::bundled();
        let extra = Self::from_list(&std::fs::read_to_string(path)?);
        types.names.extend(extra.names);
        Ok(types)
    }

    pub fn contains(&self, simple_name: &str) -> bool {
        simple_name.starts_with("Immutable") || self.names.contains(simple_name)
    }
}

impl Default for ImmutableTypes {
    fn default() -> Self {
        Self::bundled()
    }
}

/// A parsed type reference: `java.util.Map<String, List<X>>[]`.
#[derive(Debug, PartialEq)]
struct TypeRef {
    simple: String,
    args: Vec<TypeRef>,
    dims: usize,
}

fn parse_type_ref(text: &str) -> Option<TypeRef> {
    let text = text.trim();
    let (mut base, rest) = match text.find('<') {
        Some(open) => (&text[..open], &text[open..]),
        None => (text, ""),
    };
    let mut dims = 0;
    let mut args = Vec::new();
    let mut tail = rest;
    if !rest.is_empty() {
        let close = matching_angle(rest)?;
        for part in split_top_level(&rest[1..close]) {
            let part = part.trim();
            // `?`, `? extends X`, `? super X`
            let part = part
                .strip_prefix('?')
                .map(|p| p.trim_start().trim_start_matches("extends").trim_start_matches("super"))
                .unwrap_or(part);
            if part.trim().is_empty() {
                // Unbounded wildcard: no immutability guarantee.
                args.push(TypeRef {
                    simple: "?".into(),
                    args: Vec::new(),
                    dims: 0,
                });
            } else {
                args.push(parse_type_ref(part)?);
            }
        }
        tail = &rest[close + 1..];
    }
    while let Some(stripped) = base.trim_end().strip_suffix("[]") {
        base = stripped;
        dims += 1;
    }
    dims += tail.matches("[]").count();
    dims += tail.matches("...").count();
    let simple = base.trim().rsplit('.').next()?.to_string();
    Some(TypeRef { simple, args, dims })
}

fn matching_angle(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '<' => depth += 1,
            '>' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '<' => depth += 1,
            '>' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn deeply_immutable(ty: &TypeRef, allow: &ImmutableTypes, enums: &[String]) -> bool {
    ty.dims == 0 && base_immutable(&ty.simple, allow, enums) && args_immutable(ty, allow, enums)
}

fn base_immutable(simple: &str, allow: &ImmutableTypes, enums: &[String]) -> bool {
    allow.contains(simple) || enums.iter().any(|e| e == simple)
}

fn args_immutable(ty: &TypeRef, allow: &ImmutableTypes, enums: &[String]) -> bool {
    ty.args.iter().all(|a| deeply_immutable(a, allow, enums))
}

/// Factories known to return unmodifiable containers.
fn is_immutable_factory(init: &[&str]) -> bool {
    match init {
        [owner, ".", method, ..] => {
            owner.starts_with("Immutable")
                || (matches!(*owner, "List" | "Set" | "Map") && matches!(*method, "of" | "copyOf" | "ofEntries"))
                || (*owner == "Collections" && (method.starts_with("unmodifiable") || method.starts_with("empty")))
        }
        _ => false,
    }
}

/// Decides whether a field declaration is a constant.
pub fn classify_constant(field: &Declaration, allow: &ImmutableTypes, enums: &[String]) -> DeclarationKind {
    use DeclarationKind::{ConstantField, NonConstantField};
    if !(field.modifiers.contains("static") && field.modifiers.contains("final")) {
        return NonConstantField;
    }
    let Some(ty) = parse_type_ref(&field.declared_type) else {
        return NonConstantField;
    };
    let init_text = field.initializer.as_deref().unwrap_or("");
    let init: Vec<&str> = init_text.split_whitespace().collect();

    if ty.dims > 0 {
        // An array is only constant while it has no elements to mutate.
        let empty = matches!(init.as_slice(), ["{", "}"])
            || (init.first() == Some(&"new") && init_text.contains("[ 0 ]") && !init_text.contains('{'));
        return if empty { ConstantField } else { NonConstantField };
    }

    if let ["new", created, ..] = init.as_slice() {
        if !base_immutable(created, allow, enums) {
            return NonConstantField;
        }
    }
    if !args_immutable(&ty, allow, enums) {
        return NonConstantField;
    }
    if base_immutable(&ty.simple, allow, enums) || is_immutable_factory(&init) {
        ConstantField
    } else {
        NonConstantField
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractor::declarations::extract_declarations;
    use crate::extractor::tokenize::tokenize;

    fn classify(field_src: &str) -> DeclarationKind {
        let src = format!("class Holder {{ {field_src} }}");
        let ex = extract_declarations(&tokenize(&src), &ImmutableTypes::bundled());
        let field = ex
            .declarations
            .iter()
            .find(|d| {
                matches!(
                    d.kind,
                    DeclarationKind::ConstantField | DeclarationKind::NonConstantField
                )
            })
            .expect("field");
        field.kind
    }

    use DeclarationKind::{ConstantField, NonConstantField};

    #[test]
    fn constant_examples() {
        for src in [
            "static final int NUMBER = 5;",
            "static final int VARIABLE_2 = 11;",
            "static final ImmutableList<String> NAMES = ImmutableList.of(\"Ed\", \"Ann\");",
            "static final Map<String, Integer> AGES = ImmutableMap.of(\"Ed\", 35, \"Ann\", 32);",
            "static final Joiner COMMA_JOINER = Joiner.on(',');",
            "static final SomeMutableType[] EMPTY_ARRAY = {};",
        ] {
            assert_eq!(classify(src), ConstantField, "{src}");
        }
    }

    #[test]
    fn non_constant_examples() {
        for src in [
            "static String nonFinal = \"non-final\";",
            "final String nonStatic = \"non-static\";",
            "static final Set<String> mutableCollection = new HashSet<String>();",
            "static final ImmutableSet<SomeMutableType> mutableElements = ImmutableSet.of(mutable);",
            "static final ImmutableMap<String, SomeMutableType> mutValues = ImmutableMap.of(\"Ed\", mutInstance, \"Ann\", mutInstance2);",
            "static final Logger logger = Logger.getLogger(MyClass.getName());",
            "static final String[] nonEmptyArray = {\"these\", \"can\", \"change\"};",
        ] {
            assert_eq!(classify(src), NonConstantField, "{src}");
        }
    }

    #[test]
    fn enum_typed_fields_are_constants() {
        let src = "class A { static final Mode DEFAULT_MODE = Mode.FAST; enum Mode { FAST, SLOW } }";
        let ex = extract_declarations(&tokenize(src), &ImmutableTypes::bundled());
        let d = ex.declarations.iter().find(|d| d.name == "DEFAULT_MODE").unwrap();
        assert_eq!(d.kind, ConstantField);
    }

    #[test]
    fn allowlist_file_extends_bundle() {
        let types = ImmutableTypes::from_list("# comment\nMoney  # value type\n\n");
        assert!(types.contains("Money"));
        assert!(types.contains("ImmutableAnything"));
        assert!(!types.contains("HashMap"));
    }

    #[test]
    fn type_refs() {
        let t = parse_type_ref("java.util.Map<String, List<Integer>>").unwrap();
        assert_eq!(t.simple, "Map");
        assert_eq!(t.args.len(), 2);
        assert_eq!(t.args[1].args[0].simple, "Integer");
        assert_eq!(parse_type_ref("int[][]").unwrap().dims, 2);
        assert_eq!(parse_type_ref("List<int[]>[]").unwrap().dims, 1);
    }
}
