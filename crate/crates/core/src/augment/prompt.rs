use sha2::{Digest, Sha256};

use crate::finding::Section;

/// The instruction template sent ahead of every source file.
pub const TEMPLATE: &str = include_str!("../../data/prompt.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptBundle {
    /// Template, a newline, then the source verbatim.
    pub text: String,
    pub prompt_version: String,
    pub target_sections: Vec<Section>,
}

/// Hex SHA-256 of the template; changes whenever the template does.
pub fn prompt_version() -> String {
    hex::encode(Sha256::digest(TEMPLATE.as_bytes()))
}

pub fn build_prompt(source: &str) -> PromptBundle {
    let mut text = String::with_capacity(TEMPLATE.len() + 1 + source.len());
    text.push_str(TEMPLATE);
    text.push('\n');
    text.push_str(source);
    PromptBundle {
        text,
        prompt_version: prompt_version(),
        target_sections: Section::ALL.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_source() {
        assert_eq!(build_prompt("").text, format!("{TEMPLATE}\n"));
    }

    #[test]
    fn deterministic() {
        let src = "class A {}\n";
        let a = build_prompt(src);
        let b = build_prompt(src);
        assert_eq!(a, b);
        assert!(a.text.ends_with(src));
        assert!(a.text.starts_with(TEMPLATE));
        assert_eq!(a.prompt_version.len(), 64);
    }

    #[test]
    fn template_contents() {
        assert!(TEMPLATE.contains("respond with one single space"));
        assert!(TEMPLATE.trim_end().ends_with("JAVA CODE:"));
        let ids: Vec<&str> = build_prompt("").target_sections.iter().map(|s| s.id()).collect();
        assert_eq!(
            ids,
            ["1.1.1", "1.1.2", "2.1.1", "2.2.1", "2.3.1", "2.3.2", "2.4.1", "2.5.1", "2.6.1"]
        );
        for id in ids {
            assert!(TEMPLATE.contains(id), "{id}");
        }
    }
}
