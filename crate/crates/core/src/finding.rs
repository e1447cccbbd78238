//! Diagnostic types shared by the deterministic checks, the model-assisted
//! path and the report writer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    /// Token used in the response grammar (`[Error]`, `[Warning]`).
    pub fn response_tag(self) -> &'static str {
        match self {
            Severity::Error => "Error",
            Severity::Warning => "Warning",
        }
    }

    /// Token used in console output (`[ERROR]`, `[WARN]`).
    pub fn console_tag(self) -> &'static str {
        match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARN",
        }
    }
}

/// Which path produced a finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Baseline,
    Llm,
    Offline,
}

/// The nine targeted guideline sections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Section {
    SummaryFragment,
    ImplementationComment,
    ClassName,
    MethodName,
    ConstantName,
    NonConstantFieldName,
    ParameterName,
    LocalVariableName,
    TypeVariableName,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown guideline section '{0}'")]
pub struct UnknownSection(pub String);

impl Section {
    pub const ALL: [Section; 9] = [
        Section::SummaryFragment,
        Section::ImplementationComment,
        Section::ClassName,
        Section::MethodName,
        Section::ConstantName,
        Section::NonConstantFieldName,
        Section::ParameterName,
        Section::LocalVariableName,
        Section::TypeVariableName,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Section::SummaryFragment => "1.1.1",
            Section::ImplementationComment => "1.1.2",
            Section::ClassName => "2.1.1",
            Section::MethodName => "2.2.1",
            Section::ConstantName => "2.3.1",
            Section::NonConstantFieldName => "2.3.2",
            Section::ParameterName => "2.4.1",
            Section::LocalVariableName => "2.5.1",
            Section::TypeVariableName => "2.6.1",
        }
    }

    /// Checkstyle-style descriptor tag for findings in this section.
    pub fn descriptor(self) -> Descriptor {
        match self {
            Section::SummaryFragment => Descriptor::SummaryJavadoc,
            Section::ImplementationComment => Descriptor::JavadocRequired,
            Section::ClassName => Descriptor::ClassName,
            Section::MethodName => Descriptor::MethodName,
            Section::ConstantName => Descriptor::ConstantName,
            Section::NonConstantFieldName => Descriptor::MemberName,
            Section::ParameterName => Descriptor::ParameterName,
            Section::LocalVariableName => Descriptor::LocalVariableName,
            Section::TypeVariableName => Descriptor::ClassTypeParameterName,
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Section {
    type Err = UnknownSection;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Section::ALL
            .into_iter()
            .find(|sec| sec.id() == s)
            .ok_or_else(|| UnknownSection(s.to_string()))
    }
}

impl Serialize for Section {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.id())
    }
}

impl<'de> Deserialize<'de> for Section {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Maps a section id to its descriptor tag.
pub fn map_descriptor(section: &str) -> Result<Descriptor, UnknownSection> {
    section.parse::<Section>().map(Section::descriptor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Descriptor {
    SummaryJavadoc,
    JavadocRequired,
    ClassName,
    MethodName,
    ConstantName,
    MemberName,
    ParameterName,
    LocalVariableName,
    ClassTypeParameterName,
    AbbreviationAsWordInName,
}

impl Descriptor {
    pub fn name(self) -> &'static str {
        match self {
            Descriptor::SummaryJavadoc => "SummaryJavadoc",
            Descriptor::JavadocRequired => "JavadocRequired",
            Descriptor::ClassName => "ClassName",
            Descriptor::MethodName => "MethodName",
            Descriptor::ConstantName => "ConstantName",
            Descriptor::MemberName => "MemberName",
            Descriptor::ParameterName => "ParameterName",
            Descriptor::LocalVariableName => "LocalVariableName",
            Descriptor::ClassTypeParameterName => "ClassTypeParameterName",
            Descriptor::AbbreviationAsWordInName => "AbbreviationAsWordInName",
        }
    }

    pub fn from_name(name: &str) -> Option<Descriptor> {
        use Descriptor::*;
        [
            SummaryJavadoc,
            JavadocRequired,
            ClassName,
            MethodName,
            ConstantName,
            MemberName,
            ParameterName,
            LocalVariableName,
            ClassTypeParameterName,
            AbbreviationAsWordInName,
        ]
        .into_iter()
        .find(|d| d.name() == name)
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One diagnostic against one file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub line: u32,
    pub column: u32,
    pub section: Section,
    pub message: String,
    pub descriptor: Descriptor,
    pub origin: Origin,
}

impl Finding {
    /// The first single-quoted token in the message, if any.
    pub fn quoted_token(&self) -> Option<&str> {
        first_quoted(&self.message)
    }
}

/// Returns the text between the first pair of single quotes.
pub fn first_quoted(message: &str) -> Option<&str> {
    let start = message.find('\'')? + 1;
    let len = message[start..].find('\'')?;
    Some(&message[start..start + len])
}

/// Whether `token` appears single-quoted anywhere in `message`.
pub fn quotes_token(message: &str, token: &str) -> bool {
    message.contains(&format!("'{token}'"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_mapping_covers_all_sections() {
        assert_eq!(map_descriptor("2.2.1").unwrap(), Descriptor::MethodName);
        assert_eq!(map_descriptor("1.1.2").unwrap(), Descriptor::JavadocRequired);
        assert_eq!(map_descriptor("1.1.1").unwrap(), Descriptor::SummaryJavadoc);
        assert_eq!(map_descriptor("2.1.1").unwrap(), Descriptor::ClassName);
        assert_eq!(map_descriptor("2.3.1").unwrap(), Descriptor::ConstantName);
        assert_eq!(map_descriptor("2.3.2").unwrap(), Descriptor::MemberName);
        assert_eq!(map_descriptor("2.4.1").unwrap(), Descriptor::ParameterName);
        assert_eq!(map_descriptor("2.5.1").unwrap(), Descriptor::LocalVariableName);
        assert_eq!(map_descriptor("2.6.1").unwrap(), Descriptor::ClassTypeParameterName);
        assert_eq!(map_descriptor("9.9.9"), Err(UnknownSection("9.9.9".into())));
    }

    #[test]
    fn quoted_token_is_first_pair() {
        assert_eq!(
            first_quoted("Parameter name 'M' must match pattern '^[a-z]$'"),
            Some("M")
        );
        assert_eq!(first_quoted("no quotes"), None);
        assert_eq!(first_quoted("dangling 'quote"), None);
    }

    #[test]
    fn section_serde_uses_ids() {
        let json = serde_json::to_string(&Section::ParameterName).unwrap();
        assert_eq!(json, "\"2.4.1\"");
        let back: Section = serde_json::from_str(&json).unwrap();
        assert_eq!(back, Section::ParameterName);
    }
}
