//! Prose phrase to camel-case identifier conversion.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("name has no words")]
    EmptyName,
    #[error("word '{0}' is empty or contains whitespace")]
    InvalidWord(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CamelStyle {
    Upper,
    Lower,
}

/// The words of a name in prose form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProseName {
    words: Vec<String>,
}

impl ProseName {
    pub fn new<I, S>(words: I) -> Result<Self, NameError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let words: Vec<String> = words.into_iter().map(Into::into).collect();
        if words.is_empty() {
            return Err(NameError::EmptyName);
        }
        if let Some(bad) = words
            .iter()
            .find(|w| w.is_empty() || w.chars().any(char::is_whitespace))
        {
            return Err(NameError::InvalidWord(bad.clone()));
        }
        Ok(ProseName { words })
    }

    /// Folds to ASCII, drops apostrophes, and splits on whitespace and
    /// punctuation. Dots between digits are kept so version numbers stay one
    /// word (`33.4.6`).
    pub fn parse(phrase: &str) -> Result<Self, NameError> {
        let folded: String = fold_to_ascii(phrase).chars().filter(|&c| c != '\'').collect();
        let chars: Vec<char> = folded.chars().collect();
        let mut words = Vec::new();
        let mut cur = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let version_dot = c == '.'
                && i > 0
                && chars[i - 1].is_ascii_digit()
                && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit());
            if c.is_ascii_alphanumeric() || version_dot {
                cur.push(c);
            } else if !cur.is_empty() {
                words.push(std::mem::take(&mut cur));
            }
        }
        if !cur.is_empty() {
            words.push(cur);
        }
        Self::new(words)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// Transliterates Latin-1 letters to ASCII. German umlauts expand (`ü`→`ue`);
/// other accented letters lose their accent. Unmapped characters pass through.
pub fn fold_to_ascii(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        let mapped: &str = match c {
            'ä' => "ae",
            'ö' => "oe",
            'ü' => "ue",
            'Ä' => "Ae",
            'Ö' => "Oe",
            'Ü' => "Ue",
            'ß' => "ss",
            'æ' => "ae",
            'Æ' => "Ae",
            'œ' => "oe",
            'Œ' => "Oe",
            'à' | 'á' | 'â' | 'ã' | 'å' => "a",
            'À' | 'Á' | 'Â' | 'Ã' | 'Å' => "A",
            'ç' => "c",
            'Ç' => "C",
            'è' | 'é' | 'ê' | 'ë' => "e",
            'È' | 'É' | 'Ê' | 'Ë' => "E",
            'ì' | 'í' | 'î' | 'ï' => "i",
            'Ì' | 'Í' | 'Î' | 'Ï' => "I",
            'ð' => "d",
            'Ð' => "D",
            'ñ' => "n",
            'Ñ' => "N",
            'ò' | 'ó' | 'ô' | 'õ' | 'ø' => "o",
            'Ò' | 'Ó' | 'Ô' | 'Õ' | 'Ø' => "O",
            'ù' | 'ú' | 'û' => "u",
            'Ù' | 'Ú' | 'Û' => "U",
            'ý' | 'ÿ' => "y",
            'Ý' => "Y",
            'þ' => "th",
            'Þ' => "Th",
            '\u{2019}' | '\u{2018}' => "'",
            _ => {
                out.push(c);
                continue;
            }
        };
        out.push_str(mapped);
    }
    out
}

fn is_numeric_word(word: &str) -> bool {
    !word.is_empty() && word.chars().all(|c| c.is_ascii_digit() || c == '.')
}

/// Joins words into an identifier: each word is lowercased, then its first
/// character uppercased (every word for `Upper`, all but the first for
/// `Lower`). Adjacent numeric words, and the parts of a dotted version, are
/// joined with `_`.
pub fn to_camel_case(name: &ProseName, style: CamelStyle) -> String {
    let mut out = String::new();
    let mut prev_numeric = false;
    for (i, word) in name.words().iter().enumerate() {
        let numeric = is_numeric_word(word);
        if numeric {
            if prev_numeric {
                out.push('_');
            }
            let parts: Vec<&str> = word.split('.').filter(|p| !p.is_empty()).collect();
            out.push_str(&parts.join("_"));
        } else {
            let lower: String = word
                .chars()
                .filter(char::is_ascii_alphanumeric)
                .map(|c| c.to_ascii_lowercase())
                .collect();
            let capitalize = style == CamelStyle::Upper || i > 0;
            let mut chars = lower.chars();
            if let Some(first) = chars.next() {
                if capitalize {
                    out.push(first.to_ascii_uppercase());
                } else {
                    out.push(first);
                }
                out.push_str(chars.as_str());
            }
        }
        prev_numeric = numeric;
    }
    out
}
