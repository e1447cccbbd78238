use std::collections::HashSet;
use std::path::Path;

const BUNDLED: &str = include_str!("../../data/lexicon.txt");

/// Word list used to find word boundaries inside single-case runs.
#[derive(Debug, Clone)]
pub struct SegmentationLexicon {
    words: HashSet<String>,
    max_word_len: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("lexicon entry '{0}' is not lowercase ASCII")]
    InvalidEntry(String),
    #[error("lexicon is empty")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SegmentationLexicon {
    pub fn bundled() -> Self {
        Self::from_list(BUNDLED).expect("bundled lexicon is valid")
    }

    /// One lowercase word per line; `#` starts a comment.
    pub fn from_list(text: &str) -> Result<Self, LexiconError> {
        let mut words = HashSet::new();
        for entry in text.lines().map(|l| l.split('#').next().unwrap_or("").trim()) {
            if entry.is_empty() {
                continue;
            }
            if !entry.bytes().all(|b| b.is_ascii_lowercase()) {
                return Err(LexiconError::InvalidEntry(entry.to_string()));
            }
            words.insert(entry.to_string());
        }
        Self::from_words(words)
    }

    pub fn from_words<I, S>(words: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let words: HashSet<String> = words.into_iter().map(Into::into).collect();
        if words.is_empty() {
            return Err(LexiconError::Empty);
        }
        if let Some(bad) = words.iter().find(|w| !w.bytes().all(|b| b.is_ascii_lowercase())) {
            return Err(LexiconError::InvalidEntry(bad.clone()));
        }
        let max_word_len = words.iter().map(String::len).max().unwrap_or(0);
        Ok(SegmentationLexicon { words, max_word_len })
    }

    /// Bundled lexicon extended with a user word file.
    pub fn bundled_with_file(path: &Path) -> Result<Self, LexiconError> {
        let extra = Self::from_list(&std::fs::read_to_string(path)?)?;
        let mut lex = Self::bundled();
        lex.max_word_len = lex.max_word_len.max(extra.max_word_len);
        lex.words.extend(extra.words);
        Ok(lex)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn max_word_len(&self) -> usize {
        self.max_word_len
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Splits an identifier into lowercase words.
///
/// Existing underscore, case and digit boundaries are honored first. A digit
/// run followed by lowercase letters stays one word (`2sv`). Every letter run
/// that is not itself a lexicon word or a single letter is decomposed over
/// the lexicon, preferring the fewest words and then longer leading words.
/// An all-caps run with no decomposition is kept as one acronym word.
/// Returns `None` when some other run has no full decomposition.
pub fn segment_identifier(identifier: &str, lexicon: &SegmentationLexicon) -> Option<Vec<String>> {
    if identifier.is_empty() || identifier.contains('$') {
        return None;
    }
    let mut words = Vec::new();
    for part in identifier.split('_').filter(|p| !p.is_empty()) {
        for piece in case_pieces(part) {
            if piece.starts_with(|c: char| c.is_ascii_digit()) {
                words.push(piece.to_ascii_lowercase());
                continue;
            }
            if !piece.chars().all(|c| c.is_ascii_alphabetic()) {
                return None;
            }
            let lower = piece.to_ascii_lowercase();
            if lower.len() == 1 || lexicon.contains(&lower) {
                words.push(lower);
            } else if let Some(split) = decompose(&lower, lexicon) {
                words.extend(split);
            } else if piece.bytes().all(|b| b.is_ascii_uppercase()) {
                // An explicit all-caps run is an acronym.
                words.push(lower);
            } else {
                return None;
            }
        }
    }
    (!words.is_empty()).then_some(words)
}

/// Splits on lower→upper, acronym→word (`XMLParser`), letter→digit and
/// digit→upper boundaries.
fn case_pieces(part: &str) -> Vec<String> {
    let chars: Vec<char> = part.chars().collect();
    let mut pieces = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if let Some(prev) = cur.chars().last() {
            let next = chars.get(i + 1).copied();
            let boundary = (prev.is_lowercase() && c.is_uppercase())
                || (prev.is_uppercase() && c.is_uppercase() && next.is_some_and(char::is_lowercase))
                || (prev.is_alphabetic() && c.is_ascii_digit())
                || (prev.is_ascii_digit() && c.is_uppercase());
            if boundary {
                pieces.push(std::mem::take(&mut cur));
            }
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        pieces.push(cur);
    }
    pieces
}

/// Lexicon decomposition of one lowercase run into words of two or more
/// letters. Ranking: fewest words, then lexicographically longest word
/// lengths from the left.
fn decompose(run: &str, lexicon: &SegmentationLexicon) -> Option<Vec<String>> {
    let n = run.len();
    // best[i]: best split of run[i..] as word end offsets, or None.
    let mut best: Vec<Option<Vec<usize>>> = vec![None; n + 1];
    best[n] = Some(Vec::new());
    for start in (0..n).rev() {
        let mut choice: Option<Vec<usize>> = None;
        let longest = lexicon.max_word_len().min(n - start);
        for len in (2..=longest).rev() {
            let end = start + len;
            if !lexicon.contains(&run[start..end]) {
                continue;
            }
            let Some(tail) = &best[end] else { continue };
            let mut cand = Vec::with_capacity(tail.len() + 1);
            cand.push(end);
            cand.extend_from_slice(tail);
            if choice.as_ref().is_none_or(|cur| better(&cand, cur, start)) {
                choice = Some(cand);
            }
        }
        best[start] = choice;
    }
    let ends = best[0].take()?;
    let mut words = Vec::with_capacity(ends.len());
    let mut from = 0;
    for end in ends {
        words.push(run[from..end].to_string());
        from = end;
    }
    Some(words)
}

fn better(cand: &[usize], cur: &[usize], start: usize) -> bool {
    if cand.len() != cur.len() {
        return cand.len() < cur.len();
    }
    let lens = |ends: &[usize]| {
        let mut prev = start;
        ends.iter()
            .map(|&e| {
                let l = e - prev;
                prev = e;
                l
            })
            .collect::<Vec<_>>()
    };
    lens(cand) > lens(cur)
}
