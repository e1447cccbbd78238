use serde::{Deserialize, Serialize};

use super::declarations::{Declaration, DeclarationKind};
use super::tokenize::{Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CommentKind {
    Line,
    Block,
    Javadoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommentBlock {
    pub kind: CommentKind,
    /// Raw comment text; consecutive `//` lines are joined with `\n`.
    pub text: String,
    pub start_line: u32,
    pub end_line: u32,
    pub column: u32,
    /// Code precedes the comment on its first line.
    pub trailing: bool,
    pub attached_declaration: Option<Declaration>,
}

/// Groups comment tokens into blocks and resolves which declaration, if any,
/// each block documents.
///
/// A block attaches to the declaration that starts on the first code line
/// after it, skipping annotation lines and further comments. A blank line or a
/// trailing position breaks the attachment.
pub fn extract_comments(tokens: &[Token], declarations: &[Declaration]) -> Vec<CommentBlock> {
    let mut blocks: Vec<(CommentBlock, usize)> = Vec::new();
    let mut last_code_line = 0u32;

    for (idx, tok) in tokens.iter().enumerate() {
        if !tok.kind.is_comment() {
            if !tok.kind.is_trivia() {
                last_code_line = tok.end_line();
            }
            continue;
        }
        let trailing = last_code_line == tok.line;
        let kind = match tok.kind {
            TokenKind::LineComment => CommentKind::Line,
            TokenKind::JavadocComment => CommentKind::Javadoc,
            _ => CommentKind::Block,
        };
        if kind == CommentKind::Line && !trailing {
            if let Some((prev, last_idx)) = blocks.last_mut() {
                let adjacent = prev.kind == CommentKind::Line
                    && !prev.trailing
                    && prev.end_line + 1 == tok.line
                    && only_whitespace_between(tokens, *last_idx, idx);
                if adjacent {
                    prev.text.push('\n');
                    prev.text.push_str(&tok.text);
                    prev.end_line = tok.line;
                    *last_idx = idx;
                    continue;
                }
            }
        }
        blocks.push((
            CommentBlock {
                kind,
                text: tok.text.clone(),
                start_line: tok.line,
                end_line: tok.end_line(),
                column: tok.column,
                trailing,
                attached_declaration: None,
            },
            idx,
        ));
    }

    blocks
        .into_iter()
        .map(|(mut block, last_idx)| {
            if !block.trailing {
                block.attached_declaration = attachment_line(tokens, last_idx, block.end_line)
                    .and_then(|line| declaration_starting_on(declarations, line))
                    .cloned();
            }
            block
        })
        .collect()
}

fn only_whitespace_between(tokens: &[Token], from: usize, to: usize) -> bool {
    tokens[from + 1..to]
        .iter()
        .all(|t| t.kind == TokenKind::Whitespace && t.text.matches('\n').count() <= 1)
}

/// The first code line after the comment ending at `end_line`, or `None` if a
/// blank line intervenes or nothing follows.
fn attachment_line(tokens: &[Token], last_idx: usize, end_line: u32) -> Option<u32> {
    let mut expected_line = end_line + 1;
    let mut i = last_idx + 1;
    while i < tokens.len() {
        let tok = &tokens[i];
        match tok.kind {
            TokenKind::Whitespace => {
                // The comment's own line break plus at most one more per step.
                let breaks = tok.text.matches('\n').count() as u32;
                if tok.line + breaks > expected_line {
                    return None;
                }
            }
            k if k.is_comment() => expected_line = tok.end_line() + 1,
            _ if tok.text == "@" && tokens.get(i + 1).is_none_or(|n| n.text != "interface") => {
                let (next, end) = skip_annotation(tokens, i);
                i = next;
                expected_line = end + 1;
                continue;
            }
            _ => {
                return (tok.line <= expected_line).then_some(tok.line);
            }
        }
        i += 1;
    }
    None
}

/// Skips `@Name(.Name)*(...)?` starting at `i`; returns the next index and the
/// line the annotation ends on.
fn skip_annotation(tokens: &[Token], mut i: usize) -> (usize, u32) {
    let mut end = tokens[i].line;
    i += 1;
    let sig = |i: usize| tokens.get(i).filter(|t| !t.kind.is_trivia());
    let next_sig = |mut j: usize| {
        while tokens.get(j).is_some_and(|t| t.kind.is_trivia()) {
            j += 1;
        }
        j
    };
    i = next_sig(i);
    if let Some(t) = sig(i).filter(|t| t.kind == TokenKind::Identifier) {
        end = t.line;
        i += 1;
    }
    loop {
        let j = next_sig(i);
        match sig(j) {
            Some(t) if t.text == "." => {
                let k = next_sig(j + 1);
                match sig(k) {
                    Some(n) if n.kind == TokenKind::Identifier => {
                        end = n.line;
                        i = k + 1;
                    }
                    _ => break,
                }
            }
            Some(t) if t.text == "(" => {
                let mut depth = 0usize;
                let mut k = j;
                while k < tokens.len() {
                    match tokens[k].text.as_str() {
                        "(" if !tokens[k].kind.is_trivia() => depth += 1,
                        ")" if !tokens[k].kind.is_trivia() => {
                            depth -= 1;
                            if depth == 0 {
                                end = tokens[k].line;
                                break;
                            }
                        }
                        _ => {}
                    }
                    k += 1;
                }
                i = k + 1;
                break;
            }
            _ => break,
        }
    }
    (i, end)
}

fn declaration_starting_on(declarations: &[Declaration], line: u32) -> Option<&Declaration> {
    use DeclarationKind::*;
    let rank = |k: DeclarationKind| match k {
        Class => 0,
        Method => 1,
        ConstantField | NonConstantField => 2,
        LocalVariable => 3,
        Parameter => 4,
        TypeVariable => 5,
    };
    declarations
        .iter()
        .filter(|d| d.start_line == line)
        .min_by_key(|d| (rank(d.kind), d.column))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractor::constants::ImmutableTypes;
    use crate::extractor::declarations::extract_declarations;
    use crate::extractor::tokenize::tokenize;

    fn blocks(src: &str) -> Vec<CommentBlock> {
        let toks = tokenize(src);
        let ex = extract_declarations(&toks, &ImmutableTypes::bundled());
        extract_comments(&toks, &ex.declarations)
    }

    fn attached(b: &CommentBlock) -> Option<(&str, DeclarationKind)> {
        b.attached_declaration.as_ref().map(|d| (d.name.as_str(), d.kind))
    }

    #[test]
    fn line_comment_above_method() {
        let src = "class A {\n    // reads in the next string\n    String next() { return \"\"; }\n}";
        let b = blocks(src);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].kind, CommentKind::Line);
        assert_eq!(attached(&b[0]), Some(("next", DeclarationKind::Method)));
    }

    #[test]
    fn comment_then_blank_then_eof() {
        let b = blocks("class A {}\n// trailing note\n\n");
        assert_eq!(b.len(), 1);
        assert!(b[0].attached_declaration.is_none());
    }

    #[test]
    fn javadoc_above_method() {
        let b = blocks("class A {\n  /** Returns x. */\n  int x() { return 1; }\n}");
        assert_eq!(b[0].kind, CommentKind::Javadoc);
        assert_eq!(attached(&b[0]), Some(("x", DeclarationKind::Method)));
    }

    #[test]
    fn consecutive_line_comments_group() {
        let src = "// first\n// second\nclass A {}";
        let b = blocks(src);
        assert_eq!(b.len(), 1);
        assert_eq!((b[0].start_line, b[0].end_line), (1, 2));
        assert_eq!(b[0].text, "// first\n// second");
        assert_eq!(attached(&b[0]), Some(("A", DeclarationKind::Class)));
    }

    #[test]
    fn annotations_are_skipped() {
        let src = "class A {\n  // prints it\n  @Override\n  @SuppressWarnings(\"x\")\n  public String toString() { return \"\"; }\n}";
        let b = blocks(src);
        assert_eq!(attached(&b[0]), Some(("toString", DeclarationKind::Method)));
    }

    #[test]
    fn blank_line_and_trailing_comments_do_not_attach() {
        let b = blocks("// header\n\nclass A {\n  int x; // count\n  int y;\n}");
        assert_eq!(b.len(), 2);
        assert!(b[0].attached_declaration.is_none());
        assert!(b[1].trailing);
        assert!(b[1].attached_declaration.is_none());
    }

    #[test]
    fn attached_declaration_starts_after_comment() {
        let src = "class A {\n  /* multi\n     line */\n  void run() {}\n}";
        let b = blocks(src);
        let d = b[0].attached_declaration.as_ref().unwrap();
        assert!(d.start_line > b[0].end_line);
        assert_eq!(b[0].end_line, 3);
    }
}
