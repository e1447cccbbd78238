//! Java source model: tokens, declarations and comment blocks for one file.

mod comments;
mod constants;
mod declarations;
mod tokenize;

pub use comments::{extract_comments, CommentBlock, CommentKind};
pub use constants::{classify_constant, ImmutableTypes};
pub use declarations::{extract_declarations, Declaration, DeclarationKind, Extraction};
pub use tokenize::{is_keyword, tokenize, Token, TokenKind};

#[derive(Debug, Clone)]
pub struct SourceModel {
    pub tokens: Vec<Token>,
    pub declarations: Vec<Declaration>,
    pub comments: Vec<CommentBlock>,
    pub malformed: bool,
}

impl SourceModel {
    pub fn parse(source: &str, allowlist: &ImmutableTypes) -> Self {
        let tokens = tokenize(source);
        let Extraction {
            declarations,
            malformed,
        } = extract_declarations(&tokens, allowlist);
        let comments = extract_comments(&tokens, &declarations);
        SourceModel {
            tokens,
            declarations,
            comments,
            malformed,
        }
    }

    /// Column of the first identifier token equal to `text` on `line`.
    pub fn locate(&self, line: u32, text: &str) -> Option<u32> {
        self.tokens
            .iter()
            .skip_while(|t| t.line < line)
            .take_while(|t| t.line == line)
            .find(|t| matches!(t.kind, TokenKind::Identifier | TokenKind::Keyword) && t.text == text)
            .map(|t| t.column)
    }
}
