use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Identifier,
    Keyword,
    Literal,
    Punctuation,
    LineComment,
    BlockComment,
    JavadocComment,
    Whitespace,
}

impl TokenKind {
    pub fn is_comment(self) -> bool {
        matches!(
            self,
            TokenKind::LineComment | TokenKind::BlockComment | TokenKind::JavadocComment
        )
    }

    pub fn is_trivia(self) -> bool {
        self == TokenKind::Whitespace || self.is_comment()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based.
    pub line: u32,
    /// 1-based, counted in characters.
    pub column: u32,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        !self.kind.is_trivia() && self.text == text
    }

    /// Line of the last character of the token.
    pub fn end_line(&self) -> u32 {
        let newlines = self.text.chars().filter(|&c| c == '\n').count() as u32;
        // A trailing newline belongs to the token but ends the line it sits on.
        if self.text.ends_with('\n') {
            self.line + newlines - 1
        } else {
            self.line + newlines
        }
    }
}

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_part(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).map(|&(_, c)| c)
    }

    fn byte_offset(&self, idx: usize) -> usize {
        self.chars.get(idx).map_or(self.src.len(), |&(b, _)| b)
    }

    fn eat_while(&mut self, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek(0) {
            if !pred(c) {
                break;
            }
            self.pos += 1;
        }
    }
}

/// Splits Java source into tokens. Concatenating the token texts reproduces
/// the input exactly; unknown characters become one-character punctuation.
pub fn tokenize(source: &str) -> Vec<Token> {
    let mut cur = Cursor {
        chars: source.char_indices().collect(),
        src: source,
        pos: 0,
    };
    let mut tokens = Vec::new();
    let (mut line, mut column) = (1u32, 1u32);

    while let Some(c) = cur.peek(0) {
        let start = cur.pos;
        let kind = scan_one(&mut cur, c);
        let text = &source[cur.byte_offset(start)..cur.byte_offset(cur.pos)];
        tokens.push(Token {
            kind,
            text: text.to_string(),
            line,
            column,
        });
        for ch in text.chars() {
            if ch == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
    }
    tokens
}

fn scan_one(cur: &mut Cursor<'_>, c: char) -> TokenKind {
    if c.is_whitespace() {
        cur.eat_while(char::is_whitespace);
        return TokenKind::Whitespace;
    }
    if c == '/' && cur.peek(1) == Some('/') {
        cur.eat_while(|ch| ch != '\n');
        return TokenKind::LineComment;
    }
    if c == '/' && cur.peek(1) == Some('*') {
        // `/**/` is an empty block comment, not Javadoc.
        let javadoc = cur.peek(2) == Some('*') && cur.peek(3) != Some('/');
        cur.pos += 2;
        loop {
            match cur.peek(0) {
                None => break,
                Some('*') if cur.peek(1) == Some('/') => {
                    cur.pos += 2;
                    break;
                }
                Some(_) => cur.pos += 1,
            }
        }
        return if javadoc {
            TokenKind::JavadocComment
        } else {
            TokenKind::BlockComment
        };
    }
    if c == '"' {
        if cur.peek(1) == Some('"') && cur.peek(2) == Some('"') {
            scan_text_block(cur);
        } else {
            scan_quoted(cur, '"');
        }
        return TokenKind::Literal;
    }
    if c == '\'' {
        scan_quoted(cur, '\'');
        return TokenKind::Literal;
    }
    if c.is_ascii_digit() || (c == '.' && cur.peek(1).is_some_and(|d| d.is_ascii_digit())) {
        scan_number(cur);
        return TokenKind::Literal;
    }
    if is_ident_start(c) {
        let start = cur.pos;
        cur.eat_while(is_ident_part);
        let word: String = cur.chars[start..cur.pos].iter().map(|&(_, ch)| ch).collect();
        return if is_keyword(&word) {
            TokenKind::Keyword
        } else {
            TokenKind::Identifier
        };
    }
    cur.pos += 1;
    TokenKind::Punctuation
}

/// String or char literal; stops at the closing quote or the end of the line.
fn scan_quoted(cur: &mut Cursor<'_>, quote: char) {
    cur.pos += 1;
    while let Some(c) = cur.peek(0) {
        match c {
            '\\' => cur.pos += if cur.peek(1).is_some_and(|n| n != '\n') { 2 } else { 1 },
            '\n' => return,
            _ if c == quote => {
                cur.pos += 1;
                return;
            }
            _ => cur.pos += 1,
        }
    }
}

fn scan_text_block(cur: &mut Cursor<'_>) {
    cur.pos += 3;
    while let Some(c) = cur.peek(0) {
        if c == '\\' {
            cur.pos += 2;
        } else if c == '"' && cur.peek(1) == Some('"') && cur.peek(2) == Some('"') {
            cur.pos += 3;
            return;
        } else {
            cur.pos += 1;
        }
    }
    cur.pos = cur.pos.min(cur.chars.len());
}

fn scan_number(cur: &mut Cursor<'_>) {
    let hex = cur.peek(0) == Some('0') && matches!(cur.peek(1), Some('x' | 'X'));
    if hex {
        cur.pos += 2;
    }
    loop {
        match cur.peek(0) {
            Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
                let exponent = !hex && matches!(c, 'e' | 'E') || hex && matches!(c, 'p' | 'P');
                cur.pos += 1;
                if exponent && matches!(cur.peek(0), Some('+' | '-')) {
                    cur.pos += 1;
                }
            }
            Some('.') if cur.peek(1).is_none_or(|n| n.is_ascii_digit() || !is_ident_start(n)) => cur.pos += 1,
            _ => break,
        }
    }
}
