//! Declaration recognition over the token stream.
//!
//! This is not a Java grammar. Declarations are found from modifier, keyword
//! and identifier patterns while tracking brace, paren and angle nesting, which
//! is all the naming and comment checks need.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::constants::{classify_constant, ImmutableTypes};
use super::tokenize::{Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DeclarationKind {
    Class,
    Method,
    ConstantField,
    NonConstantField,
    Parameter,
    LocalVariable,
    TypeVariable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declaration {
    pub kind: DeclarationKind,
    pub name: String,
    /// Position of the name token.
    pub line: u32,
    pub column: u32,
    pub modifiers: BTreeSet<String>,
    /// Empty when there is no written type. Type declarations carry their
    /// keyword here (`class`, `interface`, `enum`, `record`, `@interface`).
    pub declared_type: String,
    /// Enclosing class or method; empty at file level.
    pub owner_name: String,
    /// Line of the first non-annotation token of the declaration.
    pub start_line: u32,
    /// Field initializer tokens joined by single spaces.
    pub initializer: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Extraction {
    pub declarations: Vec<Declaration>,
    /// Set when brace or paren nesting could not be resolved; declarations
    /// are still best effort.
    pub malformed: bool,
}

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "default",
    "sealed",
];

const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

const MAX_NESTING: usize = 200;

/// Field kind before constant classification runs.
const PENDING_FIELD: DeclarationKind = DeclarationKind::NonConstantField;

pub fn extract_declarations(tokens: &[Token], allowlist: &ImmutableTypes) -> Extraction {
    let significant: Vec<&Token> = tokens.iter().filter(|t| !t.kind.is_trivia()).collect();
    let mut parser = Parser {
        toks: significant,
        i: 0,
        out: Vec::new(),
        field_indices: Vec::new(),
        enums: Vec::new(),
        malformed: false,
        nesting: 0,
    };
    parser.file();

    let Parser {
        mut out,
        field_indices,
        enums,
        malformed,
        ..
    } = parser;
    for idx in field_indices {
        out[idx].kind = classify_constant(&out[idx], allowlist, &enums);
    }
    Extraction {
        declarations: out,
        malformed,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum BodyKind {
    Class,
    Interface,
    Enum,
}

struct Parser<'t> {
    toks: Vec<&'t Token>,
    i: usize,
    out: Vec<Declaration>,
    field_indices: Vec<usize>,
    enums: Vec<String>,
    malformed: bool,
    nesting: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self, ahead: usize) -> Option<&'t Token> {
        self.toks.get(self.i + ahead).copied()
    }

    fn at(&self, text: &str) -> bool {
        self.peek(0).is_some_and(|t| t.text == text)
    }

    fn at_ahead(&self, ahead: usize, text: &str) -> bool {
        self.peek(ahead).is_some_and(|t| t.text == text)
    }

    fn at_ident(&self, ahead: usize) -> bool {
        self.peek(ahead).is_some_and(|t| t.kind == TokenKind::Identifier)
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let tok = self.peek(0);
        if tok.is_some() {
            self.i += 1;
        }
        tok
    }

    fn line(&self) -> u32 {
        self.peek(0).or_else(|| self.toks.last().copied()).map_or(1, |t| t.line)
    }

    fn emit(&mut self, kind: DeclarationKind, name_tok: &Token, spec: DeclSpec<'_>) -> usize {
        self.out.push(Declaration {
            kind,
            name: name_tok.text.clone(),
            line: name_tok.line,
            column: name_tok.column,
            modifiers: spec.modifiers.clone(),
            declared_type: spec.declared_type.to_string(),
            owner_name: spec.owner.to_string(),
            start_line: spec.start_line.unwrap_or(name_tok.line),
            initializer: None,
        });
        self.out.len() - 1
    }

    fn file(&mut self) {
        while let Some(tok) = self.peek(0) {
            let before = self.i;
            match tok.text.as_str() {
                "package" | "import" => {
                    self.skip_expr(&[";"]);
                    self.bump();
                }
                ";" => {
                    self.bump();
                }
                "}" => {
                    self.malformed = true;
                    self.bump();
                }
                _ => self.member("", BodyKind::Class),
            }
            if self.i == before {
                self.bump();
            }
        }
    }

    fn skip_annotation(&mut self) {
        // '@' Name ('.' Name)* ('(' ... ')')?
        self.bump();
        if self.at_ident(0) {
            self.bump();
        }
        while self.at(".") && self.at_ident(1) {
            self.i += 2;
        }
        if self.at("(") {
            self.bump();
            self.skip_expr(&[]);
            self.expect_close(")");
        }
    }

    fn skip_annotations(&mut self) {
        while self.at("@") && !self.at_ahead(1, "interface") {
            self.skip_annotation();
        }
    }

    fn modifiers(&mut self) -> (BTreeSet<String>, Option<u32>) {
        let mut mods = BTreeSet::new();
        let mut start = None;
        loop {
            self.skip_annotations();
            let Some(tok) = self.peek(0) else { break };
            if MODIFIERS.contains(&tok.text.as_str()) {
                // `sealed` is contextual; only a modifier before another word.
                if tok.text == "sealed" && !self.peek(1).is_some_and(|n| n.kind != TokenKind::Punctuation) {
                    break;
                }
                start.get_or_insert(tok.line);
                mods.insert(tok.text.clone());
                self.bump();
            } else if tok.text == "non" && self.at_ahead(1, "-") && self.at_ahead(2, "sealed") {
                start.get_or_insert(tok.line);
                mods.insert("non-sealed".to_string());
                self.i += 3;
            } else {
                break;
            }
        }
        (mods, start)
    }

    fn expect_close(&mut self, close: &str) {
        if self.at(close) {
            self.bump();
        } else {
            self.malformed = true;
        }
    }

    fn at_type_decl(&self) -> bool {
        match self.peek(0).map(|t| t.text.as_str()) {
            Some("class" | "interface" | "enum") => self.at_ident(1),
            Some("@") => self.at_ahead(1, "interface"),
            Some("record") => self.at_ident(1) && (self.at_ahead(2, "(") || self.at_ahead(2, "<")),
            _ => false,
        }
    }

    fn type_decl(&mut self, modifiers: BTreeSet<String>, start_line: Option<u32>, owner: &str) {
        let keyword = if self.at("@") {
            self.bump();
            "@interface"
        } else {
            match self.peek(0).map(|t| t.text.as_str()) {
                Some("class") => "class",
                Some("interface") => "interface",
                Some("enum") => "enum",
                _ => "record",
            }
        };
        let kw_line = self.bump().map(|t| t.line);
        let Some(name_tok) = self.bump() else {
            self.malformed = true;
            return;
        };
        let spec = DeclSpec {
            modifiers: &modifiers,
            declared_type: keyword,
            owner,
            start_line: start_line.or(kw_line),
        };
        self.emit(DeclarationKind::Class, name_tok, spec);
        let name = name_tok.text.clone();
        if keyword == "enum" {
            self.enums.push(name.clone());
        }
        if self.at("<") {
            self.type_params(&name);
        }
        if keyword == "record" && self.at("(") {
            self.params(&name);
        }
        // extends / implements / permits clauses
        while let Some(tok) = self.peek(0) {
            match tok.text.as_str() {
                "{" => break,
                ";" | "}" => {
                    self.malformed = true;
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
        if self.bump().is_none() {
            self.malformed = true;
            return;
        }
        let body = match keyword {
            "interface" | "@interface" => BodyKind::Interface,
            "enum" => BodyKind::Enum,
            _ => BodyKind::Class,
        };
        self.class_body(&name, body);
    }

    /// Parses after the opening brace through the matching closing brace.
    fn class_body(&mut self, class_name: &str, body: BodyKind) {
        if self.nesting >= MAX_NESTING {
            self.malformed = true;
            self.skip_expr(&[]);
            self.expect_close("}");
            return;
        }
        self.nesting += 1;
        if body == BodyKind::Enum {
            self.enum_constants(class_name);
        }
        loop {
            let before = self.i;
            match self.peek(0).map(|t| t.text.as_str()) {
                None => {
                    self.malformed = true;
                    break;
                }
                Some("}") => {
                    self.bump();
                    break;
                }
                Some(";") => {
                    self.bump();
                }
                Some(_) => self.member(class_name, body),
            }
            if self.i == before {
                self.bump();
            }
        }
        self.nesting -= 1;
    }

    fn enum_constants(&mut self, enum_name: &str) {
        let mods: BTreeSet<String> = ["public", "static", "final"].map(String::from).into();
        loop {
            self.skip_annotations();
            if !self.at_ident(0) {
                break;
            }
            let tok = self.bump().unwrap();
            let spec = DeclSpec {
                modifiers: &mods,
                declared_type: enum_name,
                owner: enum_name,
                start_line: None,
            };
            self.emit(DeclarationKind::ConstantField, tok, spec);
            if self.at("(") {
                self.bump();
                self.skip_expr(&[]);
                self.expect_close(")");
            }
            if self.at("{") {
                self.bump();
                self.class_body("", BodyKind::Class);
            }
            if self.at(",") {
                self.bump();
            } else {
                break;
            }
        }
        if self.at(";") {
            self.bump();
        }
    }

    fn member(&mut self, class_name: &str, body: BodyKind) {
        let (modifiers, start) = self.modifiers();
        let start_line = start.unwrap_or_else(|| self.line());
        if self.at("{") {
            self.bump();
            self.block(class_name);
            return;
        }
        if self.at_type_decl() {
            self.type_decl(modifiers, Some(start_line), class_name);
            return;
        }
        let mut pending_type_params = Vec::new();
        if self.at("<") {
            pending_type_params = self.collect_type_params();
        }
        let Some(ty) = self.parse_type() else {
            self.recover();
            return;
        };
        if self.at("(") {
            // Constructor: the "type" was the class name.
            let owner = ty;
            self.emit_type_params(&pending_type_params, &owner);
            self.params(&owner);
            self.method_tail(&owner);
            return;
        }
        if !self.at_ident(0) {
            self.recover();
            return;
        }
        let spec = DeclSpec {
            modifiers: &modifiers,
            declared_type: &ty,
            owner: class_name,
            start_line: Some(start_line),
        };
        if self.at_ahead(1, "(") {
            let name_tok = self.bump().unwrap();
            self.emit_type_params(&pending_type_params, &name_tok.text);
            self.emit(DeclarationKind::Method, name_tok, spec);
            self.params(&name_tok.text);
            self.method_tail(&name_tok.text);
            return;
        }
        let mut field_mods = modifiers.clone();
        if body == BodyKind::Interface {
            // Interface fields are implicitly static and final.
            field_mods.insert("static".into());
            field_mods.insert("final".into());
        }
        let first = self.out.len();
        let spec = DeclSpec {
            modifiers: &field_mods,
            ..spec
        };
        self.declarators(PENDING_FIELD, spec, &[";", "}"]);
        let idxs: Vec<usize> = (first..self.out.len())
            .filter(|&k| self.out[k].kind == PENDING_FIELD && self.out[k].owner_name == class_name)
            .collect();
        self.field_indices.extend(idxs);
        if self.at(";") {
            self.bump();
        }
    }

    fn method_tail(&mut self, owner: &str) {
        // throws clause, annotation-method defaults, then body or ';'
        while let Some(tok) = self.peek(0) {
            match tok.text.as_str() {
                "{" => {
                    self.bump();
                    self.block(owner);
                    return;
                }
                ";" => {
                    self.bump();
                    return;
                }
                "}" => return,
                _ => {
                    self.bump();
                }
            }
        }
        self.malformed = true;
    }

    fn recover(&mut self) {
        self.skip_expr(&[";", "}"]);
        if self.at(";") {
            self.bump();
        }
    }

    /// Variable declarators after the type: `a`, `b[] = {..}`, `c = expr`.
    fn declarators(&mut self, kind: DeclarationKind, spec: DeclSpec<'_>, stops: &[&str]) {
        loop {
            if !self.at_ident(0) {
                return;
            }
            let name_tok = self.bump().unwrap();
            let mut ty = spec.declared_type.to_string();
            while self.at("[") && self.at_ahead(1, "]") {
                self.i += 2;
                ty.push_str("[]");
            }
            let idx = self.emit(
                kind,
                name_tok,
                DeclSpec {
                    declared_type: &ty,
                    ..spec
                },
            );
            if self.at("=") {
                self.bump();
                let init_start = self.i;
                let mut init_stops = vec![","];
                init_stops.extend_from_slice(stops);
                self.skip_expr(&init_stops);
                let text: Vec<&str> = self.toks[init_start..self.i].iter().map(|t| t.text.as_str()).collect();
                self.out[idx].initializer = Some(text.join(" "));
            }
            if self.at(",") && self.at_ident(1) {
                self.bump();
            } else {
                return;
            }
        }
    }

    fn params(&mut self, owner: &str) {
        self.bump(); // '('
        let none = BTreeSet::new();
        loop {
            let before = self.i;
            match self.peek(0).map(|t| t.text.as_str()) {
                None => {
                    self.malformed = true;
                    return;
                }
                Some(")") => {
                    self.bump();
                    return;
                }
                Some(",") => {
                    self.bump();
                }
                Some(_) => {
                    let (mods, start) = self.modifiers();
                    let mods = if mods.is_empty() { none.clone() } else { mods };
                    if let Some(mut ty) = self.parse_type() {
                        if self.at(".") && self.at_ahead(1, ".") && self.at_ahead(2, ".") {
                            self.i += 3;
                            ty.push_str("...");
                        }
                        if self.at_ident(0) {
                            let name_tok = self.bump().unwrap();
                            let spec = DeclSpec {
                                modifiers: &mods,
                                declared_type: &ty,
                                owner,
                                start_line: start,
                            };
                            self.emit(DeclarationKind::Parameter, name_tok, spec);
                        }
                    }
                    self.skip_expr(&[",", ")"]);
                    if self.at("}") {
                        self.malformed = true;
                        return;
                    }
                }
            }
            if self.i == before {
                self.bump();
            }
        }
    }

    fn collect_type_params(&mut self) -> Vec<&'t Token> {
        let mut names = Vec::new();
        self.bump(); // '<'
        let mut depth = 1usize;
        let mut expect_name = true;
        while let Some(tok) = self.peek(0) {
            match tok.text.as_str() {
                "<" => depth += 1,
                ">" => {
                    depth -= 1;
                    if depth == 0 {
                        self.bump();
                        return names;
                    }
                }
                "," if depth == 1 => {
                    expect_name = true;
                    self.bump();
                    continue;
                }
                "@" => {
                    self.skip_annotation();
                    continue;
                }
                "{" | "}" | ";" | "(" | ")" => {
                    self.malformed = true;
                    return names;
                }
                _ if expect_name && depth == 1 && tok.kind == TokenKind::Identifier => {
                    names.push(tok);
                    expect_name = false;
                }
                _ => {}
            }
            self.bump();
        }
        self.malformed = true;
        names
    }

    fn emit_type_params(&mut self, names: &[&'t Token], owner: &str) {
        let none = BTreeSet::new();
        for tok in names {
            let spec = DeclSpec {
                modifiers: &none,
                declared_type: "",
                owner,
                start_line: None,
            };
            self.emit(DeclarationKind::TypeVariable, tok, spec);
        }
    }

    fn type_params(&mut self, owner: &str) {
        let names = self.collect_type_params();
        self.emit_type_params(&names, owner);
    }

    /// Parses a type reference and returns its text, or restores the
    /// position and returns `None`.
    fn parse_type(&mut self) -> Option<String> {
        let save = self.i;
        let result = self.parse_type_inner();
        if result.is_none() {
            self.i = save;
        }
        result
    }

    fn parse_type_inner(&mut self) -> Option<String> {
        self.skip_annotations();
        let tok = self.peek(0)?;
        let mut text = if PRIMITIVES.contains(&tok.text.as_str()) {
            self.bump();
            tok.text.clone()
        } else if tok.kind == TokenKind::Identifier && tok.text != "yield" {
            self.bump();
            let mut t = tok.text.clone();
            loop {
                if self.at("<") {
                    t.push_str(&self.type_args()?);
                } else if self.at(".") && self.at_ident(1) {
                    t.push('.');
                    t.push_str(&self.toks[self.i + 1].text);
                    self.i += 2;
                } else {
                    break;
                }
            }
            t
        } else {
            return None;
        };
        while self.at("[") && self.at_ahead(1, "]") {
            self.i += 2;
            text.push_str("[]");
        }
        Some(text)
    }

    fn type_args(&mut self) -> Option<String> {
        let mut text = String::new();
        let mut depth = 0usize;
        while let Some(tok) = self.peek(0) {
            match tok.text.as_str() {
                "<" => depth += 1,
                ">" => {
                    depth -= 1;
                    if depth == 0 {
                        self.bump();
                        text.push('>');
                        return Some(text);
                    }
                }
                "," => {
                    self.bump();
                    text.push_str(", ");
                    continue;
                }
                "(" | ")" | "{" | "}" | ";" | "=" | "&&" | "|" | "+" | "-" | "*" | "/" | "!" => return None,
                _ if tok.kind == TokenKind::Literal => return None,
                _ => {}
            }
            if tok.kind == TokenKind::Keyword && !PRIMITIVES.contains(&tok.text.as_str()) {
                if tok.text != "extends" && tok.text != "super" {
                    return None;
                }
                text.push(' ');
                text.push_str(&tok.text);
                text.push(' ');
            } else {
                text.push_str(&tok.text);
            }
            self.bump();
        }
        None
    }

    fn block(&mut self, owner: &str) {
        if self.nesting >= MAX_NESTING {
            self.malformed = true;
            self.skip_expr(&[]);
            self.expect_close("}");
            return;
        }
        self.nesting += 1;
        loop {
            let before = self.i;
            let Some(tok) = self.peek(0) else {
                self.malformed = true;
                break;
            };
            match tok.text.as_str() {
                "}" => {
                    self.bump();
                    break;
                }
                "{" => {
                    self.bump();
                    self.block(owner);
                }
                ";" | "else" | "do" | "finally" => {
                    self.bump();
                }
                "for" => {
                    self.bump();
                    if self.at("(") {
                        self.bump();
                        self.for_header(owner);
                    }
                }
                "catch" => {
                    self.bump();
                    if self.at("(") {
                        self.catch_header(owner);
                    }
                }
                "try" => {
                    self.bump();
                    if self.at("(") {
                        self.bump();
                        self.resources(owner);
                    }
                }
                "if" | "while" | "switch" | "synchronized" => {
                    self.bump();
                    if self.at("(") {
                        self.bump();
                        self.skip_expr(&[]);
                        self.expect_close(")");
                    }
                }
                "case" | "default" => {
                    self.bump();
                    self.skip_case_label();
                }
                "return" | "throw" | "break" | "continue" | "assert" => {
                    self.skip_expr(&[";"]);
                }
                _ if tok.kind == TokenKind::Identifier && self.at_ahead(1, ":") => {
                    // label
                    self.i += 2;
                }
                _ => self.statement_or_local(owner),
            }
            if self.i == before {
                self.bump();
            }
        }
        self.nesting -= 1;
    }

    fn skip_case_label(&mut self) {
        let mut depth = 0usize;
        while let Some(tok) = self.peek(0) {
            match tok.text.as_str() {
                "(" | "[" => depth += 1,
                ")" | "]" => depth = depth.saturating_sub(1),
                ":" if depth == 0 => {
                    self.bump();
                    return;
                }
                "-" if depth == 0 && self.at_ahead(1, ">") => {
                    self.i += 2;
                    return;
                }
                "{" | "}" | ";" => return,
                _ => {}
            }
            self.bump();
        }
    }

    fn statement_or_local(&mut self, owner: &str) {
        let save = self.i;
        let (mods, start) = self.modifiers();
        if self.at_type_decl() {
            self.type_decl(mods, start, owner);
            return;
        }
        let start_line = start.unwrap_or_else(|| self.line());
        if let Some(ty) = self.parse_type() {
            if self.at_ident(0)
                && self
                    .peek(1)
                    .is_some_and(|t| matches!(t.text.as_str(), "=" | ";" | "," | "[" | ")"))
            {
                let spec = DeclSpec {
                    modifiers: &mods,
                    declared_type: &ty,
                    owner,
                    start_line: Some(start_line),
                };
                self.declarators(DeclarationKind::LocalVariable, spec, &[";", "}"]);
                if self.at(";") {
                    self.bump();
                }
                return;
            }
        }
        self.i = save;
        self.skip_expr(&[";"]);
        if self.at(";") {
            self.bump();
        }
    }

    fn local_header_decl(&mut self, owner: &str, stops: &[&str]) -> bool {
        let save = self.i;
        let (mods, start) = self.modifiers();
        let start_line = start.unwrap_or_else(|| self.line());
        if let Some(ty) = self.parse_type() {
            if self.at_ident(0)
                && self
                    .peek(1)
                    .is_some_and(|t| matches!(t.text.as_str(), "=" | ";" | "," | ":" | "[" | ")"))
            {
                let spec = DeclSpec {
                    modifiers: &mods,
                    declared_type: &ty,
                    owner,
                    start_line: Some(start_line),
                };
                self.declarators(DeclarationKind::LocalVariable, spec, stops);
                return true;
            }
        }
        self.i = save;
        false
    }

    fn for_header(&mut self, owner: &str) {
        self.local_header_decl(owner, &[";", ":", ")"]);
        self.skip_expr(&[]);
        self.expect_close(")");
    }

    fn resources(&mut self, owner: &str) {
        loop {
            let before = self.i;
            self.local_header_decl(owner, &[";", ")"]);
            self.skip_expr(&[";"]);
            match self.peek(0).map(|t| t.text.as_str()) {
                Some(";") => {
                    self.bump();
                }
                Some(")") => {
                    self.bump();
                    return;
                }
                _ => {
                    self.malformed = true;
                    return;
                }
            }
            if self.i == before {
                return;
            }
        }
    }

    fn catch_header(&mut self, owner: &str) {
        self.bump(); // '('
        let (mods, start) = self.modifiers();
        let mut ty = String::new();
        while let Some(part) = self.parse_type() {
            if !ty.is_empty() {
                ty.push_str(" | ");
            }
            ty.push_str(&part);
            if self.at("|") {
                self.bump();
            } else {
                break;
            }
        }
        if !ty.is_empty() && self.at_ident(0) {
            let name_tok = self.bump().unwrap();
            let spec = DeclSpec {
                modifiers: &mods,
                declared_type: &ty,
                owner,
                start_line: start,
            };
            self.emit(DeclarationKind::Parameter, name_tok, spec);
        }
        self.skip_expr(&[]);
        self.expect_close(")");
    }

    /// Index of the `)` matching the `(` at the current position.
    fn matching_paren(&self) -> Option<usize> {
        let mut depth = 0usize;
        for (k, tok) in self.toks[self.i..].iter().enumerate() {
            match tok.text.as_str() {
                "(" => depth += 1,
                ")" => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(self.i + k);
                    }
                }
                "{" | "}" | ";" => return None,
                _ => {}
            }
        }
        None
    }

    /// Skips an expression, stopping before a stop token at nesting depth
    /// zero or before an unmatched closing bracket. Anonymous class bodies and
    /// lambda blocks met on the way are parsed for declarations.
    fn skip_expr(&mut self, stops: &[&str]) {
        let mut depth = 0usize;
        while let Some(tok) = self.peek(0) {
            let text = tok.text.as_str();
            if depth == 0 && tok.kind != TokenKind::Literal && stops.contains(&text) {
                return;
            }
            match text {
                "(" => {
                    if let Some(close) = self.matching_paren() {
                        let is_lambda = self.toks.get(close + 1).is_some_and(|t| t.text == "-")
                            && self.toks.get(close + 2).is_some_and(|t| t.text == ">");
                        if is_lambda {
                            let owner = self.current_owner();
                            self.params(&owner);
                            continue;
                        }
                    }
                    depth += 1;
                }
                "[" => depth += 1,
                ")" | "]" => {
                    if depth == 0 {
                        return;
                    }
                    depth -= 1;
                }
                "}" => return,
                "{" => {
                    let lambda = self.i >= 2 && self.toks[self.i - 1].text == ">" && self.toks[self.i - 2].text == "-";
                    self.bump();
                    if lambda {
                        let owner = self.current_owner();
                        self.block(&owner);
                    } else {
                        self.skip_expr(&[]);
                        self.expect_close("}");
                    }
                    continue;
                }
                "new" => {
                    self.bump();
                    self.parse_type();
                    if self.at("(") {
                        self.bump();
                        self.skip_expr(&[]);
                        self.expect_close(")");
                        if self.at("{") {
                            self.bump();
                            self.class_body("", BodyKind::Class);
                        }
                    }
                    continue;
                }
                _ => {}
            }
            self.bump();
        }
    }

    /// Best guess of the enclosing method or class, used for declarations found
    /// inside expressions.
    fn current_owner(&self) -> String {
        self.out
            .iter()
            .rev()
            .find(|d| matches!(d.kind, DeclarationKind::Method | DeclarationKind::Class))
            .map(|d| d.name.clone())
            .unwrap_or_default()
    }
}

#[derive(Clone, Copy)]
struct DeclSpec<'a> {
    modifiers: &'a BTreeSet<String>,
    declared_type: &'a str,
    owner: &'a str,
    start_line: Option<u32>,
}
