//! Concrete syntax: parsing and canonical rendering of terms and focus paths.
//!
//! Precedence, loosest to tightest:
//!
//! | level | operators           | associativity |
//! |-------|---------------------|---------------|
//! | 1     | `==`                | right         |
//! | 2     | `=>`                | right         |
//! | 3     | `\/`                | left          |
//! | 4     | `/\`                | left          |
//! | 5     | `~` (prefix)        |               |
//! | 6     | `=`                 | none          |
//! | 7     | `in`                | none          |
//! | 8     | `intsct`, `union`   | left          |
//!
//! A quantifier `forall x y @ body` extends as far right as possible.
//!
//! The renderer always parenthesizes `in` applications, `intsct`/`union`
//! arguments of `in`, quantifiers used as operands, and nested `==`/`=>`;
//! everything else gets the minimum the table requires.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::focus::FocusPath;
use crate::term::{Connective, MetaClass, Operator, Quantifier, Term, PRIME};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match self.expected.as_slice() {
            [] => write!(f, "unexpected {}", self.found),
            [one] => write!(f, "expected {}, found {}", one, self.found),
            many => write!(f, "expected one of {}, found {}", many.join(", "), self.found),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    At,
    Question,
    Conn(Connective),
    Op(Operator),
    Const(bool),
    Quant(Quantifier),
    Ident(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::At => "`@`".into(),
            Tok::Question => "`?`".into(),
            Tok::Conn(c) => format!("`{}`", c.symbol()),
            Tok::Op(o) => format!("`{}`", o.symbol()),
            Tok::Const(true) => "`TRUE`".into(),
            Tok::Const(false) => "`FALSE`".into(),
            Tok::Quant(q) => format!("`{}`", q.keyword()),
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == PRIME
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "TRUE" => Tok::Const(true),
        "FALSE" => Tok::Const(false),
        "forall" => Tok::Quant(Quantifier::Forall),
        "exists" => Tok::Quant(Quantifier::Exists),
        "in" => Tok::Op(Operator::In),
        "intsct" => Tok::Op(Operator::Intsct),
        "union" => Tok::Op(Operator::Union),
        _ => return None,
    })
}

/// True if `name` is usable as a variable name.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if is_ident_start(c))
        && chars.all(is_ident_continue)
        && keyword(name).is_none()
}

fn lex(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let err = |found: String, expected: &[&str]| SyntaxError {
            line: tline,
            column: tcol,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        };
        let tok = match c {
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            '@' => {
                bump(&mut chars);
                Tok::At
            }
            '?' => {
                bump(&mut chars);
                Tok::Question
            }
            '~' => {
                bump(&mut chars);
                Tok::Conn(Connective::Not)
            }
            '/' => {
                bump(&mut chars);
                match bump(&mut chars) {
                    Some('\\') => Tok::Conn(Connective::And),
                    other => return Err(err(describe_char(other), &["`/\\`"])),
                }
            }
            '\\' => {
                bump(&mut chars);
                match bump(&mut chars) {
                    Some('/') => Tok::Conn(Connective::Or),
                    other => return Err(err(describe_char(other), &["`\\/`"])),
                }
            }
            '=' => {
                bump(&mut chars);
                match chars.peek() {
                    Some('=') => {
                        bump(&mut chars);
                        Tok::Conn(Connective::Equiv)
                    }
                    Some('>') => {
                        bump(&mut chars);
                        Tok::Conn(Connective::Implies)
                    }
                    _ => Tok::Op(Operator::Eq),
                }
            }
            c if is_ident_start(c) => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_ident_continue(c) {
                        break;
                    }
                    word.push(c);
                    bump(&mut chars);
                }
                keyword(&word).unwrap_or(Tok::Ident(word))
            }
            other => return Err(err(describe_char(Some(other)), &[])),
        };
        out.push(Spanned {
            tok,
            line: tline,
            column: tcol,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

fn describe_char(c: Option<char>) -> String {
    match c {
        Some(c) => format!("character `{c}`"),
        None => "end of input".into(),
    }
}

const ATOM_START: &[&str] = &[
    "`(`", "`TRUE`", "`FALSE`", "`forall`", "`exists`", "`~`", "`?`", "identifier",
];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let here = &self.toks[self.pos];
        SyntaxError {
            line: here.line,
            column: here.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: here.tok.describe(),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.error(&[
                "end of input",
                "`==`",
                "`=>`",
                "`\\/`",
                "`/\\`",
                "`=`",
                "`in`",
                "`intsct`",
                "`union`",
                "`)`",
            ])),
        }
    }

    fn equiv(&mut self) -> Result<Term, SyntaxError> {
        let lhs = self.implies()?;
        if self.eat(&Tok::Conn(Connective::Equiv)) {
            let rhs = self.equiv()?;
            return Ok(Term::equiv(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Term, SyntaxError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Conn(Connective::Implies)) {
            let rhs = self.implies()?;
            return Ok(Term::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Term, SyntaxError> {
        let mut acc = self.and()?;
        while self.eat(&Tok::Conn(Connective::Or)) {
            acc = Term::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Term, SyntaxError> {
        let mut acc = self.not()?;
        while self.eat(&Tok::Conn(Connective::And)) {
            acc = Term::and(acc, self.not()?);
        }
        Ok(acc)
    }

    fn not(&mut self) -> Result<Term, SyntaxError> {
        if self.eat(&Tok::Conn(Connective::Not)) {
            return Ok(Term::negate(self.not()?));
        }
        self.equality()
    }

    fn equality(&mut self) -> Result<Term, SyntaxError> {
        let lhs = self.membership()?;
        if self.eat(&Tok::Op(Operator::Eq)) {
            return Ok(Term::eq(lhs, self.membership()?));
        }
        Ok(lhs)
    }

    fn membership(&mut self) -> Result<Term, SyntaxError> {
        let lhs = self.sets()?;
        if self.eat(&Tok::Op(Operator::In)) {
            return Ok(Term::member(lhs, self.sets()?));
        }
        Ok(lhs)
    }

    fn sets(&mut self) -> Result<Term, SyntaxError> {
        let mut acc = self.atom()?;
        loop {
            let op = match self.peek() {
                Tok::Op(op @ (Operator::Intsct | Operator::Union)) => *op,
                _ => return Ok(acc),
            };
            self.advance();
            acc = Term::app(op, acc, self.atom()?);
        }
    }

    fn atom(&mut self) -> Result<Term, SyntaxError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                let inner = self.equiv()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error(&["`)`"]));
                }
                Ok(inner)
            }
            Tok::Const(b) => {
                self.advance();
                Ok(Term::Const(b))
            }
            Tok::Ident(name) => {
                self.advance();
                Ok(Term::Var(name))
            }
            Tok::Question => {
                self.advance();
                match self.peek().clone() {
                    // class fixed afterwards from the position
                    Tok::Ident(name) => {
                        self.advance();
                        Ok(Term::Meta(name, MetaClass::Expr))
                    }
                    _ => Err(self.error(&["identifier"])),
                }
            }
            Tok::Quant(kind) => {
                self.advance();
                let mut binders: Vec<String> = Vec::new();
                loop {
                    match self.peek().clone() {
                        Tok::Ident(name) => {
                            if binders.contains(&name) {
                                return Err(self.error(&["distinct binder names"]));
                            }
                            self.advance();
                            binders.push(name);
                        }
                        Tok::At if !binders.is_empty() => {
                            self.advance();
                            break;
                        }
                        _ if binders.is_empty() => return Err(self.error(&["identifier"])),
                        _ => return Err(self.error(&["identifier", "`@`"])),
                    }
                }
                let body = self.equiv()?;
                Ok(Term::Quant(kind, binders, Box::new(body)))
            }
            _ => Err(self.error(ATOM_START)),
        }
    }
}

/// Parse a term. `?name` denotes a schematic variable.
pub fn parse_term(src: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let t = p.equiv()?;
    p.expect_eof()?;
    Ok(t.with_meta_classes())
}

/// Parse a law schema: every free variable becomes schematic.
pub fn parse_schema(src: &str) -> Result<Term, SyntaxError> {
    Ok(parse_term(src)?.schematized())
}

/// Parse `@`, `@1`, `@1.2`, ...
pub fn parse_path(src: &str) -> Result<FocusPath, SyntaxError> {
    let err = |column: usize, expected: &[&str], found: String| SyntaxError {
        line: 1,
        column,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found,
    };
    let s = src.trim();
    let offset = src.len() - src.trim_start().len();
    let Some(rest) = s.strip_prefix('@') else {
        return Err(err(offset + 1, &["`@`"], describe_char(s.chars().next())));
    };
    if rest.is_empty() {
        return Ok(FocusPath::root());
    }
    let mut segments = Vec::new();
    let mut column = offset + 2;
    for seg in rest.split('.') {
        match seg.parse::<usize>() {
            Ok(n) if n > 0 && seg.chars().all(|c| c.is_ascii_digit()) => segments.push(n),
            _ => {
                let found = if seg.is_empty() {
                    "`.`".to_string()
                } else {
                    format!("`{seg}`")
                };
                return Err(err(column, &["positive child index"], found));
            }
        }
        column += seg.chars().count() + 1;
    }
    Ok(FocusPath(segments))
}

pub fn render_path(p: &FocusPath) -> String {
    let segs: Vec<String> = p.segments().iter().map(|n| n.to_string()).collect();
    format!("@{}", segs.join("."))
}

/// Character span of a rendered subterm (parentheses included), with the
/// spans of its navigable children.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanTree {
    pub path: FocusPath,
    pub start: usize,
    pub end: usize,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    /// Innermost span containing character offset `at`.
    pub fn innermost(&self, at: usize) -> Option<&SpanTree> {
        if at < self.start || at >= self.end {
            return None;
        }
        self.children
            .iter()
            .find_map(|c| c.innermost(at))
            .or(Some(self))
    }

    /// Span of the node at `path`.
    pub fn find(&self, path: &FocusPath) -> Option<&SpanTree> {
        if self.path == *path {
            return Some(self);
        }
        self.children
            .iter()
            .find(|c| path.starts_with(&c.path))
            .and_then(|c| c.find(path))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Assoc {
    Left,
    None,
}

const QUANT_PREC: u8 = 0;
const ATOM_PREC: u8 = 9;

fn prec(t: &Term) -> u8 {
    match t {
        Term::Quant(..) => QUANT_PREC,
        Term::Conn(Connective::Equiv, _) => 1,
        Term::Conn(Connective::Implies, _) => 2,
        Term::Conn(Connective::Or, _) => 3,
        Term::Conn(Connective::And, _) => 4,
        Term::Conn(Connective::Not, _) => 5,
        Term::App(Operator::Eq, _) => 6,
        Term::App(Operator::In, _) => 7,
        Term::App(Operator::Intsct | Operator::Union, _) => 8,
        Term::Const(_) | Term::Var(_) | Term::Meta(..) => ATOM_PREC,
    }
}

fn render_assoc(t: &Term) -> Assoc {
    match t {
        Term::Conn(Connective::And | Connective::Or, _)
        | Term::App(Operator::Intsct | Operator::Union, _) => Assoc::Left,
        _ => Assoc::None,
    }
}

fn needs_parens(parent: Option<(&Term, usize)>, child: &Term) -> bool {
    if matches!(child, Term::App(Operator::In, _)) {
        return true;
    }
    let Some((parent, index)) = parent else {
        return false;
    };
    if let Term::Quant(..) = parent {
        return false;
    }
    if let Term::Quant(..) = child {
        return true;
    }
    if matches!(parent, Term::App(Operator::In, _))
        && matches!(child, Term::App(Operator::Intsct | Operator::Union, _))
    {
        return true;
    }
    let (lp, cp) = (prec(parent), prec(child));
    if let Term::Conn(Connective::Not, _) = parent {
        return cp < lp;
    }
    if cp != lp {
        return cp < lp;
    }
    !(render_assoc(parent) == Assoc::Left && index == 1)
}

struct Renderer {
    out: String,
    chars: usize,
    metas_marked: bool,
}

impl Renderer {
    fn emit(&mut self, s: &str) {
        self.out.push_str(s);
        self.chars += s.chars().count();
    }

    fn node(&mut self, t: &Term, path: FocusPath, parent: Option<(&Term, usize)>) -> SpanTree {
        let start = self.chars;
        let parens = needs_parens(parent, t);
        if parens {
            self.emit("(");
        }
        let mut children = Vec::new();
        match t {
            Term::Const(true) => self.emit("TRUE"),
            Term::Const(false) => self.emit("FALSE"),
            Term::Var(name) => self.emit(name),
            Term::Meta(name, _) => {
                if self.metas_marked {
                    self.emit("?");
                }
                self.emit(name);
            }
            Term::Conn(Connective::Not, args) => {
                self.emit("~");
                children.push(self.node(&args[0], path.child(1), Some((t, 1))));
            }
            Term::Conn(op, args) => {
                children.push(self.node(&args[0], path.child(1), Some((t, 1))));
                self.emit(&format!(" {} ", op.symbol()));
                children.push(self.node(&args[1], path.child(2), Some((t, 2))));
            }
            Term::App(op, args) => {
                children.push(self.node(&args[0], path.child(1), Some((t, 1))));
                self.emit(&format!(" {} ", op.symbol()));
                children.push(self.node(&args[1], path.child(2), Some((t, 2))));
            }
            Term::Quant(kind, binders, body) => {
                self.emit(kind.keyword());
                for b in binders {
                    self.emit(" ");
                    self.emit(b);
                }
                self.emit(" @ ");
                children.push(self.node(body, path.child(1), Some((t, 1))));
            }
        }
        if parens {
            self.emit(")");
        }
        SpanTree {
            path,
            start,
            end: self.chars,
            children,
        }
    }
}

fn render(t: &Term, metas_marked: bool) -> (String, SpanTree) {
    let mut r = Renderer {
        out: String::new(),
        chars: 0,
        metas_marked,
    };
    let spans = r.node(t, FocusPath::root(), None);
    (r.out, spans)
}

/// Canonical text of a term. Schematic variables are shown as `?name`.
pub fn render_term(t: &Term) -> String {
    render(t, true).0
}

/// Canonical text plus the character span of every subterm.
pub fn render_with_spans(t: &Term) -> (String, SpanTree) {
    render(t, true)
}

/// Law-table form: schematic variables shown by bare name, as
/// [`parse_schema`] expects.
pub fn render_schema(t: &Term) -> String {
    render(t, false).0
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}
