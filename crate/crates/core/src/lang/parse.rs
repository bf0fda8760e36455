//! Recursive-descent parser for the program file grammar.
//!
//! ```text
//! program ::= decl* cmd
//! decl    ::= ("low" | "high") ident ("," ident)* ";"
//! cmd     ::= par (";" cmd)?
//! par     ::= unit | "{" cmd "||" cmd "}"
//! unit    ::= ident ":=" aexp
//!           | "if" bexp "then" cmd "else" cmd "fi"
//!           | "while" bexp "do" cmd "od"
//!           | "(" cmd ")"
//! aexp    ::= term (("+"|"-") term)*
//! term    ::= factor ("*" factor)*
//! factor  ::= integer | ident | "(" aexp ")"
//! bexp    ::= bterm ("or" bterm)*
//! bterm   ::= bfac ("and" bfac)*
//! bfac    ::= "not" bfac | "true" | "false" | aexp ("="|"<"|"<=") aexp | "(" bexp ")"
//! ```

use std::fmt;

use thiserror::Error;

use super::ast::{AExp, ArithOp, BExp, Cmd, CmpOp, Program, SecEnv};
use super::level::Level;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("use of undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("duplicate declaration of `{0}`")]
    DuplicateDeclaration(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

/// Source positions mirroring the shape of a parsed [`Cmd`]: one node per
/// command constructor, children in the same order as [`Cmd::children`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanTree {
    pub pos: Pos,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    /// Position of the command at `path` (child indices from the root).
    pub fn lookup(&self, path: &[usize]) -> Option<Pos> {
        match path.split_first() {
            None => Some(self.pos),
            Some((&i, rest)) => self.children.get(i)?.lookup(rest),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(n) => write!(f, "integer `{n}`"),
            Tok::Kw(k) => write!(f, "`{k}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const KEYWORDS: [&str; 14] = [
    "low", "high", "if", "then", "else", "fi", "while", "do", "od", "not", "and", "or", "true",
    "false",
];

// Longest match first.
const SYMBOLS: [&str; 14] = [
    ":=", "||", "<=", ";", ",", "{", "}", "(", ")", "+", "-", "*", "=", "<",
];

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError { pos, kind: ParseErrorKind::Syntax(msg.into()) }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            i += 1;
            col += 1;
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            let n = lit
                .parse::<u64>()
                .map_err(|_| syntax(pos, format!("integer literal `{lit}` out of range")))?;
            col += i - start;
            toks.push((Tok::Int(n), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => toks.push((Tok::Kw(k), pos)),
                None => toks.push((Tok::Ident(word), pos)),
            }
        } else {
            let sym = SYMBOLS.iter().find(|s| {
                s.chars().enumerate().all(|(k, sc)| chars.get(i + k) == Some(&sc))
            });
            match sym {
                Some(s) => {
                    i += s.len();
                    col += s.len();
                    toks.push((Tok::Sym(s), pos));
                }
                None => return Err(syntax(pos, format!("unexpected character `{c}`"))),
            }
        }
    }
    toks.push((Tok::Eof, Pos { line, column: col }));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    env: SecEnv,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == k)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        syntax(self.pos(), format!("expected {wanted}, found {}", self.peek()))
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), ParseError> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{k}`")))
        }
    }

    fn declared_ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let pos = self.pos();
                if !self.env.contains(&name) {
                    return Err(ParseError { pos, kind: ParseErrorKind::UndeclaredVariable(name) });
                }
                self.bump();
                Ok(name)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn decls(&mut self) -> Result<(), ParseError> {
        loop {
            let level = if self.is_kw("low") {
                Level::Lo
            } else if self.is_kw("high") {
                Level::Hi
            } else {
                return Ok(());
            };
            self.bump();
            loop {
                let pos = self.pos();
                let name = match self.bump().0 {
                    Tok::Ident(n) => n,
                    t => return Err(syntax(pos, format!("expected identifier, found {t}"))),
                };
                if self.env.insert(name.clone(), level).is_some() {
                    return Err(ParseError { pos, kind: ParseErrorKind::DuplicateDeclaration(name) });
                }
                if self.is_sym(",") {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect_sym(";")?;
        }
    }

    fn cmd(&mut self) -> Result<(Cmd, SpanTree), ParseError> {
        let (head, head_span) = self.par()?;
        if self.is_sym(";") {
            self.bump();
            let (tail, tail_span) = self.cmd()?;
            let pos = head_span.pos;
            Ok((Cmd::seq(head, tail), SpanTree { pos, children: vec![head_span, tail_span] }))
        } else {
            Ok((head, head_span))
        }
    }

    fn par(&mut self) -> Result<(Cmd, SpanTree), ParseError> {
        if !self.is_sym("{") {
            return self.unit();
        }
        let pos = self.pos();
        self.bump();
        let (a, sa) = self.cmd()?;
        self.expect_sym("||")?;
        let (b, sb) = self.cmd()?;
        self.expect_sym("}")?;
        Ok((Cmd::par(a, b), SpanTree { pos, children: vec![sa, sb] }))
    }

    fn unit(&mut self) -> Result<(Cmd, SpanTree), ParseError> {
        let pos = self.pos();
        match self.peek() {
            Tok::Ident(_) => {
                let x = self.declared_ident()?;
                self.expect_sym(":=")?;
                let e = self.aexp()?;
                Ok((Cmd::Assign(x, e), SpanTree { pos, children: vec![] }))
            }
            Tok::Kw("if") => {
                self.bump();
                let t = self.bexp()?;
                self.expect_kw("then")?;
                let (a, sa) = self.cmd()?;
                self.expect_kw("else")?;
                let (b, sb) = self.cmd()?;
                self.expect_kw("fi")?;
                Ok((Cmd::if_(t, a, b), SpanTree { pos, children: vec![sa, sb] }))
            }
            Tok::Kw("while") => {
                self.bump();
                let t = self.bexp()?;
                self.expect_kw("do")?;
                let (body, sb) = self.cmd()?;
                self.expect_kw("od")?;
                Ok((Cmd::while_(t, body), SpanTree { pos, children: vec![sb] }))
            }
            Tok::Sym("(") => {
                self.bump();
                let inner = self.cmd()?;
                self.expect_sym(")")?;
                Ok(inner)
            }
            _ => Err(self.unexpected("command")),
        }
    }

    fn aexp(&mut self) -> Result<AExp, ParseError> {
        let mut acc = self.term()?;
        loop {
            let op = if self.is_sym("+") {
                ArithOp::Add
            } else if self.is_sym("-") {
                ArithOp::Sub
            } else {
                return Ok(acc);
            };
            self.bump();
            let rhs = self.term()?;
            acc = AExp::bin(op, acc, rhs);
        }
    }

    fn term(&mut self) -> Result<AExp, ParseError> {
        let mut acc = self.factor()?;
        while self.is_sym("*") {
            self.bump();
            let rhs = self.factor()?;
            acc = AExp::mul(acc, rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<AExp, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(AExp::Const(n))
            }
            Tok::Ident(_) => Ok(AExp::Var(self.declared_ident()?)),
            Tok::Sym("(") => {
                self.bump();
                let e = self.aexp()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    fn bexp(&mut self) -> Result<BExp, ParseError> {
        let mut acc = self.bterm()?;
        while self.is_kw("or") {
            self.bump();
            let rhs = self.bterm()?;
            acc = BExp::or(acc, rhs);
        }
        Ok(acc)
    }

    fn bterm(&mut self) -> Result<BExp, ParseError> {
        let mut acc = self.bfac()?;
        while self.is_kw("and") {
            self.bump();
            let rhs = self.bfac()?;
            acc = BExp::and(acc, rhs);
        }
        Ok(acc)
    }

    fn bfac(&mut self) -> Result<BExp, ParseError> {
        match self.peek() {
            Tok::Kw("not") => {
                self.bump();
                Ok(BExp::not(self.bfac()?))
            }
            Tok::Kw("true") => {
                self.bump();
                Ok(BExp::Bool(true))
            }
            Tok::Kw("false") => {
                self.bump();
                Ok(BExp::Bool(false))
            }
            Tok::Sym("(") => {
                // Either a parenthesised test or a comparison whose left
                // operand starts with a parenthesis.
                let save = self.at;
                match self.comparison() {
                    Ok(b) => Ok(b),
                    Err(cmp_err) => {
                        self.at = save;
                        self.bump();
                        let inner = self.bexp().and_then(|b| {
                            self.expect_sym(")")?;
                            Ok(b)
                        });
                        match inner {
                            Ok(b) => Ok(b),
                            Err(e) if matches!(e.kind, ParseErrorKind::Syntax(_)) => {
                                Err(if e.pos >= cmp_err.pos { e } else { cmp_err })
                            }
                            Err(e) => Err(e),
                        }
                    }
                }
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> Result<BExp, ParseError> {
        let l = self.aexp()?;
        let op = if self.is_sym("=") {
            CmpOp::Eq
        } else if self.is_sym("<") {
            CmpOp::Lt
        } else if self.is_sym("<=") {
            CmpOp::Le
        } else {
            return Err(self.unexpected("`=`, `<` or `<=`"));
        };
        self.bump();
        let r = self.aexp()?;
        Ok(BExp::Cmp(op, l, r))
    }
}

/// Parses a program and also returns the source position of every command node.
pub fn parse_program_spanned(text: &str) -> Result<(Program, SpanTree), ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0, env: SecEnv::new() };
    p.decls()?;
    let (body, spans) = p.cmd()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok((Program { sec_env: p.env, body }, spans))
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    parse_program_spanned(text).map(|(p, _)| p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, Level)]) -> SecEnv {
        pairs.iter().map(|(x, l)| (*x, *l)).collect()
    }

    #[test]
    fn assignment_of_high_to_low() {
        let p = parse_program("low l; high h; l := h").unwrap();
        assert_eq!(p.sec_env, env(&[("l", Level::Lo), ("h", Level::Hi)]));
        assert_eq!(p.body, Cmd::assign("l", AExp::var("h")));
    }

    #[test]
    fn sequence() {
        let p = parse_program("low l; high h; h := 1 ; l := 2").unwrap();
        assert_eq!(
            p.body,
            Cmd::seq(Cmd::assign("h", AExp::Const(1)), Cmd::assign("l", AExp::Const(2)))
        );
    }

    #[test]
    fn seq_is_right_associative() {
        let p = parse_program("low a; a := 1; a := 2; a := 3").unwrap();
        let a = |n| Cmd::assign("a", AExp::Const(n));
        assert_eq!(p.body, Cmd::seq(a(1), Cmd::seq(a(2), a(3))));
    }

    #[test]
    fn undeclared_variable() {
        let err = parse_program("low l; l := x").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UndeclaredVariable("x".into()));
        assert_eq!(err.pos, Pos { line: 1, column: 13 });
    }

    #[test]
    fn duplicate_declaration() {
        let err = parse_program("low l; high l; l := 0").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateDeclaration("l".into()));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_program("low l;\nl := ").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(err.pos.line, 2);
        let err = parse_program("low l; l := 1 l := 2").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, column: 15 });
    }

    #[test]
    fn comments_and_multi_decls() {
        let p = parse_program("# header\nlow a, b; # trailing\nhigh c;\na := b + c").unwrap();
        assert_eq!(p.sec_env.len(), 3);
    }

    #[test]
    fn parenthesised_tests_and_comparisons() {
        let p = parse_program("low l; while (l + 1) * l = 0 and (l < 1 or not l <= 0) do l := l od").unwrap();
        let expected = BExp::and(
            BExp::eq(AExp::mul(AExp::add(AExp::var("l"), AExp::Const(1)), AExp::var("l")), AExp::Const(0)),
            BExp::or(
                BExp::lt(AExp::var("l"), AExp::Const(1)),
                BExp::not(BExp::le(AExp::var("l"), AExp::Const(0))),
            ),
        );
        match p.body {
            Cmd::While(t, _) => assert_eq!(t, expected),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nested_par_and_spans() {
        let src = "low l;\n{ l := 1 || { l := 2 || l := 3 } };\nl := 0";
        let (p, spans) = parse_program_spanned(src).unwrap();
        assert!(matches!(p.body, Cmd::Seq(..)));
        assert_eq!(spans.lookup(&[]), Some(Pos { line: 2, column: 1 }));
        assert_eq!(spans.lookup(&[0, 1, 0]), Some(Pos { line: 2, column: 15 }));
        assert_eq!(spans.lookup(&[1]), Some(Pos { line: 3, column: 1 }));
        assert_eq!(spans.lookup(&[2]), None);
    }

    #[test]
    fn keywords_are_reserved() {
        assert!(parse_program("low if; if := 1").is_err());
    }
}
