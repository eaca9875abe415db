//! Concrete syntax.
//!
//! Terms:
//!
//! ```text
//! term    := choice1
//! choice1 := choice2 { "+" choice2 }
//! choice2 := comp { "&" comp }
//! comp    := par { "." par }
//! par     := unary { "||" unary }
//! unary   := primary [ "^d" ]
//! primary := atom | "iota" | "abs" "{" atomlist "}" "(" term ")"
//!          | "<" var "|" specname ">" | "(" term ")"
//! ```
//!
//! Atoms are lowercase-initial identifiers, recursion variables
//! uppercase-initial. A bare variable is only meaningful inside a `spec`
//! block, where it refers to the enclosing specification.
//!
//! Spec files hold one or more blocks `spec NAME { X = term ; Y = term ; }`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::spec::{RecSpec, SpecEnv};
use crate::term::{AtomId, GameTerm, SpecId, VarId, RESERVED};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Plus,
    Amp,
    Dot,
    ParPar,
    DualOp,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Bar,
    Comma,
    Semi,
    Eq,
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Plus => "`+`",
            Tok::Amp => "`&`",
            Tok::Dot => "`.`",
            Tok::ParPar => "`||`",
            Tok::DualOp => "`^d`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Bar => "`|`",
            Tok::Comma => "`,`",
            Tok::Semi => "`;`",
            Tok::Eq => "`=`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1, col: 1 }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, msg: msg.into() }
    }

    fn bump(&mut self, c: char) {
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.bump(c);
                continue;
            }
            if c == '#' {
                while let Some(c) = self.src[self.pos..].chars().next() {
                    if c == '\n' {
                        break;
                    }
                    self.bump(c);
                }
                continue;
            }
            let (line, col) = (self.line, self.col);
            let tok = if c.is_ascii_alphabetic() || c == '_' {
                let start = self.pos;
                while let Some(c) = self.src[self.pos..].chars().next() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        self.bump(c);
                    } else {
                        break;
                    }
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            } else {
                match c {
                    '+' => {
                        self.bump(c);
                        Tok::Plus
                    }
                    '&' => {
                        self.bump(c);
                        Tok::Amp
                    }
                    '.' => {
                        self.bump(c);
                        Tok::Dot
                    }
                    '|' => {
                        self.bump(c);
                        if self.src[self.pos..].starts_with('|') {
                            self.bump('|');
                            Tok::ParPar
                        } else {
                            Tok::Bar
                        }
                    }
                    '^' => {
                        self.bump(c);
                        match self.src[self.pos..].chars().next() {
                            Some('d') => {
                                self.bump('d');
                                Tok::DualOp
                            }
                            _ => return Err(self.err("expected `d` after `^`")),
                        }
                    }
                    '(' => {
                        self.bump(c);
                        Tok::LParen
                    }
                    ')' => {
                        self.bump(c);
                        Tok::RParen
                    }
                    '{' => {
                        self.bump(c);
                        Tok::LBrace
                    }
                    '}' => {
                        self.bump(c);
                        Tok::RBrace
                    }
                    '<' => {
                        self.bump(c);
                        Tok::Lt
                    }
                    '>' => {
                        self.bump(c);
                        Tok::Gt
                    }
                    ',' => {
                        self.bump(c);
                        Tok::Comma
                    }
                    ';' => {
                        self.bump(c);
                        Tok::Semi
                    }
                    '=' => {
                        self.bump(c);
                        Tok::Eq
                    }
                    _ => return Err(self.err(format!("unexpected character `{c}`"))),
                }
            };
            out.push(Spanned { tok, line, col });
        }
        out.push(Spanned { tok: Tok::Eof, line: self.line, col: self.col });
        Ok(out)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    at: usize,
    /// Set inside a `spec` block: bare uppercase identifiers resolve against
    /// this spec.
    enclosing: Option<SpecId>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn here(&self) -> (usize, usize) {
        (self.toks[self.at].line, self.toks[self.at].col)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, msg: msg.into() }
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == &tok {
            self.next();
            Ok(())
        } else {
            Err(self.err(format!("expected {tok}, found {}", self.peek())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => Err(self.err(format!("expected {what}, found {other}"))),
        }
    }

    fn term(&mut self) -> Result<GameTerm, ParseError> {
        let mut t = self.choice2()?;
        while self.peek() == &Tok::Plus {
            self.next();
            let r = self.choice2()?;
            t = GameTerm::join(t, r);
        }
        Ok(t)
    }

    fn choice2(&mut self) -> Result<GameTerm, ParseError> {
        let mut t = self.comp()?;
        while self.peek() == &Tok::Amp {
            self.next();
            let r = self.comp()?;
            t = GameTerm::meet(t, r);
        }
        Ok(t)
    }

    fn comp(&mut self) -> Result<GameTerm, ParseError> {
        let mut t = self.par()?;
        while self.peek() == &Tok::Dot {
            self.next();
            let r = self.par()?;
            t = GameTerm::comp(t, r);
        }
        Ok(t)
    }

    fn par(&mut self) -> Result<GameTerm, ParseError> {
        let mut t = self.unary()?;
        while self.peek() == &Tok::ParPar {
            self.next();
            let r = self.unary()?;
            t = GameTerm::par(t, r);
        }
        Ok(t)
    }

    fn unary(&mut self) -> Result<GameTerm, ParseError> {
        let t = self.primary()?;
        if self.peek() == &Tok::DualOp {
            self.next();
            Ok(GameTerm::dual(t))
        } else {
            Ok(t)
        }
    }

    fn primary(&mut self) -> Result<GameTerm, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.next();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Lt => {
                self.next();
                let v = self.ident("a recursion variable")?;
                let var = VarId::new(v).map_err(|e| self.err(e.to_string()))?;
                self.expect(Tok::Bar)?;
                let s = self.ident("a spec name")?;
                let spec = SpecId::new(s).map_err(|e| self.err(e.to_string()))?;
                self.expect(Tok::Gt)?;
                Ok(GameTerm::rec(var, spec))
            }
            Tok::Ident(name) => {
                if name == "iota" {
                    self.next();
                    return Ok(GameTerm::Idle);
                }
                if name == "abs" {
                    self.next();
                    self.expect(Tok::LBrace)?;
                    let mut hide = BTreeSet::new();
                    if self.peek() != &Tok::RBrace {
                        loop {
                            let a = self.ident("an atom")?;
                            let atom = AtomId::new(a).map_err(|e| self.err(e.to_string()))?;
                            hide.insert(atom);
                            if self.peek() == &Tok::Comma {
                                self.next();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RBrace)?;
                    self.expect(Tok::LParen)?;
                    let body = self.term()?;
                    self.expect(Tok::RParen)?;
                    return Ok(GameTerm::abs(hide, body));
                }
                if RESERVED.contains(&name.as_str()) {
                    return Err(self.err(format!("reserved word `{name}` cannot be used here")));
                }
                if name.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
                    let err = self.err(format!(
                        "recursion variable `{name}` used outside a spec block"
                    ));
                    self.next();
                    let var = VarId::new(name).map_err(|e| self.err(e.to_string()))?;
                    return match &self.enclosing {
                        Some(spec) => Ok(GameTerm::rec(var, spec.clone())),
                        None => Err(err),
                    };
                }
                self.next();
                let atom = AtomId::new(name).map_err(|e| self.err(e.to_string()))?;
                Ok(GameTerm::Atom(atom))
            }
            other => Err(self.err(format!("expected a term, found {other}"))),
        }
    }

    fn spec_block(&mut self) -> Result<RecSpec, ParseError> {
        self.expect(Tok::Ident("spec".into()))?;
        let name = self.ident("a spec name")?;
        let id = SpecId::new(name).map_err(|e| self.err(e.to_string()))?;
        self.expect(Tok::LBrace)?;
        self.enclosing = Some(id.clone());
        let mut equations: Vec<(VarId, GameTerm)> = Vec::new();
        while self.peek() != &Tok::RBrace {
            let v = self.ident("a recursion variable")?;
            let var = VarId::new(v).map_err(|e| self.err(e.to_string()))?;
            if equations.iter().any(|(w, _)| *w == var) {
                return Err(self.err(format!("duplicate equation for `{var}`")));
            }
            self.expect(Tok::Eq)?;
            let rhs = self.term()?;
            self.expect(Tok::Semi)?;
            equations.push((var, rhs));
        }
        self.expect(Tok::RBrace)?;
        self.enclosing = None;
        if equations.is_empty() {
            return Err(self.err(format!("spec `{id}` has no equations")));
        }
        let spec = RecSpec { id: id.clone(), equations };
        // Own-variable references must be bound.
        for (_, rhs) in &spec.equations {
            let mut unbound = None;
            rhs.any(&mut |t| {
                if let GameTerm::RecRef(v, s) = t {
                    if *s == id && spec.body(v).is_none() && unbound.is_none() {
                        unbound = Some(v.clone());
                    }
                }
                false
            });
            if let Some(v) = unbound {
                return Err(self.err(format!("unbound recursion variable `{v}` in spec `{id}`")));
            }
        }
        Ok(spec)
    }
}

fn parser_for(text: &str) -> Result<Parser, ParseError> {
    let toks = Lexer::new(text).tokenize()?;
    Ok(Parser { toks, at: 0, enclosing: None })
}

/// Parse a standalone term. Bare recursion variables are rejected; use
/// `<X|E>` to reference a specification.
pub fn parse_term(text: &str) -> Result<GameTerm, ParseError> {
    let mut p = parser_for(text)?;
    let t = p.term()?;
    if p.peek() != &Tok::Eof {
        return Err(p.err(format!("unexpected {} after term", p.peek())));
    }
    Ok(t)
}

/// Parse a spec file: one or more `spec NAME { .. }` blocks.
pub fn parse_specs(text: &str) -> Result<SpecEnv, ParseError> {
    let mut p = parser_for(text)?;
    let mut env = SpecEnv::new();
    while p.peek() != &Tok::Eof {
        let spec = p.spec_block()?;
        if env.get(&spec.id).is_some() {
            return Err(p.err(format!("duplicate spec `{}`", spec.id)));
        }
        env.insert(spec);
    }
    if env.is_empty() {
        return Err(p.err("expected at least one `spec` block"));
    }
    Ok(env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Player;

    #[test]
    fn precedence_examples() {
        let t = parse_term("a + b . c").unwrap();
        match &t {
            GameTerm::Choice(Player::One, l, r) => {
                assert!(matches!(**l, GameTerm::Atom(_)));
                assert!(matches!(**r, GameTerm::Comp(..)));
            }
            other => panic!("unexpected {other:?}"),
        }
        let t = parse_term("(a + b)^d").unwrap();
        assert!(matches!(t, GameTerm::Dual(_)));
        // `||` binds tighter than `.`.
        let t = parse_term("a || b . c").unwrap();
        match &t {
            GameTerm::Comp(l, _) => assert!(matches!(**l, GameTerm::Par(..))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_term("a +").unwrap_err();
        assert_eq!((e.line, e.col), (1, 4));
        let e = parse_term("a\n+ $").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_term("spec").is_err());
        assert!(parse_term("abs{iota}(a)").is_err());
        assert!(parse_term("X").is_err());
    }

    #[test]
    fn spec_blocks_resolve_bare_variables() {
        let env = parse_specs("spec E { X = a . Y + b ; Y = c . X ; }").unwrap();
        let spec = env.get(&SpecId::new("E").unwrap()).unwrap();
        assert_eq!(spec.equations.len(), 2);
        let (_, rhs) = &spec.equations[0];
        let mut found = false;
        rhs.any(&mut |t| {
            if let GameTerm::RecRef(v, s) = t {
                found |= v.as_str() == "Y" && s.as_str() == "E";
            }
            false
        });
        assert!(found);
    }

    #[test]
    fn unbound_variables_rejected() {
        assert!(parse_specs("spec E { X = a . Z ; }").is_err());
        // Cross-spec references are not checked at parse time.
        assert!(parse_specs("spec E { X = a . <Z|F> ; }").is_ok());
    }

    #[test]
    fn comments_and_multiple_blocks() {
        let env = parse_specs(
            "# a file\nspec E { X = a ; }\nspec F { Y = b . <X|E> ; }",
        )
        .unwrap();
        assert_eq!(env.len(), 2);
    }

    #[test]
    fn roundtrip_display() {
        for s in [
            "a + b . c",
            "(a + b)^d",
            "abs{a,b}(a . c + b)",
            "<X|E> . a",
            "a || b . c",
            "a & b + c & d",
            "(a^d)^d",
            "iota . (a + iota)",
        ] {
            let t = parse_term(s).unwrap();
            let printed = t.to_string();
            let back = parse_term(&printed).unwrap();
            assert_eq!(t, back, "roundtrip failed for `{s}` printed as `{printed}`");
        }
    }
}
