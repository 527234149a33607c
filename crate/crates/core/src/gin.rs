//! The GIN textual notation for grammars.
//!
//! ```text
//! # comment
//! root Program
//! [label] Program ::= {Function "\n"}+ ;
//! Function ::= name::Name Name+ "=" Expr ;
//! ```
//!
//! Right-hand side precedence, loosest first: choice `|`, sequence
//! (juxtaposition), selector `name::factor`, postfix `?` `*` `+`, atoms.
//! Atoms are identifiers, quoted terminals, `eps`, parenthesised groups and
//! separator lists `{element separator}+` / `{element separator}*`.
//! Expressions keep the shape they are written in: parenthesised groups
//! stay nested and `eps` items are not dropped.

use crate::error::{ParseError, SourceSpan};
use crate::expr::Expr;
use crate::grammar::{Grammar, Production};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    Int(usize),
    Define,
    Colons,
    Bar,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    Question,
    Star,
    Plus,
    Semi,
    Comma,
    Minus,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(s) => format!("literal {s:?}"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::Define => "`::=`".into(),
            Tok::Colons => "`::`".into(),
            Tok::Bar => "`|`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LAngle => "`<`".into(),
            Tok::RAngle => "`>`".into(),
            Tok::Question => "`?`".into(),
            Tok::Star => "`*`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Minus => "`-`".into(),
        }
    }
}

pub(crate) const KEYWORDS: [&str; 2] = ["root", "eps"];

pub fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let span = SourceSpan { line, column: col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '"' => {
                let mut s = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None | Some('\n') => {
                            return Err(ParseError::new(span, "unterminated literal"));
                        }
                        Some('"') => break,
                        Some('\\') => {
                            let esc = match chars.get(j + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                _ => {
                                    return Err(ParseError::new(
                                        SourceSpan {
                                            line,
                                            column: col + (j - i),
                                        },
                                        "invalid escape in literal",
                                    ))
                                }
                            };
                            s.push(esc);
                            j += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
                out.push((Tok::Str(s), span));
                let n = j + 1 - i;
                advance(n, &mut i, &mut col);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                out.push((Tok::Ident(chars[i..j].iter().collect()), span));
                advance(j - i, &mut i, &mut col);
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                let v = s
                    .parse()
                    .map_err(|_| ParseError::new(span, "integer out of range"))?;
                out.push((Tok::Int(v), span));
                advance(j - i, &mut i, &mut col);
            }
            ':' => {
                if chars.get(i + 1) == Some(&':') {
                    if chars.get(i + 2) == Some(&'=') {
                        out.push((Tok::Define, span));
                        advance(3, &mut i, &mut col);
                    } else {
                        out.push((Tok::Colons, span));
                        advance(2, &mut i, &mut col);
                    }
                } else {
                    return Err(ParseError::new(span, "unexpected `:`"));
                }
            }
            _ => {
                let t = match c {
                    '|' => Tok::Bar,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '<' => Tok::LAngle,
                    '>' => Tok::RAngle,
                    '?' => Tok::Question,
                    '*' => Tok::Star,
                    '+' => Tok::Plus,
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    '-' => Tok::Minus,
                    other => {
                        return Err(ParseError::new(
                            span,
                            format!("unexpected character {other:?}"),
                        ))
                    }
                };
                out.push((t, span));
                advance(1, &mut i, &mut col);
            }
        }
    }
    Ok(out)
}

pub(crate) struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    end: SourceSpan,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        let toks = lex(text)?;
        let lines = text.split('\n').count();
        let last = text.rsplit('\n').next().map_or(0, |l| l.chars().count());
        Ok(Parser {
            toks,
            pos: 0,
            end: SourceSpan {
                line: lines.max(1),
                column: last + 1,
            },
        })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    pub(crate) fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(t, _)| t)
    }

    pub(crate) fn span(&self) -> SourceSpan {
        self.toks.get(self.pos).map_or(self.end, |(_, s)| *s)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    pub(crate) fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.span(), msg)
    }

    pub(crate) fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    pub(crate) fn expect(&mut self, t: Tok, wanted: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn ident(&mut self, wanted: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    pub(crate) fn choice(&mut self) -> Result<Expr, ParseError> {
        let mut alts = vec![self.sequence()?];
        while self.eat(&Tok::Bar) {
            alts.push(self.sequence()?);
        }
        Ok(if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            Expr::Choice(alts)
        })
    }

    fn sequence(&mut self) -> Result<Expr, ParseError> {
        let mut items = Vec::new();
        while self.starts_factor() {
            items.push(self.selector()?);
        }
        if items.is_empty() {
            return Err(self.unexpected("an expression (write `eps` for the empty sequence)"));
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Expr::Sequence(items)
        })
    }

    fn starts_factor(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(_)) => self.peek2() != Some(&Tok::Define),
            Some(Tok::Str(_) | Tok::LParen | Tok::LBrace) => true,
            _ => false,
        }
    }

    fn selector(&mut self) -> Result<Expr, ParseError> {
        if let (Some(Tok::Ident(name)), Some(Tok::Colons)) = (self.peek(), self.peek2()) {
            if KEYWORDS.contains(&name.as_str()) {
                return Err(self.error(format!("`{name}` cannot name a selector")));
            }
            let name = name.clone();
            self.pos += 2;
            let span = self.span();
            let body = self.postfix()?;
            if body == Expr::Epsilon {
                return Err(ParseError::new(span, "selector over `eps`"));
            }
            return Ok(Expr::sel(name, body));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        loop {
            e = match self.peek() {
                Some(Tok::Question) => Expr::opt(e),
                Some(Tok::Star) => Expr::star(e),
                Some(Tok::Plus) => Expr::plus(e),
                _ => return Ok(e),
            };
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if s == "eps" => {
                self.pos += 1;
                Ok(Expr::Epsilon)
            }
            Some(Tok::Ident(_)) => Ok(Expr::Nonterminal(self.ident("a nonterminal")?)),
            Some(Tok::Str(s)) => {
                self.pos += 1;
                Ok(Expr::Terminal(s))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.choice()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::LBrace) => {
                self.pos += 1;
                let element = self.selector()?;
                let separator = self.selector()?;
                self.expect(Tok::RBrace, "`}` closing a separator list")?;
                match self.bump() {
                    Some(Tok::Plus) => Ok(Expr::sep_plus(element, separator)),
                    Some(Tok::Star) => Ok(Expr::sep_star(element, separator)),
                    _ => {
                        self.pos -= 1;
                        Err(self.unexpected("`+` or `*` after a separator list"))
                    }
                }
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

/// Parses a grammar in GIN notation.
pub fn parse_grammar(text: &str) -> Result<Grammar, ParseError> {
    let mut p = Parser::new(text)?;
    let mut roots: Vec<(String, SourceSpan)> = Vec::new();
    while p.peek() == Some(&Tok::Ident("root".into())) {
        p.bump();
        let span = p.span();
        let name = p.ident("a root nonterminal")?;
        if roots.iter().any(|(r, _)| *r == name) {
            return Err(ParseError::new(
                span,
                format!("duplicate root declaration `{name}`"),
            ));
        }
        roots.push((name, span));
    }
    if roots.is_empty() {
        return Err(p.error("missing root declaration"));
    }
    let mut productions = Vec::new();
    while !p.at_end() {
        if p.peek() == Some(&Tok::Ident("root".into())) {
            return Err(p.error("root declarations must precede all productions"));
        }
        let label = if p.eat(&Tok::LBracket) {
            let l = p.ident("a production label")?;
            p.expect(Tok::RBracket, "`]`")?;
            Some(l)
        } else {
            None
        };
        let lhs = p.ident("a nonterminal on the left of `::=`")?;
        p.expect(Tok::Define, "`::=`")?;
        let rhs = p.choice()?;
        p.expect(Tok::Semi, "`;` ending the production")?;
        productions.push(Production { label, lhs, rhs });
    }
    let g = Grammar::from_parts(productions, roots.iter().map(|(r, _)| r.clone()).collect());
    let mentioned: std::collections::BTreeSet<String> = g
        .productions()
        .iter()
        .flat_map(|p| {
            let mut s = std::collections::BTreeSet::new();
            s.insert(p.lhs.clone());
            p.rhs.nonterminals_into(&mut s);
            s
        })
        .collect();
    for (r, span) in &roots {
        if !mentioned.contains(r) {
            return Err(ParseError::new(*span, format!("undeclared root `{r}`")));
        }
    }
    Ok(g)
}

/// Parses a standalone GIN expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.choice()?;
    if !p.at_end() {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}

pub fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Choice,
    Sequence,
    Selector,
    Postfix,
}

fn level_of(e: &Expr) -> Level {
    match e {
        Expr::Choice(_) => Level::Choice,
        Expr::Sequence(_) => Level::Sequence,
        Expr::Selector(..) => Level::Selector,
        _ => Level::Postfix,
    }
}

fn write_expr(e: &Expr, min: Level, out: &mut String) {
    if level_of(e) < min {
        out.push('(');
        write_expr(e, Level::Choice, out);
        out.push(')');
        return;
    }
    match e {
        Expr::Epsilon => out.push_str("eps"),
        Expr::Terminal(t) => out.push_str(&escape_literal(t)),
        Expr::Nonterminal(n) => out.push_str(n),
        Expr::Choice(alts) => {
            for (i, a) in alts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                write_expr(a, Level::Sequence, out);
            }
        }
        Expr::Sequence(items) => {
            for (i, a) in items.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_expr(a, Level::Selector, out);
            }
        }
        Expr::Selector(name, body) => {
            out.push_str(name);
            out.push_str("::");
            write_expr(body, Level::Postfix, out);
        }
        Expr::Optional(b) | Expr::Star(b) | Expr::Plus(b) => {
            write_expr(b, Level::Postfix, out);
            out.push(match e {
                Expr::Optional(_) => '?',
                Expr::Star(_) => '*',
                _ => '+',
            });
        }
        Expr::SepListPlus(el, sep) | Expr::SepListStar(el, sep) => {
            out.push('{');
            write_expr(el, Level::Selector, out);
            out.push(' ');
            write_expr(sep, Level::Selector, out);
            out.push('}');
            out.push(if matches!(e, Expr::SepListPlus(..)) {
                '+'
            } else {
                '*'
            });
        }
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(e, Level::Choice, &mut s);
    s
}

pub fn print_production(p: &Production) -> String {
    let mut s = String::new();
    if let Some(l) = &p.label {
        s.push('[');
        s.push_str(l);
        s.push_str("] ");
    }
    s.push_str(&p.lhs);
    s.push_str(" ::= ");
    write_expr(&p.rhs, Level::Choice, &mut s);
    s.push_str(" ;");
    s
}

/// Canonical rendering: root lines, then one production per line.
pub fn print_grammar(g: &Grammar) -> String {
    let mut s = String::new();
    for r in g.roots() {
        s.push_str("root ");
        s.push_str(r);
        s.push('\n');
    }
    for p in g.productions() {
        s.push_str(&print_production(p));
        s.push('\n');
    }
    s
}
