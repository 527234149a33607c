//! Transformation steps, traces, and their `.xbgf` text form.
//!
//! One step per line: `operator(arg, ...) ;`. Arguments are nonterminal
//! names, integers, quoted literals, GIN expressions in angle brackets, or
//! bracketed lists of those. Production indices are 1-based; rhs paths and
//! permutations are 0-based.

use std::fmt;

use crate::error::ParseError;
use crate::expr::{Expr, Path};
use crate::gin::{escape_literal, print_expr, Parser, Tok};

/// Which way a yaccified recursion runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Recursion {
    /// `n ::= base ; n ::= n tail` becomes `n ::= base tail*`.
    Left,
    /// `n ::= base ; n ::= head n` becomes `n ::= head* base`.
    Right,
}

/// A nonterminal occurrence: production `index` (1-based) of `lhs`, at
/// `path` in its right-hand side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub lhs: String,
    pub index: usize,
    pub path: Path,
}

/// A production recorded for reinsertion at a 1-based grammar position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Recorded {
    pub position: usize,
    pub label: Option<String>,
    pub rhs: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Rename {
        from: String,
        to: String,
    },
    Unlabel {
        lhs: String,
        index: usize,
        label: String,
    },
    Unselect {
        lhs: String,
        index: usize,
        path: Path,
        name: String,
        body: Expr,
    },
    /// Removes terminals from the recorded right-hand side.
    Abstract {
        lhs: String,
        index: usize,
        rhs: Expr,
    },
    DesugarSepPlus {
        lhs: String,
        index: usize,
        path: Path,
        element: Expr,
        separator: Expr,
    },
    DesugarSepStar {
        lhs: String,
        index: usize,
        path: Path,
        element: Expr,
        separator: Expr,
    },
    Extract {
        name: String,
        expr: Expr,
        scope: Vec<String>,
    },
    Inline {
        name: String,
        production: Recorded,
        occurrences: Vec<Occurrence>,
    },
    Vertical {
        name: String,
    },
    Widen {
        lhs: String,
        index: usize,
        path: Option<Path>,
    },
    Narrow {
        lhs: String,
        index: usize,
        path: Option<Path>,
    },
    Permute {
        lhs: String,
        order: Vec<usize>,
    },
    Deyaccify {
        name: String,
        recursion: Recursion,
        base: Expr,
        part: Expr,
        /// 1 when the base rule came first, 2 when the recursive one did.
        base_index: usize,
    },
    RemoveUnreachable {
        name: String,
        productions: Vec<Recorded>,
    },
    Reroot {
        new: Vec<String>,
        old: Vec<String>,
    },
    EliminateEpsilon {
        name: String,
        production: Recorded,
        occurrences: Vec<Occurrence>,
    },
}

impl Step {
    pub fn operator(&self) -> &'static str {
        match self {
            Step::Rename { .. } => "rename",
            Step::Unlabel { .. } => "unlabel",
            Step::Unselect { .. } => "unselect",
            Step::Abstract { .. } => "abstract",
            Step::DesugarSepPlus { .. } => "desugarSepPlus",
            Step::DesugarSepStar { .. } => "desugarSepStar",
            Step::Extract { .. } => "extract",
            Step::Inline { .. } => "inline",
            Step::Vertical { .. } => "vertical",
            Step::Widen { .. } => "widen",
            Step::Narrow { .. } => "narrow",
            Step::Permute { .. } => "permute",
            Step::Deyaccify { .. } => "deyaccify",
            Step::RemoveUnreachable { .. } => "removeUnreachable",
            Step::Reroot { .. } => "reroot",
            Step::EliminateEpsilon { .. } => "eliminateEpsilon",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Trace {
    pub steps: Vec<Step>,
}

impl Trace {
    pub fn new() -> Self {
        Trace::default()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, s: Step) {
        self.steps.push(s);
    }

    pub fn extend(&mut self, other: Trace) {
        self.steps.extend(other.steps);
    }
}

impl From<Vec<Step>> for Trace {
    fn from(steps: Vec<Step>) -> Self {
        Trace { steps }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Arg {
    Name(String),
    Int(usize),
    Str(String),
    Expr(Expr),
    List(Vec<Arg>),
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Name(n) => f.write_str(n),
            Arg::Int(i) => write!(f, "{i}"),
            Arg::Str(s) => f.write_str(&escape_literal(s)),
            Arg::Expr(e) => write!(f, "<{}>", print_expr(e)),
            Arg::List(items) => {
                f.write_str("[")?;
                for (i, a) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("]")
            }
        }
    }
}

fn name(s: &str) -> Arg {
    Arg::Name(s.to_string())
}

fn path_arg(p: &[usize]) -> Arg {
    Arg::List(p.iter().map(|&i| Arg::Int(i)).collect())
}

fn label_arg(l: &Option<String>) -> Arg {
    Arg::Str(l.clone().unwrap_or_default())
}

fn occurrence_args(out: &mut Vec<Arg>, occs: &[Occurrence]) {
    for o in occs {
        out.push(name(&o.lhs));
        out.push(Arg::Int(o.index));
        out.push(path_arg(&o.path));
    }
}

fn recorded_args(out: &mut Vec<Arg>, r: &Recorded) {
    out.push(Arg::Int(r.position));
    out.push(label_arg(&r.label));
    out.push(Arg::Expr(r.rhs.clone()));
}

fn step_args(s: &Step) -> Vec<Arg> {
    match s {
        Step::Rename { from, to } => vec![name(from), name(to)],
        Step::Unlabel { lhs, index, label } => vec![name(lhs), Arg::Int(*index), name(label)],
        Step::Unselect {
            lhs,
            index,
            path,
            name: sel,
            body,
        } => vec![
            name(lhs),
            Arg::Int(*index),
            path_arg(path),
            name(sel),
            Arg::Expr(body.clone()),
        ],
        Step::Abstract { lhs, index, rhs } => {
            vec![name(lhs), Arg::Int(*index), Arg::Expr(rhs.clone())]
        }
        Step::DesugarSepPlus {
            lhs,
            index,
            path,
            element,
            separator,
        }
        | Step::DesugarSepStar {
            lhs,
            index,
            path,
            element,
            separator,
        } => vec![
            name(lhs),
            Arg::Int(*index),
            path_arg(path),
            Arg::Expr(element.clone()),
            Arg::Expr(separator.clone()),
        ],
        Step::Extract {
            name: n,
            expr,
            scope,
        } => {
            let mut v = vec![name(n), Arg::Expr(expr.clone())];
            v.extend(scope.iter().map(|s| name(s)));
            v
        }
        Step::Inline {
            name: n,
            production,
            occurrences,
        }
        | Step::EliminateEpsilon {
            name: n,
            production,
            occurrences,
        } => {
            let mut v = vec![name(n)];
            recorded_args(&mut v, production);
            occurrence_args(&mut v, occurrences);
            v
        }
        Step::Vertical { name: n } => vec![name(n)],
        Step::Widen { lhs, index, path } | Step::Narrow { lhs, index, path } => {
            let mut v = vec![name(lhs), Arg::Int(*index)];
            if let Some(p) = path {
                v.push(path_arg(p));
            }
            v
        }
        Step::Permute { lhs, order } => vec![name(lhs), path_arg(order)],
        Step::Deyaccify {
            name: n,
            recursion,
            base,
            part,
            base_index,
        } => vec![
            name(n),
            name(match recursion {
                Recursion::Left => "left",
                Recursion::Right => "right",
            }),
            Arg::Expr(base.clone()),
            Arg::Expr(part.clone()),
            Arg::Int(*base_index),
        ],
        Step::RemoveUnreachable {
            name: n,
            productions,
        } => {
            let mut v = vec![name(n)];
            for r in productions {
                recorded_args(&mut v, r);
            }
            v
        }
        Step::Reroot { new, old } => vec![
            Arg::List(new.iter().map(|n| name(n)).collect()),
            Arg::List(old.iter().map(|n| name(n)).collect()),
        ],
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.operator())?;
        for (i, a) in step_args(self).iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(") ;")
    }
}

/// One step per line, each terminated by a newline.
pub fn print_trace(t: &Trace) -> String {
    let mut s = String::new();
    for step in &t.steps {
        s.push_str(&step.to_string());
        s.push('\n');
    }
    s
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_trace(self))
    }
}

fn parse_arg(p: &mut Parser) -> Result<Arg, ParseError> {
    match p.peek().cloned() {
        Some(Tok::Ident(_)) => Ok(Arg::Name(p.ident("an argument")?)),
        Some(Tok::Int(i)) => {
            p.bump();
            Ok(Arg::Int(i))
        }
        Some(Tok::Str(s)) => {
            p.bump();
            Ok(Arg::Str(s))
        }
        Some(Tok::LAngle) => {
            p.bump();
            let e = p.choice()?;
            p.expect(Tok::RAngle, "`>` closing an expression")?;
            Ok(Arg::Expr(e))
        }
        Some(Tok::LBracket) => {
            p.bump();
            let mut items = Vec::new();
            if !p.eat(&Tok::RBracket) {
                loop {
                    items.push(parse_arg(p)?);
                    if p.eat(&Tok::RBracket) {
                        break;
                    }
                    p.expect(Tok::Comma, "`,` or `]`")?;
                }
            }
            Ok(Arg::List(items))
        }
        _ => Err(p.unexpected("an argument")),
    }
}

struct Args<'a> {
    op: &'a str,
    items: std::vec::IntoIter<Arg>,
    at: crate::error::SourceSpan,
}

impl Args<'_> {
    fn err(&self, msg: String) -> ParseError {
        ParseError::new(self.at, format!("{}: {msg}", self.op))
    }

    fn next(&mut self, what: &str) -> Result<Arg, ParseError> {
        self.items
            .next()
            .ok_or_else(|| self.err(format!("arity mismatch, missing {what}")))
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.next("a name")? {
            Arg::Name(n) => Ok(n),
            other => Err(self.err(format!("expected a name, found {other}"))),
        }
    }

    fn int(&mut self) -> Result<usize, ParseError> {
        match self.next("an integer")? {
            Arg::Int(i) => Ok(i),
            other => Err(self.err(format!("expected an integer, found {other}"))),
        }
    }

    fn index(&mut self) -> Result<usize, ParseError> {
        let i = self.int()?;
        if i == 0 {
            return Err(self.err("production indices are 1-based".into()));
        }
        Ok(i)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        match self.next("an expression")? {
            Arg::Expr(e) => Ok(e),
            other => Err(self.err(format!("expected <expression>, found {other}"))),
        }
    }

    fn label(&mut self) -> Result<Option<String>, ParseError> {
        match self.next("a label literal")? {
            Arg::Str(s) if s.is_empty() => Ok(None),
            Arg::Str(s) if crate::gin::is_identifier(&s) => Ok(Some(s)),
            other => Err(self.err(format!("expected a label literal, found {other}"))),
        }
    }

    fn ints(&mut self) -> Result<Vec<usize>, ParseError> {
        match self.next("a list of integers")? {
            Arg::List(items) => items
                .into_iter()
                .map(|a| match a {
                    Arg::Int(i) => Ok(i),
                    other => Err(self.err(format!("expected an integer, found {other}"))),
                })
                .collect(),
            other => Err(self.err(format!("expected a list, found {other}"))),
        }
    }

    fn names(&mut self) -> Result<Vec<String>, ParseError> {
        match self.next("a list of names")? {
            Arg::List(items) => items
                .into_iter()
                .map(|a| match a {
                    Arg::Name(n) => Ok(n),
                    other => Err(self.err(format!("expected a name, found {other}"))),
                })
                .collect(),
            other => Err(self.err(format!("expected a list, found {other}"))),
        }
    }

    fn remaining(&self) -> usize {
        self.items.len()
    }

    fn recorded(&mut self) -> Result<Recorded, ParseError> {
        Ok(Recorded {
            position: self.index()?,
            label: self.label()?,
            rhs: self.expr()?,
        })
    }

    fn occurrences(&mut self) -> Result<Vec<Occurrence>, ParseError> {
        if !self.remaining().is_multiple_of(3) {
            return Err(self.err("arity mismatch in occurrence list".into()));
        }
        let mut v = Vec::new();
        while self.remaining() > 0 {
            v.push(Occurrence {
                lhs: self.name()?,
                index: self.index()?,
                path: self.ints()?,
            });
        }
        Ok(v)
    }

    fn done(&self) -> Result<(), ParseError> {
        if self.remaining() > 0 {
            return Err(self.err(format!(
                "arity mismatch, {} extra argument(s)",
                self.remaining()
            )));
        }
        Ok(())
    }
}

fn build_step(mut a: Args) -> Result<Step, ParseError> {
    let step = match a.op {
        "rename" => Step::Rename {
            from: a.name()?,
            to: a.name()?,
        },
        "unlabel" => Step::Unlabel {
            lhs: a.name()?,
            index: a.index()?,
            label: a.name()?,
        },
        "unselect" => Step::Unselect {
            lhs: a.name()?,
            index: a.index()?,
            path: a.ints()?,
            name: a.name()?,
            body: a.expr()?,
        },
        "abstract" => Step::Abstract {
            lhs: a.name()?,
            index: a.index()?,
            rhs: a.expr()?,
        },
        "desugarSepPlus" => Step::DesugarSepPlus {
            lhs: a.name()?,
            index: a.index()?,
            path: a.ints()?,
            element: a.expr()?,
            separator: a.expr()?,
        },
        "desugarSepStar" => Step::DesugarSepStar {
            lhs: a.name()?,
            index: a.index()?,
            path: a.ints()?,
            element: a.expr()?,
            separator: a.expr()?,
        },
        "extract" => {
            let name = a.name()?;
            let expr = a.expr()?;
            let mut scope = Vec::new();
            while a.remaining() > 0 {
                scope.push(a.name()?);
            }
            if scope.is_empty() {
                return Err(a.err("arity mismatch, empty scope".into()));
            }
            Step::Extract { name, expr, scope }
        }
        "inline" => Step::Inline {
            name: a.name()?,
            production: a.recorded()?,
            occurrences: a.occurrences()?,
        },
        "eliminateEpsilon" => Step::EliminateEpsilon {
            name: a.name()?,
            production: a.recorded()?,
            occurrences: a.occurrences()?,
        },
        "vertical" => Step::Vertical { name: a.name()? },
        "widen" | "narrow" => {
            let lhs = a.name()?;
            let index = a.index()?;
            let path = if a.remaining() > 0 {
                Some(a.ints()?)
            } else {
                None
            };
            if a.op == "widen" {
                Step::Widen { lhs, index, path }
            } else {
                Step::Narrow { lhs, index, path }
            }
        }
        "permute" => Step::Permute {
            lhs: a.name()?,
            order: a.ints()?,
        },
        "deyaccify" => {
            let name = a.name()?;
            let recursion = match a.name()?.as_str() {
                "left" => Recursion::Left,
                "right" => Recursion::Right,
                other => return Err(a.err(format!("unknown recursion variant `{other}`"))),
            };
            let base = a.expr()?;
            let part = a.expr()?;
            let base_index = a.index()?;
            if base_index > 2 {
                return Err(a.err("base index must be 1 or 2".into()));
            }
            Step::Deyaccify {
                name,
                recursion,
                base,
                part,
                base_index,
            }
        }
        "removeUnreachable" => {
            let name = a.name()?;
            if !a.remaining().is_multiple_of(3) {
                return Err(a.err("arity mismatch in production list".into()));
            }
            let mut productions = Vec::new();
            while a.remaining() > 0 {
                productions.push(a.recorded()?);
            }
            Step::RemoveUnreachable { name, productions }
        }
        "reroot" => Step::Reroot {
            new: a.names()?,
            old: a.names()?,
        },
        other => {
            return Err(ParseError::new(a.at, format!("unknown operator `{other}`")));
        }
    };
    a.done()?;
    Ok(step)
}

/// Parses a trace: a sequence of `operator(args) ;` steps.
pub fn parse_trace(text: &str) -> Result<Trace, ParseError> {
    let mut p = Parser::new(text)?;
    let mut steps = Vec::new();
    while !p.at_end() {
        let at = p.span();
        let op = match p.bump() {
            Some(Tok::Ident(op)) => op,
            _ => {
                return Err(ParseError::new(at, "expected an operator name"));
            }
        };
        p.expect(Tok::LParen, "`(`")?;
        let mut items = Vec::new();
        if !p.eat(&Tok::RParen) {
            loop {
                items.push(parse_arg(&mut p)?);
                if p.eat(&Tok::RParen) {
                    break;
                }
                p.expect(Tok::Comma, "`,` or `)`")?;
            }
        }
        p.expect(Tok::Semi, "`;` ending the step")?;
        steps.push(build_step(Args {
            op: &op,
            items: items.into_iter(),
            at,
        })?);
    }
    Ok(Trace { steps })
}
