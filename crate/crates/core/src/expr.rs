//! Right-hand side expressions.

use std::fmt;

/// A location inside an expression tree: the sequence of 0-based child
/// indices walked from the root of a right-hand side.
pub type Path = Vec<usize>;

/// A right-hand side expression.
///
/// `Sequence` and `Choice` always hold at least two children and never
/// directly contain a node of their own kind. Use [`Expr::seq`] and
/// [`Expr::choice`] to build them; both flatten and collapse as needed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Epsilon,
    Terminal(String),
    Nonterminal(String),
    Sequence(Vec<Expr>),
    Choice(Vec<Expr>),
    Optional(Box<Expr>),
    Star(Box<Expr>),
    Plus(Box<Expr>),
    SepListPlus(Box<Expr>, Box<Expr>),
    SepListStar(Box<Expr>, Box<Expr>),
    Selector(String, Box<Expr>),
}

impl Expr {
    pub fn nt(name: impl Into<String>) -> Expr {
        Expr::Nonterminal(name.into())
    }

    pub fn t(literal: impl Into<String>) -> Expr {
        Expr::Terminal(literal.into())
    }

    pub fn opt(e: Expr) -> Expr {
        Expr::Optional(Box::new(e))
    }

    pub fn star(e: Expr) -> Expr {
        Expr::Star(Box::new(e))
    }

    pub fn plus(e: Expr) -> Expr {
        Expr::Plus(Box::new(e))
    }

    pub fn sel(name: impl Into<String>, e: Expr) -> Expr {
        Expr::Selector(name.into(), Box::new(e))
    }

    pub fn sep_plus(element: Expr, separator: Expr) -> Expr {
        Expr::SepListPlus(Box::new(element), Box::new(separator))
    }

    pub fn sep_star(element: Expr, separator: Expr) -> Expr {
        Expr::SepListStar(Box::new(element), Box::new(separator))
    }

    /// Builds a sequence: nested sequences are spliced, `eps` items are
    /// dropped, and fewer than two remaining items collapse.
    pub fn seq(items: Vec<Expr>) -> Expr {
        let mut out = Vec::with_capacity(items.len());
        for item in items {
            match item {
                Expr::Epsilon => {}
                Expr::Sequence(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Expr::Epsilon,
            1 => out.pop().unwrap(),
            _ => Expr::Sequence(out),
        }
    }

    /// Builds a choice: nested choices are spliced and a single alternative
    /// collapses. `eps` alternatives are kept.
    pub fn choice(items: Vec<Expr>) -> Expr {
        let mut out = Vec::with_capacity(items.len());
        for item in items {
            match item {
                Expr::Choice(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Expr::Epsilon,
            1 => out.pop().unwrap(),
            _ => Expr::Choice(out),
        }
    }

    pub fn is_nonterminal(&self, name: &str) -> bool {
        matches!(self, Expr::Nonterminal(n) if n == name)
    }

    pub fn as_nonterminal(&self) -> Option<&str> {
        match self {
            Expr::Nonterminal(n) => Some(n),
            _ => None,
        }
    }

    /// A nonterminal, optionally under exactly one of `?`, `*`, `+`.
    pub fn decorated_atom(&self) -> Option<&str> {
        match self {
            Expr::Nonterminal(n) => Some(n),
            Expr::Optional(b) | Expr::Star(b) | Expr::Plus(b) => b.as_nonterminal(),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Epsilon | Expr::Terminal(_) | Expr::Nonterminal(_) => Vec::new(),
            Expr::Sequence(v) | Expr::Choice(v) => v.iter().collect(),
            Expr::Optional(b) | Expr::Star(b) | Expr::Plus(b) | Expr::Selector(_, b) => {
                vec![b.as_ref()]
            }
            Expr::SepListPlus(e, s) | Expr::SepListStar(e, s) => vec![e.as_ref(), s.as_ref()],
        }
    }

    fn child_mut(&mut self, index: usize) -> Option<&mut Expr> {
        match self {
            Expr::Sequence(v) | Expr::Choice(v) => v.get_mut(index),
            Expr::Optional(b) | Expr::Star(b) | Expr::Plus(b) | Expr::Selector(_, b) => {
                (index == 0).then_some(b.as_mut())
            }
            Expr::SepListPlus(e, s) | Expr::SepListStar(e, s) => match index {
                0 => Some(e.as_mut()),
                1 => Some(s.as_mut()),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Expr> {
        let mut node = self;
        for &i in path {
            node = *node.children().get(i)?;
        }
        Some(node)
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Expr> {
        let mut node = self;
        for &i in path {
            node = node.child_mut(i)?;
        }
        Some(node)
    }

    /// Total number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Pre-order walk yielding every node with its path.
    pub fn walk(&self) -> Vec<(Path, &Expr)> {
        fn go<'a>(e: &'a Expr, path: &mut Path, out: &mut Vec<(Path, &'a Expr)>) {
            out.push((path.clone(), e));
            for (i, c) in e.children().into_iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Paths of every `Nonterminal(name)` node, in pre-order.
    pub fn occurrences(&self, name: &str) -> Vec<Path> {
        self.walk()
            .into_iter()
            .filter(|(_, e)| e.is_nonterminal(name))
            .map(|(p, _)| p)
            .collect()
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Expr::Nonterminal(n) => n == name,
            _ => self.children().iter().any(|c| c.mentions(name)),
        }
    }

    pub fn nonterminals_into(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            Expr::Nonterminal(n) => {
                out.insert(n.clone());
            }
            _ => self
                .children()
                .iter()
                .for_each(|c| c.nonterminals_into(out)),
        }
    }

    pub fn terminals_into(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            Expr::Terminal(t) => {
                out.insert(t.clone());
            }
            _ => self.children().iter().for_each(|c| c.terminals_into(out)),
        }
    }

    pub fn has_terminals(&self) -> bool {
        match self {
            Expr::Terminal(_) => true,
            _ => self.children().iter().any(|c| c.has_terminals()),
        }
    }

    pub fn has_nonterminals(&self) -> bool {
        match self {
            Expr::Nonterminal(_) => true,
            _ => self.children().iter().any(|c| c.has_nonterminals()),
        }
    }

    /// Replaces every `Nonterminal(from)` with `Nonterminal(to)`.
    pub fn rename(&mut self, from: &str, to: &str) {
        match self {
            Expr::Nonterminal(n) if n == from => *n = to.to_string(),
            Expr::Sequence(v) | Expr::Choice(v) => v.iter_mut().for_each(|c| c.rename(from, to)),
            Expr::Optional(b) | Expr::Star(b) | Expr::Plus(b) | Expr::Selector(_, b) => {
                b.rename(from, to)
            }
            Expr::SepListPlus(e, s) | Expr::SepListStar(e, s) => {
                e.rename(from, to);
                s.rename(from, to);
            }
            _ => {}
        }
    }

    /// Removes terminals and collapses what that leaves behind: `eps` items
    /// vanish from sequences, decorated `eps` becomes `eps`, stacked
    /// repetition decorations merge, and duplicate `eps` alternatives are
    /// dropped. The result is a fixed point of this function.
    pub fn abstracted(&self) -> Expr {
        match self {
            Expr::Epsilon | Expr::Terminal(_) => Expr::Epsilon,
            Expr::Nonterminal(_) => self.clone(),
            Expr::Sequence(v) => Expr::seq(v.iter().map(Expr::abstracted).collect()),
            Expr::Choice(v) => {
                let mut alts: Vec<Expr> = Vec::new();
                for a in Expr::choice(v.iter().map(Expr::abstracted).collect()).into_alternatives()
                {
                    if a == Expr::Epsilon && alts.contains(&Expr::Epsilon) {
                        continue;
                    }
                    alts.push(a);
                }
                if alts.iter().all(|a| *a == Expr::Epsilon) {
                    Expr::Epsilon
                } else {
                    Expr::choice(alts)
                }
            }
            Expr::Optional(b) => match b.abstracted() {
                Expr::Epsilon => Expr::Epsilon,
                e @ (Expr::Optional(_) | Expr::Star(_)) => e,
                Expr::Plus(x) => Expr::Star(x),
                e => Expr::opt(e),
            },
            Expr::Star(b) => match b.abstracted() {
                Expr::Epsilon => Expr::Epsilon,
                Expr::Optional(x) | Expr::Star(x) | Expr::Plus(x) => Expr::Star(x),
                e => Expr::star(e),
            },
            Expr::Plus(b) => match b.abstracted() {
                Expr::Epsilon => Expr::Epsilon,
                Expr::Optional(x) | Expr::Star(x) => Expr::Star(x),
                e @ Expr::Plus(_) => e,
                e => Expr::plus(e),
            },
            Expr::SepListPlus(e, s) => Expr::sep_plus(e.abstracted(), s.abstracted()),
            Expr::SepListStar(e, s) => Expr::sep_star(e.abstracted(), s.abstracted()),
            Expr::Selector(name, b) => match b.abstracted() {
                Expr::Epsilon => Expr::Epsilon,
                e => Expr::sel(name.clone(), e),
            },
        }
    }

    fn into_alternatives(self) -> Vec<Expr> {
        match self {
            Expr::Choice(v) => v,
            e => vec![e],
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::gin::print_expr(self))
    }
}
