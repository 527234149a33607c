//! Grammars as quadruples of nonterminals, terminals, productions and roots.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::ModelError;
use crate::expr::Expr;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Production {
    pub label: Option<String>,
    pub lhs: String,
    pub rhs: Expr,
}

impl Production {
    pub fn new(lhs: impl Into<String>, rhs: Expr) -> Self {
        Production {
            label: None,
            lhs: lhs.into(),
            rhs,
        }
    }

    pub fn labelled(label: impl Into<String>, lhs: impl Into<String>, rhs: Expr) -> Self {
        Production {
            label: Some(label.into()),
            lhs: lhs.into(),
            rhs,
        }
    }

    /// `n ::= m` with `m` a bare nonterminal.
    pub fn is_chain(&self) -> bool {
        self.rhs.as_nonterminal().is_some()
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::gin::print_production(self))
    }
}

/// A grammar. The nonterminal and terminal sets are derived from the
/// productions and roots on construction, so they always satisfy the
/// membership invariants.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grammar {
    nonterminals: BTreeSet<String>,
    terminals: BTreeSet<String>,
    productions: Vec<Production>,
    roots: Vec<String>,
}

impl Grammar {
    /// Builds a grammar. Duplicate roots are rejected.
    pub fn new(productions: Vec<Production>, roots: Vec<String>) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        for r in &roots {
            if !seen.insert(r.as_str()) {
                return Err(ModelError::DuplicateRoot(r.clone()));
            }
        }
        Ok(Self::from_parts(productions, roots))
    }

    pub(crate) fn from_parts(productions: Vec<Production>, roots: Vec<String>) -> Self {
        let mut nonterminals: BTreeSet<String> = roots.iter().cloned().collect();
        let mut terminals = BTreeSet::new();
        for p in &productions {
            nonterminals.insert(p.lhs.clone());
            p.rhs.nonterminals_into(&mut nonterminals);
            p.rhs.terminals_into(&mut terminals);
        }
        Grammar {
            nonterminals,
            terminals,
            productions,
            roots,
        }
    }

    pub fn nonterminals(&self) -> &BTreeSet<String> {
        &self.nonterminals
    }

    pub fn terminals(&self) -> &BTreeSet<String> {
        &self.terminals
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn roots(&self) -> &[String] {
        &self.roots
    }

    pub fn into_parts(self) -> (Vec<Production>, Vec<String>) {
        (self.productions, self.roots)
    }

    pub fn contains(&self, n: &str) -> bool {
        self.nonterminals.contains(n)
    }

    pub fn is_defined(&self, n: &str) -> bool {
        self.productions.iter().any(|p| p.lhs == n)
    }

    /// Productions with the given left-hand side, in grammar order.
    pub fn productions_of(&self, n: &str) -> Result<Vec<&Production>, ModelError> {
        if !self.contains(n) {
            return Err(ModelError::UnknownNonterminal(n.to_string()));
        }
        Ok(self.defining(n).collect())
    }

    pub(crate) fn defining<'a, 'n>(
        &'a self,
        n: &'n str,
    ) -> impl Iterator<Item = &'a Production> + use<'a, 'n> {
        self.productions.iter().filter(move |p| p.lhs == n)
    }

    /// Nonterminals reachable from `start` through right-hand sides.
    pub fn reachable_from<'a, I>(&self, start: I) -> BTreeSet<String>
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut seen: BTreeSet<String> = start.into_iter().cloned().collect();
        let mut work: Vec<String> = seen.iter().cloned().collect();
        while let Some(n) = work.pop() {
            for p in self.defining(&n) {
                let mut used = BTreeSet::new();
                p.rhs.nonterminals_into(&mut used);
                for m in used {
                    if seen.insert(m.clone()) {
                        work.push(m);
                    }
                }
            }
        }
        seen
    }

    pub fn reachable(&self) -> BTreeSet<String> {
        self.reachable_from(self.roots.iter())
    }

    /// Total number of expression nodes over all right-hand sides.
    pub fn rhs_size(&self) -> usize {
        self.productions.iter().map(|p| p.rhs.size()).sum()
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::gin::print_grammar(self))
    }
}

/// Structural identity: equal nonterminals, terminals, roots and
/// productions, the latter as ordered sequences with labels.
pub fn grammar_identical(g: &Grammar, h: &Grammar) -> bool {
    g.nonterminals == h.nonterminals
        && g.terminals == h.terminals
        && g.roots == h.roots
        && g.productions == h.productions
}

/// Identity weakened to a bijection between productions: the production
/// lists must be equal as multisets.
pub fn nominally_equivalent(g: &Grammar, h: &Grammar) -> bool {
    g.nonterminals == h.nonterminals
        && g.terminals == h.terminals
        && g.roots == h.roots
        && production_multiset(&g.productions) == production_multiset(&h.productions)
}

pub(crate) fn production_multiset(ps: &[Production]) -> BTreeMap<&Production, usize> {
    let mut m = BTreeMap::new();
    for p in ps {
        *m.entry(p).or_insert(0) += 1;
    }
    m
}
