//! Abstract Normal Form classification.
//!
//! A grammar is in ANF when it has no terminals, exactly one root, and every
//! nonterminal is either undefined, defined by a single rule whose right-hand
//! side is a nonempty sequence of decorated nonterminals, or defined solely
//! by chain rules. A decorated nonterminal is `n`, `n?`, `n*` or `n+`; a chain
//! rule has a single undecorated nonterminal on its right.

use std::collections::BTreeSet;

use crate::expr::Expr;
use crate::grammar::Grammar;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnfClassification {
    /// Nonterminals defined only by chain rules.
    pub chain: BTreeSet<String>,
    /// Nonterminals defined by exactly one sequence rule.
    pub sequence: BTreeSet<String>,
    /// Undefined nonterminals.
    pub undefined: BTreeSet<String>,
    pub violations: Vec<(String, String)>,
}

impl AnfClassification {
    pub fn is_anf(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Right-hand side of an ANF sequence rule: one decorated nonterminal or a
/// sequence of them.
pub fn is_sequence_rhs(rhs: &Expr) -> bool {
    match rhs {
        Expr::Sequence(items) => items.iter().all(|i| i.decorated_atom().is_some()),
        e => e.decorated_atom().is_some(),
    }
}

pub fn classify_anf(g: &Grammar) -> AnfClassification {
    let mut out = AnfClassification::default();
    if !g.terminals().is_empty() {
        let ts: Vec<String> = g.terminals().iter().map(|t| format!("{t:?}")).collect();
        out.violations.push((
            "-".into(),
            format!("terminal set nonempty: {}", ts.join(" ")),
        ));
    }
    if g.roots().len() != 1 {
        out.violations.push((
            "-".into(),
            format!("expected exactly one root, found {}", g.roots().len()),
        ));
    }
    for n in g.nonterminals() {
        let ps: Vec<_> = g.defining(n).collect();
        if let Some(p) = ps.iter().find(|p| p.label.is_some()) {
            out.violations.push((
                n.clone(),
                format!(
                    "labelled production [{}]",
                    p.label.as_deref().unwrap_or_default()
                ),
            ));
            continue;
        }
        if ps.is_empty() {
            out.undefined.insert(n.clone());
        } else if ps.iter().all(|p| p.is_chain()) {
            out.chain.insert(n.clone());
        } else if ps.len() == 1 {
            if is_sequence_rhs(&ps[0].rhs) {
                out.sequence.insert(n.clone());
            } else {
                out.violations.push((
                    n.clone(),
                    format!("rule is not a sequence of nonterminals: {}", ps[0].rhs),
                ));
            }
        } else {
            out.violations.push((
                n.clone(),
                format!("{} rules, not all of them chain rules", ps.len()),
            ));
        }
    }
    if let [root] = g.roots() {
        if !out.chain.contains(root) && !out.sequence.contains(root) {
            out.violations.push((
                root.clone(),
                "root is not defined by chain or sequence rules".into(),
            ));
        }
    }
    out
}
