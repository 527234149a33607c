//! Rewriting grammars into Abstract Normal Form, and the mutations that
//! undo layered encodings before convergence.
//!
//! Normalization repeatedly picks the first applicable rewrite from a fixed
//! list of stages and applies it as a recorded step, until none applies.
//! Earlier stages take priority, so for instance all terminals are gone
//! before any choice is hoisted.

use std::collections::BTreeMap;

use crate::anf::{classify_anf, AnfClassification};
use crate::error::NormalizeError;
use crate::expr::{Expr, Path};
use crate::grammar::{Grammar, Production};
use crate::trace::{Recorded, Recursion, Step, Trace};
use crate::transform::{apply_forward, occurrences_of, recursive_rule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationResult {
    pub normalized: Grammar,
    pub trace: Trace,
    pub classification: AnfClassification,
}

/// Productions paired with their 1-based index among productions of the
/// same nonterminal.
fn indexed(g: &Grammar) -> Vec<(usize, &Production)> {
    let mut counters: BTreeMap<&str, usize> = BTreeMap::new();
    g.productions()
        .iter()
        .map(|p| {
            let c = counters.entry(p.lhs.as_str()).or_insert(0);
            *c += 1;
            (*c, p)
        })
        .collect()
}

/// Nonterminals in order of their first defining production.
fn defined_in_order(g: &Grammar) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    for p in g.productions() {
        if !out.contains(&p.lhs.as_str()) {
            out.push(&p.lhs);
        }
    }
    out
}

/// `<lhs>_<k>` with the smallest unused `k >= 1`.
pub fn fresh_name(g: &Grammar, lhs: &str) -> String {
    (1..)
        .map(|k| format!("{lhs}_{k}"))
        .find(|n| !g.contains(n))
        .expect("unbounded supply of names")
}

fn recorded(g: &Grammar, n: &str) -> Vec<Recorded> {
    g.productions()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.lhs == n)
        .map(|(i, p)| Recorded {
            position: i + 1,
            label: p.label.clone(),
            rhs: p.rhs.clone(),
        })
        .collect()
}

fn first_node(
    g: &Grammar,
    pred: impl Fn(&Path, &Expr) -> bool,
) -> Option<(usize, &Production, Path)> {
    indexed(g).into_iter().find_map(|(i, p)| {
        p.rhs
            .walk()
            .into_iter()
            .find(|(path, e)| pred(path, e))
            .map(|(path, _)| (i, p, path))
    })
}

fn inline_step(g: &Grammar, n: &str) -> Step {
    let r = recorded(g, n);
    Step::Inline {
        name: n.to_string(),
        production: r.into_iter().next().expect("single production"),
        occurrences: occurrences_of(g, n),
    }
}

fn reroot(g: &Grammar) -> Result<Option<Step>, NormalizeError> {
    let roots = g.roots();
    let Some(first) = roots.first() else {
        return Err(NormalizeError::NoRoot);
    };
    if !g.is_defined(first) {
        return Err(NormalizeError::RootUndefined(first.clone()));
    }
    if roots.len() == 1 {
        return Ok(None);
    }
    let reach = g.reachable_from([first]);
    if let Some(other) = roots[1..].iter().find(|r| !reach.contains(*r)) {
        return Err(NormalizeError::UnreachableRoot {
            root: first.clone(),
            other: other.clone(),
        });
    }
    Ok(Some(Step::Reroot {
        new: vec![first.clone()],
        old: roots.to_vec(),
    }))
}

fn unlabel(g: &Grammar) -> Option<Step> {
    indexed(g).into_iter().find_map(|(index, p)| {
        p.label.as_ref().map(|label| Step::Unlabel {
            lhs: p.lhs.clone(),
            index,
            label: label.clone(),
        })
    })
}

fn unselect(g: &Grammar) -> Option<Step> {
    let (index, p, path) = first_node(g, |_, e| matches!(e, Expr::Selector(..)))?;
    let Some(Expr::Selector(name, body)) = p.rhs.at(&path) else {
        unreachable!()
    };
    Some(Step::Unselect {
        lhs: p.lhs.clone(),
        index,
        path,
        name: name.clone(),
        body: (**body).clone(),
    })
}

fn desugar(g: &Grammar) -> Option<Step> {
    let (index, p, path) = first_node(g, |_, e| {
        matches!(e, Expr::SepListPlus(..) | Expr::SepListStar(..))
    })?;
    let lhs = p.lhs.clone();
    Some(match p.rhs.at(&path) {
        Some(Expr::SepListPlus(e, s)) => Step::DesugarSepPlus {
            lhs,
            index,
            path,
            element: (**e).clone(),
            separator: (**s).clone(),
        },
        Some(Expr::SepListStar(e, s)) => Step::DesugarSepStar {
            lhs,
            index,
            path,
            element: (**e).clone(),
            separator: (**s).clone(),
        },
        _ => unreachable!(),
    })
}

fn abstract_terminals(g: &Grammar) -> Option<Step> {
    indexed(g)
        .into_iter()
        .find(|(_, p)| p.rhs.abstracted() != p.rhs)
        .map(|(index, p)| Step::Abstract {
            lhs: p.lhs.clone(),
            index,
            rhs: p.rhs.clone(),
        })
}

fn eliminate_epsilon(g: &Grammar) -> Result<Option<Step>, NormalizeError> {
    let Some(pos) = g.productions().iter().position(|p| p.rhs == Expr::Epsilon) else {
        return Ok(None);
    };
    let n = g.productions()[pos].lhs.as_str();
    if g.defining(n).count() == 1 {
        if g.roots().iter().any(|r| r == n) {
            return Err(NormalizeError::EmptyRoot(n.to_string()));
        }
        return Ok(Some(inline_step(g, n)));
    }
    Ok(Some(Step::EliminateEpsilon {
        name: n.to_string(),
        production: Recorded {
            position: pos + 1,
            label: g.productions()[pos].label.clone(),
            rhs: Expr::Epsilon,
        },
        occurrences: occurrences_of(g, n),
    }))
}

fn hoist_choice(g: &Grammar) -> Option<Step> {
    let (_, p, path) = first_node(g, |path, e| {
        !path.is_empty() && matches!(e, Expr::Choice(_))
    })?;
    Some(Step::Extract {
        name: fresh_name(g, &p.lhs),
        expr: p.rhs.at(&path).expect("walked path").clone(),
        scope: vec![p.lhs.clone()],
    })
}

fn vertical(g: &Grammar) -> Option<Step> {
    defined_in_order(g).into_iter().find_map(|n| {
        let ps: Vec<&Production> = g.defining(n).collect();
        matches!(ps[..], [p] if matches!(p.rhs, Expr::Choice(_))).then(|| Step::Vertical {
            name: n.to_string(),
        })
    })
}

fn shape(g: &Grammar) -> Option<Step> {
    for n in defined_in_order(g) {
        let ps: Vec<&Production> = g.defining(n).collect();
        if ps.len() < 2 {
            continue;
        }
        if let Some(p) = ps.iter().find(|p| !p.is_chain()) {
            return Some(Step::Extract {
                name: fresh_name(g, n),
                expr: p.rhs.clone(),
                scope: vec![n.to_string()],
            });
        }
    }
    let (_, p, path) = first_node(g, |_, e| match e {
        Expr::Optional(b) | Expr::Star(b) | Expr::Plus(b) => b.as_nonterminal().is_none(),
        _ => false,
    })?;
    let body = p.rhs.at(&path).expect("walked path").children()[0].clone();
    Some(Step::Extract {
        name: fresh_name(g, &p.lhs),
        expr: body,
        scope: vec![p.lhs.clone()],
    })
}

fn inline_trivial_chain(g: &Grammar) -> Option<Step> {
    defined_in_order(g).into_iter().find_map(|n| {
        let ps: Vec<&Production> = g.defining(n).collect();
        let trivial = matches!(ps[..], [p] if p.rhs.as_nonterminal().is_some_and(|m| m != n));
        (trivial && !g.roots().iter().any(|r| r == n)).then(|| inline_step(g, n))
    })
}

fn remove_unreachable(g: &Grammar) -> Option<Step> {
    let reach = g.reachable();
    defined_in_order(g)
        .into_iter()
        .find(|n| !reach.contains(*n))
        .map(|n| Step::RemoveUnreachable {
            name: n.to_string(),
            productions: recorded(g, n),
        })
}

/// The next normalization step, or `None` once the grammar is in ANF.
fn next_step(g: &Grammar) -> Result<Option<Step>, NormalizeError> {
    if let Some(s) = reroot(g)? {
        return Ok(Some(s));
    }
    if let Some(s) = unlabel(g)
        .or_else(|| unselect(g))
        .or_else(|| desugar(g))
        .or_else(|| abstract_terminals(g))
    {
        return Ok(Some(s));
    }
    if let Some(s) = eliminate_epsilon(g)? {
        return Ok(Some(s));
    }
    Ok(hoist_choice(g)
        .or_else(|| vertical(g))
        .or_else(|| shape(g))
        .or_else(|| inline_trivial_chain(g))
        .or_else(|| remove_unreachable(g)))
}

pub fn step_budget(g: &Grammar) -> usize {
    10 * (g.nonterminals().len() + g.productions().len() + g.rhs_size())
}

/// Rewrites `g` into ANF, recording every step.
pub fn normalize(g: &Grammar) -> Result<NormalizationResult, NormalizeError> {
    let budget = step_budget(g);
    let mut cur = g.clone();
    let mut trace = Trace::new();
    while let Some(step) = next_step(&cur)? {
        if trace.len() == budget {
            return Err(NormalizeError::BudgetExhausted(budget));
        }
        cur = apply_forward(&cur, &step)?;
        trace.push(step);
    }
    let classification = classify_anf(&cur);
    if !classification.is_anf() {
        let (n, r) = &classification.violations[0];
        return Err(NormalizeError::Incomplete(format!("{n}: {r}")));
    }
    Ok(NormalizationResult {
        normalized: cur,
        trace,
        classification,
    })
}

/// Matches `n ::= base ; n ::= n part` (left) or `n ::= base ; n ::= part n`
/// (right) on exactly two adjacent unlabelled productions.
fn yaccified(g: &Grammar, n: &str) -> Option<Step> {
    let positions: Vec<usize> = (0..g.productions().len())
        .filter(|&i| g.productions()[i].lhs == n)
        .collect();
    let [a, b] = positions[..] else { return None };
    if b != a + 1 {
        return None;
    }
    let (pa, pb) = (&g.productions()[a], &g.productions()[b]);
    if pa.label.is_some() || pb.label.is_some() {
        return None;
    }
    for (base_index, base, rec) in [(1, pa, pb), (2, pb, pa)] {
        if base.rhs.mentions(n) {
            continue;
        }
        let Expr::Sequence(items) = &rec.rhs else {
            continue;
        };
        let candidates = [
            (Recursion::Left, items.first(), &items[1..]),
            (Recursion::Right, items.last(), &items[..items.len() - 1]),
        ];
        for (recursion, end, rest) in candidates {
            if !end.is_some_and(|e| e.is_nonterminal(n)) {
                continue;
            }
            let part = Expr::seq(rest.to_vec());
            if part == Expr::Epsilon
                || part.mentions(n)
                || recursive_rule(recursion, n, &part) != rec.rhs
            {
                continue;
            }
            return Some(Step::Deyaccify {
                name: n.to_string(),
                recursion,
                base: base.rhs.clone(),
                part,
                base_index,
            });
        }
    }
    None
}

/// A non-root nonterminal with one bare chain rule, used exactly once, as
/// the whole right-hand side of another nonterminal's rule.
fn layer(g: &Grammar, n: &str) -> Option<Step> {
    if g.roots().iter().any(|r| r == n) {
        return None;
    }
    let ps: Vec<&Production> = g.defining(n).collect();
    let [p] = ps[..] else { return None };
    if p.label.is_some() || !p.rhs.as_nonterminal().is_some_and(|m| m != n) {
        return None;
    }
    let occs = occurrences_of(g, n);
    let [o] = &occs[..] else { return None };
    (o.lhs != n && o.path.is_empty()).then(|| inline_step(g, n))
}

/// Deyaccifies recursion patterns and collapses chain layers until neither
/// applies. Grammars without such patterns come back unchanged.
pub fn mutate_for_convergence(g: &Grammar) -> (Grammar, Trace) {
    let mut cur = g.clone();
    let mut trace = Trace::new();
    loop {
        let names: Vec<String> = defined_in_order(&cur)
            .into_iter()
            .map(str::to_string)
            .collect();
        let step = names
            .iter()
            .find_map(|n| yaccified(&cur, n))
            .or_else(|| names.iter().find_map(|n| layer(&cur, n)));
        let Some(step) = step else { break };
        match apply_forward(&cur, &step) {
            Ok(next) => {
                cur = next;
                trace.push(step);
            }
            Err(_) => break,
        }
    }
    (cur, trace)
}
