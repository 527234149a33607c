//! Forward and backward application of transformation steps.
//!
//! Every step carries the context its inverse needs, so `backward` never
//! consults anything but the grammar and the step. A step whose
//! preconditions fail is an error, never a silent no-op.

use crate::error::{TraceError, TransformError};
use crate::expr::{Expr, Path};
use crate::grammar::{Grammar, Production};
use crate::trace::{Occurrence, Recorded, Recursion, Step, Trace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

type Result<T> = std::result::Result<T, TransformError>;
type ExprTest = fn(&Expr) -> bool;

struct Work {
    op: &'static str,
    productions: Vec<Production>,
    roots: Vec<String>,
}

impl Work {
    fn new(g: &Grammar, op: &'static str) -> Self {
        let (productions, roots) = g.clone().into_parts();
        Work {
            op,
            productions,
            roots,
        }
    }

    fn fail<T>(&self, symbol: &str, reason: impl Into<String>) -> Result<T> {
        Err(TransformError::new(self.op, symbol, reason))
    }

    fn finish(self) -> Grammar {
        Grammar::from_parts(self.productions, self.roots)
    }

    fn positions_of(&self, n: &str) -> Vec<usize> {
        self.productions
            .iter()
            .enumerate()
            .filter(|(_, p)| p.lhs == n)
            .map(|(i, _)| i)
            .collect()
    }

    fn position(&self, lhs: &str, index: usize) -> Result<usize> {
        match index
            .checked_sub(1)
            .and_then(|i| self.positions_of(lhs).get(i).copied())
        {
            Some(p) => Ok(p),
            None => self.fail(lhs, format!("no production #{index}")),
        }
    }

    fn only_position(&self, n: &str) -> Result<usize> {
        match self.positions_of(n).as_slice() {
            [p] => Ok(*p),
            ps => self.fail(
                n,
                format!("expected exactly one production, found {}", ps.len()),
            ),
        }
    }

    fn grammar(&self) -> Grammar {
        Grammar::from_parts(self.productions.clone(), self.roots.clone())
    }

    fn node(&self, pos: usize, path: &[usize]) -> Result<&Expr> {
        let p = &self.productions[pos];
        match p.rhs.at(path) {
            Some(e) => Ok(e),
            None => self.fail(&p.lhs, format!("no node at path {path:?}")),
        }
    }

    fn node_mut(&mut self, pos: usize, path: &[usize]) -> Result<&mut Expr> {
        let lhs = self.productions[pos].lhs.clone();
        match self.productions[pos].rhs.at_mut(path) {
            Some(e) => Ok(e),
            None => Err(TransformError::new(
                self.op,
                &lhs,
                format!("no node at path {path:?}"),
            )),
        }
    }

    /// All occurrences of `n` across the grammar, in grammar order then
    /// pre-order, with 1-based per-lhs production indices.
    fn occurrences(&self, n: &str) -> Vec<Occurrence> {
        let mut counters: std::collections::BTreeMap<&str, usize> = Default::default();
        let mut out = Vec::new();
        for p in &self.productions {
            let idx = counters.entry(p.lhs.as_str()).or_insert(0);
            *idx += 1;
            for path in p.rhs.occurrences(n) {
                out.push(Occurrence {
                    lhs: p.lhs.clone(),
                    index: *idx,
                    path,
                });
            }
        }
        out
    }

    fn insert_recorded(&mut self, lhs: &str, r: &Recorded) -> Result<()> {
        if r.position == 0 || r.position > self.productions.len() + 1 {
            return self.fail(lhs, format!("position {} out of range", r.position));
        }
        self.productions.insert(
            r.position - 1,
            Production {
                label: r.label.clone(),
                lhs: lhs.to_string(),
                rhs: r.rhs.clone(),
            },
        );
        Ok(())
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if !crate::gin::is_identifier(name) || crate::gin::KEYWORDS.contains(&name) {
            return self.fail(name, "not a valid nonterminal name");
        }
        if self.grammar().contains(name) {
            return self.fail(name, "target name is not fresh");
        }
        Ok(())
    }
}

/// Replaces the node at `path` by `new`, splicing a sequence into a parent
/// sequence (or a choice into a parent choice).
fn splice_replace(rhs: &mut Expr, path: &[usize], new: Expr) -> bool {
    let Some((&last, parent_path)) = path.split_last() else {
        *rhs = new;
        return true;
    };
    let Some(parent) = rhs.at_mut(parent_path) else {
        return false;
    };
    match (parent, new) {
        (Expr::Sequence(items), Expr::Sequence(inner))
        | (Expr::Choice(items), Expr::Choice(inner)) => {
            if last >= items.len() {
                return false;
            }
            items.splice(last..=last, inner);
            true
        }
        (parent, new) => match parent.at_mut(&[last]) {
            Some(slot) => {
                *slot = new;
                true
            }
            None => false,
        },
    }
}

/// Inverse of [`splice_replace`]: the span that `new` occupies at `path`
/// is replaced by `old`. Fails when the span does not hold `new`.
fn splice_restore(rhs: &mut Expr, path: &[usize], new: &Expr, old: Expr) -> bool {
    let Some((&last, parent_path)) = path.split_last() else {
        if rhs != new {
            return false;
        }
        *rhs = old;
        return true;
    };
    let Some(parent) = rhs.at_mut(parent_path) else {
        return false;
    };
    match (parent, new) {
        (Expr::Sequence(items), Expr::Sequence(inner))
        | (Expr::Choice(items), Expr::Choice(inner)) => {
            let end = last + inner.len();
            if end > items.len() || items[last..end] != inner[..] {
                return false;
            }
            items.splice(last..end, [old]);
            true
        }
        (parent, new) => match parent.at_mut(&[last]) {
            Some(slot) if slot == new => {
                *slot = old;
                true
            }
            _ => false,
        },
    }
}

fn desugared(plus: bool, element: &Expr, separator: &Expr) -> Expr {
    if !separator.has_nonterminals() {
        if plus {
            Expr::plus(element.clone())
        } else {
            Expr::star(element.clone())
        }
    } else {
        let body = Expr::seq(vec![
            element.clone(),
            Expr::star(Expr::seq(vec![separator.clone(), element.clone()])),
        ]);
        if plus {
            body
        } else {
            Expr::opt(body)
        }
    }
}

fn deyaccified(recursion: Recursion, base: &Expr, part: &Expr) -> Expr {
    match recursion {
        Recursion::Left => Expr::seq(vec![base.clone(), Expr::star(part.clone())]),
        Recursion::Right => Expr::seq(vec![Expr::star(part.clone()), base.clone()]),
    }
}

pub(crate) fn recursive_rule(recursion: Recursion, name: &str, part: &Expr) -> Expr {
    match recursion {
        Recursion::Left => Expr::seq(vec![Expr::nt(name), part.clone()]),
        Recursion::Right => Expr::seq(vec![part.clone(), Expr::nt(name)]),
    }
}

fn leftmost(rhs: &Expr, pred: impl Fn(&Expr) -> bool) -> Option<Path> {
    rhs.walk()
        .into_iter()
        .find(|(_, e)| pred(e))
        .map(|(p, _)| p)
}

fn is_plus(e: &Expr) -> bool {
    matches!(e, Expr::Plus(_))
}

fn is_star(e: &Expr) -> bool {
    matches!(e, Expr::Star(_))
}

/// Rewrites one repetition at `path` (or the leftmost eligible one) from
/// the `from` kind to the other kind.
fn flip_repetition(
    w: &mut Work,
    lhs: &str,
    index: usize,
    path: &Option<Path>,
    to_star: bool,
) -> Result<()> {
    let pos = w.position(lhs, index)?;
    let (want, kind): (fn(&Expr) -> bool, &str) = if to_star {
        (is_plus, "`+`")
    } else {
        (is_star, "`*`")
    };
    let target = match path {
        Some(p) => p.clone(),
        None => match leftmost(&w.productions[pos].rhs, want) {
            Some(p) => p,
            None => return w.fail(lhs, format!("no {kind} repetition to rewrite")),
        },
    };
    let node = w.node_mut(pos, &target)?;
    let body = match std::mem::replace(node, Expr::Epsilon) {
        Expr::Plus(b) if to_star => b,
        Expr::Star(b) if !to_star => b,
        other => {
            *node = other;
            return w.fail(lhs, format!("no {kind} repetition at {target:?}"));
        }
    };
    *node = if to_star {
        Expr::Star(body)
    } else {
        Expr::Plus(body)
    };
    Ok(())
}

/// Backward of a path-less widen/narrow: the unique repetition whose flip
/// makes it the leftmost one of the original kind.
fn pathless_inverse(w: &mut Work, lhs: &str, index: usize, to_star: bool) -> Result<()> {
    let pos = w.position(lhs, index)?;
    let rhs = w.productions[pos].rhs.clone();
    let (now, before): (ExprTest, ExprTest) = if to_star {
        (is_star, is_plus)
    } else {
        (is_plus, is_star)
    };
    let mut candidates = Vec::new();
    for (path, e) in rhs.walk() {
        if !now(e) {
            continue;
        }
        let mut trial = rhs.clone();
        let slot = trial.at_mut(&path).expect("walked path exists");
        *slot = match slot.clone() {
            Expr::Plus(b) => Expr::Star(b),
            Expr::Star(b) => Expr::Plus(b),
            _ => unreachable!(),
        };
        if leftmost(&trial, before).as_ref() == Some(&path) {
            candidates.push(trial);
        }
    }
    match candidates.len() {
        1 => {
            w.productions[pos].rhs = candidates.pop().unwrap();
            Ok(())
        }
        0 => w.fail(lhs, "no repetition to restore"),
        _ => w.fail(lhs, "ambiguous inverse without a recorded path"),
    }
}

fn replace_occurrences(
    w: &mut Work,
    occs: &[Occurrence],
    expect: &Expr,
    with: &Expr,
) -> Result<()> {
    for o in occs {
        let pos = w.position(&o.lhs, o.index)?;
        let node = w.node_mut(pos, &o.path)?;
        if node != expect {
            let found = node.to_string();
            return w.fail(
                &o.lhs,
                format!("expected {expect} at {:?}, found {found}", o.path),
            );
        }
        *node = with.clone();
    }
    Ok(())
}

fn nests(parent: &Expr, child: &Expr) -> bool {
    matches!(
        (parent, child),
        (Expr::Sequence(_), Expr::Sequence(_)) | (Expr::Choice(_), Expr::Choice(_))
    )
}

fn forward(g: &Grammar, step: &Step) -> Result<Grammar> {
    let mut w = Work::new(g, step.operator());
    match step {
        Step::Rename { from, to } => {
            if !g.contains(from) {
                return w.fail(from, "source name is not a nonterminal");
            }
            w.check_fresh(to)?;
            for p in &mut w.productions {
                if p.lhs == *from {
                    p.lhs = to.clone();
                }
                p.rhs.rename(from, to);
            }
            for r in &mut w.roots {
                if r == from {
                    *r = to.clone();
                }
            }
        }
        Step::Unlabel { lhs, index, label } => {
            let pos = w.position(lhs, *index)?;
            if w.productions[pos].label.as_deref() != Some(label) {
                return w.fail(lhs, format!("label `{label}` not present"));
            }
            w.productions[pos].label = None;
        }
        Step::Unselect {
            lhs,
            index,
            path,
            name,
            body,
        } => {
            let pos = w.position(lhs, *index)?;
            let old = Expr::sel(name.clone(), body.clone());
            if *w.node(pos, path)? != old {
                return w.fail(lhs, format!("no selector `{name}` at {path:?}"));
            }
            splice_replace(&mut w.productions[pos].rhs, path, body.clone());
        }
        Step::Abstract { lhs, index, rhs } => {
            let pos = w.position(lhs, *index)?;
            if w.productions[pos].rhs != *rhs {
                return w.fail(lhs, "right-hand side differs from the recorded one");
            }
            let new = rhs.abstracted();
            if new == *rhs {
                return w.fail(lhs, "nothing to abstract");
            }
            w.productions[pos].rhs = new;
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
        } => {
            let plus = matches!(step, Step::DesugarSepPlus { .. });
            let pos = w.position(lhs, *index)?;
            let old = if plus {
                Expr::sep_plus(element.clone(), separator.clone())
            } else {
                Expr::sep_star(element.clone(), separator.clone())
            };
            if *w.node(pos, path)? != old {
                return w.fail(lhs, format!("no separator list {old} at {path:?}"));
            }
            splice_replace(
                &mut w.productions[pos].rhs,
                path,
                desugared(plus, element, separator),
            );
        }
        Step::Extract { name, expr, scope } => {
            w.check_fresh(name)?;
            let mut seen = std::collections::BTreeSet::new();
            for s in scope {
                if !seen.insert(s) || !g.is_defined(s) {
                    return w.fail(s, "scope must list distinct defined nonterminals");
                }
            }
            if matches!(expr, Expr::Epsilon) {
                return w.fail(name, "cannot extract `eps`");
            }
            let mut count = 0;
            for p in w.productions.iter_mut().filter(|p| scope.contains(&p.lhs)) {
                count += replace_nodes(&mut p.rhs, expr, &Expr::nt(name.clone()));
            }
            if count == 0 {
                return w.fail(name, format!("{expr} does not occur in scope"));
            }
            let at = extract_position(&w.productions, scope);
            w.productions
                .insert(at, Production::new(name.clone(), expr.clone()));
        }
        Step::Inline {
            name,
            production,
            occurrences,
        } => {
            if w.roots.contains(name) {
                return w.fail(name, "cannot inline a root");
            }
            let pos = w.only_position(name)?;
            let p = &w.productions[pos];
            if pos + 1 != production.position
                || p.label != production.label
                || p.rhs != production.rhs
            {
                return w.fail(name, "production differs from the recorded one");
            }
            if production.rhs.mentions(name) {
                return w.fail(name, "nonterminal occurs in its own definition");
            }
            if w.occurrences(name) != *occurrences {
                return w.fail(name, "recorded occurrences are not all occurrences");
            }
            for o in occurrences {
                let at = w.position(&o.lhs, o.index)?;
                if let Some((_, parent)) = o.path.split_last() {
                    if nests(w.node(at, parent)?, &production.rhs) {
                        return w.fail(name, "inlining would nest a sequence or choice");
                    }
                }
            }
            replace_occurrences(
                &mut w,
                occurrences,
                &Expr::nt(name.clone()),
                &production.rhs,
            )?;
            w.productions.remove(pos);
        }
        Step::Vertical { name } => {
            let pos = w.only_position(name)?;
            let p = &w.productions[pos];
            if p.label.is_some() {
                return w.fail(name, "production is labelled");
            }
            let Expr::Choice(alts) = &p.rhs else {
                return w.fail(name, "right-hand side is not a choice");
            };
            let new: Vec<Production> = alts
                .iter()
                .map(|a| Production::new(name.clone(), a.clone()))
                .collect();
            w.productions.splice(pos..=pos, new);
        }
        Step::Widen { lhs, index, path } => flip_repetition(&mut w, lhs, *index, path, true)?,
        Step::Narrow { lhs, index, path } => flip_repetition(&mut w, lhs, *index, path, false)?,
        Step::Permute { lhs, order } => {
            let pos = w.only_position(lhs)?;
            let Expr::Sequence(items) = &w.productions[pos].rhs else {
                return w.fail(lhs, "right-hand side is not a sequence");
            };
            if !is_permutation(order, items.len()) {
                return w.fail(
                    lhs,
                    format!("{order:?} is not a permutation of {} items", items.len()),
                );
            }
            let new = order.iter().map(|&i| items[i].clone()).collect();
            w.productions[pos].rhs = Expr::Sequence(new);
        }
        Step::Deyaccify {
            name,
            recursion,
            base,
            part,
            base_index,
        } => {
            let ps = w.positions_of(name);
            let [a, b] = ps[..] else {
                return w.fail(
                    name,
                    format!("expected two productions, found {}", ps.len()),
                );
            };
            if b != a + 1 {
                return w.fail(name, "productions are not adjacent");
            }
            if base.mentions(name) || part.mentions(name) || *part == Expr::Epsilon {
                return w.fail(name, "base or recursive part is malformed");
            }
            let (bp, rp) = match base_index {
                1 => (a, b),
                2 => (b, a),
                _ => return w.fail(name, "base index must be 1 or 2"),
            };
            let (pb, pr) = (&w.productions[bp], &w.productions[rp]);
            if pb.label.is_some() || pr.label.is_some() {
                return w.fail(name, "labelled production");
            }
            if pb.rhs != *base || pr.rhs != recursive_rule(*recursion, name, part) {
                return w.fail(name, "productions do not match the recursion pattern");
            }
            w.productions[a] = Production::new(name.clone(), deyaccified(*recursion, base, part));
            w.productions.remove(b);
        }
        Step::RemoveUnreachable { name, productions } => {
            if productions.is_empty() {
                return w.fail(name, "no productions recorded");
            }
            if g.reachable().contains(name) {
                return w.fail(name, "nonterminal is reachable from the roots");
            }
            let actual: Vec<Recorded> = w
                .positions_of(name)
                .into_iter()
                .map(|i| Recorded {
                    position: i + 1,
                    label: w.productions[i].label.clone(),
                    rhs: w.productions[i].rhs.clone(),
                })
                .collect();
            if actual != *productions {
                return w.fail(name, "recorded productions differ from the grammar");
            }
            w.productions.retain(|p| p.lhs != *name);
        }
        Step::Reroot { new, old } => {
            if w.roots != *old {
                return w.fail(
                    &old.join(" "),
                    "current roots differ from the recorded ones",
                );
            }
            if new == old || new.is_empty() {
                return w.fail(
                    &new.join(" "),
                    "new root set must be nonempty and different",
                );
            }
            let mut seen = std::collections::BTreeSet::new();
            for n in new {
                if !g.contains(n) || !seen.insert(n) {
                    return w.fail(n, "root must be a distinct known nonterminal");
                }
            }
            w.roots = new.clone();
        }
        Step::EliminateEpsilon {
            name,
            production,
            occurrences,
        } => {
            let pos = production.position.wrapping_sub(1);
            match w.productions.get(pos) {
                Some(p)
                    if p.lhs == *name
                        && p.rhs == Expr::Epsilon
                        && production.rhs == Expr::Epsilon
                        && p.label == production.label => {}
                _ => {
                    return w.fail(
                        name,
                        format!("no `{name} ::= eps` at position {}", production.position),
                    )
                }
            }
            if w.occurrences(name) != *occurrences {
                return w.fail(name, "recorded occurrences are not all occurrences");
            }
            let n = Expr::nt(name.clone());
            replace_occurrences(&mut w, occurrences, &n, &Expr::opt(n.clone()))?;
            w.productions.remove(pos);
        }
    }
    Ok(w.finish())
}

fn backward_raw(g: &Grammar, step: &Step) -> Result<Grammar> {
    let mut w = Work::new(g, step.operator());
    match step {
        Step::Rename { from, to } => {
            return forward(
                g,
                &Step::Rename {
                    from: to.clone(),
                    to: from.clone(),
                },
            )
            .map_err(|mut e| {
                e.operator = "rename";
                e
            });
        }
        Step::Unlabel { lhs, index, label } => {
            let pos = w.position(lhs, *index)?;
            if w.productions[pos].label.is_some() {
                return w.fail(lhs, "production is already labelled");
            }
            w.productions[pos].label = Some(label.clone());
        }
        Step::Unselect {
            lhs,
            index,
            path,
            name,
            body,
        } => {
            let pos = w.position(lhs, *index)?;
            let old = Expr::sel(name.clone(), body.clone());
            if !splice_restore(&mut w.productions[pos].rhs, path, body, old) {
                return w.fail(lhs, format!("selector body not found at {path:?}"));
            }
        }
        Step::Abstract { lhs, index, rhs } => {
            let pos = w.position(lhs, *index)?;
            let abstracted = rhs.abstracted();
            if abstracted == *rhs || w.productions[pos].rhs != abstracted {
                return w.fail(lhs, "right-hand side is not the recorded abstraction");
            }
            w.productions[pos].rhs = rhs.clone();
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
        } => {
            let plus = matches!(step, Step::DesugarSepPlus { .. });
            let pos = w.position(lhs, *index)?;
            let old = if plus {
                Expr::sep_plus(element.clone(), separator.clone())
            } else {
                Expr::sep_star(element.clone(), separator.clone())
            };
            let new = desugared(plus, element, separator);
            if !splice_restore(&mut w.productions[pos].rhs, path, &new, old) {
                return w.fail(lhs, format!("desugared list not found at {path:?}"));
            }
        }
        Step::Extract { name, expr, scope } => {
            if w.roots.contains(name) {
                return w.fail(name, "extracted nonterminal is a root");
            }
            let pos = w.only_position(name)?;
            if w.productions[pos].rhs != *expr || w.productions[pos].label.is_some() {
                return w.fail(name, "definition differs from the recorded expression");
            }
            w.productions.remove(pos);
            let marker = Expr::nt(name.clone());
            for p in w.productions.iter_mut() {
                if scope.contains(&p.lhs) {
                    replace_nodes(&mut p.rhs, &marker, expr);
                } else if p.rhs.mentions(name) {
                    let lhs = p.lhs.clone();
                    return w.fail(&lhs, format!("`{name}` used outside the recorded scope"));
                }
            }
        }
        Step::Inline {
            name,
            production,
            occurrences,
        } => {
            if g.contains(name) {
                return w.fail(name, "inlined nonterminal still present");
            }
            w.insert_recorded(name, production)?;
            replace_occurrences(
                &mut w,
                occurrences,
                &production.rhs,
                &Expr::nt(name.clone()),
            )?;
        }
        Step::Vertical { name } => {
            let ps = w.positions_of(name);
            if ps.len() < 2 || ps.windows(2).any(|p| p[1] != p[0] + 1) {
                return w.fail(name, "expected at least two adjacent productions");
            }
            let alts: Vec<Expr> = ps.iter().map(|&i| w.productions[i].rhs.clone()).collect();
            let merged = Production::new(name.clone(), Expr::Choice(alts));
            w.productions.splice(ps[0]..=ps[ps.len() - 1], [merged]);
        }
        Step::Widen { lhs, index, path } => match path {
            Some(_) => flip_repetition(&mut w, lhs, *index, path, false)?,
            None => pathless_inverse(&mut w, lhs, *index, true)?,
        },
        Step::Narrow { lhs, index, path } => match path {
            Some(_) => flip_repetition(&mut w, lhs, *index, path, true)?,
            None => pathless_inverse(&mut w, lhs, *index, false)?,
        },
        Step::Permute { lhs, order } => {
            let pos = w.only_position(lhs)?;
            let Expr::Sequence(items) = &w.productions[pos].rhs else {
                return w.fail(lhs, "right-hand side is not a sequence");
            };
            if !is_permutation(order, items.len()) {
                return w.fail(
                    lhs,
                    format!("{order:?} is not a permutation of {} items", items.len()),
                );
            }
            let mut old = items.clone();
            for (i, &j) in order.iter().enumerate() {
                old[j] = items[i].clone();
            }
            w.productions[pos].rhs = Expr::Sequence(old);
        }
        Step::Deyaccify {
            name,
            recursion,
            base,
            part,
            base_index,
        } => {
            let pos = w.only_position(name)?;
            if w.productions[pos].rhs != deyaccified(*recursion, base, part) {
                return w.fail(name, "right-hand side is not the recorded iteration");
            }
            let b = Production::new(name.clone(), base.clone());
            let r = Production::new(name.clone(), recursive_rule(*recursion, name, part));
            let pair = if *base_index == 1 { [b, r] } else { [r, b] };
            w.productions.splice(pos..=pos, pair);
        }
        Step::RemoveUnreachable { name, productions } => {
            if g.is_defined(name) {
                return w.fail(name, "nonterminal is still defined");
            }
            for r in productions {
                w.insert_recorded(name, r)?;
            }
        }
        Step::Reroot { new, old } => {
            if w.roots != *new {
                return w.fail(
                    &new.join(" "),
                    "current roots differ from the recorded ones",
                );
            }
            w.roots = old.clone();
        }
        Step::EliminateEpsilon {
            name,
            production,
            occurrences,
        } => {
            w.insert_recorded(name, production)?;
            let n = Expr::nt(name.clone());
            replace_occurrences(&mut w, occurrences, &Expr::opt(n.clone()), &n)?;
        }
    }
    Ok(w.finish())
}

fn is_permutation(order: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    order.len() == n
        && order
            .iter()
            .all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

/// Replaces whole-node occurrences of `target`, without descending into a
/// replaced node. Returns the number of replacements.
fn replace_nodes(e: &mut Expr, target: &Expr, with: &Expr) -> usize {
    if e == target {
        *e = with.clone();
        return 1;
    }
    match e {
        Expr::Sequence(v) | Expr::Choice(v) => {
            v.iter_mut().map(|c| replace_nodes(c, target, with)).sum()
        }
        Expr::Optional(b) | Expr::Star(b) | Expr::Plus(b) | Expr::Selector(_, b) => {
            replace_nodes(b, target, with)
        }
        Expr::SepListPlus(a, b) | Expr::SepListStar(a, b) => {
            replace_nodes(a, target, with) + replace_nodes(b, target, with)
        }
        _ => 0,
    }
}

/// Extracted productions go right after the last production of the scope.
fn extract_position(ps: &[Production], scope: &[String]) -> usize {
    ps.iter()
        .rposition(|p| scope.contains(&p.lhs))
        .map_or(ps.len(), |i| i + 1)
}

/// All occurrences of `n`, in the form `inline` and `eliminateEpsilon` record.
pub(crate) fn occurrences_of(g: &Grammar, n: &str) -> Vec<Occurrence> {
    Work::new(g, "-").occurrences(n)
}

/// Applies one step forward.
pub fn apply_forward(g: &Grammar, step: &Step) -> Result<Grammar> {
    forward(g, step)
}

/// Applies one step backward: the unique grammar that `step` maps to `g`.
pub fn apply_backward(g: &Grammar, step: &Step) -> Result<Grammar> {
    let h = backward_raw(g, step)?;
    match forward(&h, step) {
        Ok(again) if again == *g => Ok(h),
        _ => Err(TransformError::new(
            step.operator(),
            "-",
            "grammar is not in the image of this step",
        )),
    }
}

/// Replays a trace. Backward replay undoes steps from last to first; errors
/// carry the 1-based index of the failing step within the trace.
pub fn apply_trace(
    g: &Grammar,
    t: &Trace,
    direction: Direction,
) -> std::result::Result<Grammar, TraceError> {
    let mut cur = g.clone();
    match direction {
        Direction::Forward => {
            for (i, s) in t.steps.iter().enumerate() {
                cur = forward(&cur, s).map_err(|error| TraceError {
                    index: i + 1,
                    error,
                })?;
            }
        }
        Direction::Backward => {
            for (i, s) in t.steps.iter().enumerate().rev() {
                cur = apply_backward(&cur, s).map_err(|error| TraceError {
                    index: i + 1,
                    error,
                })?;
            }
        }
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gin::{parse_grammar, print_grammar};
    use crate::grammar::grammar_identical;
    use crate::trace::parse_trace;

    fn g(text: &str) -> Grammar {
        parse_grammar(text).unwrap()
    }

    fn step(text: &str) -> Step {
        parse_trace(text).unwrap().steps.remove(0)
    }

    fn roundtrip(grammar: &Grammar, s: &Step) -> Grammar {
        let out = apply_forward(grammar, s).unwrap();
        let back = apply_backward(&out, s).unwrap();
        assert!(grammar_identical(&back, grammar), "{s}\n{back}\n{grammar}");
        out
    }

    #[test]
    fn rename_requires_fresh_target() {
        let gr = g("root P\nP ::= F1 F ;\n");
        let err = apply_forward(&gr, &step("rename(F1, F) ;")).unwrap_err();
        assert_eq!(err.operator, "rename");
        assert_eq!(err.symbol, "F");
        let err = apply_forward(&gr, &step("rename(Q, R) ;")).unwrap_err();
        assert_eq!(err.symbol, "Q");
    }

    #[test]
    fn rename_everywhere() {
        let gr = g("root F1\nF1 ::= S F1* ;\n");
        let out = roundtrip(&gr, &step("rename(F1, F) ;"));
        assert_eq!(print_grammar(&out), "root F\nF ::= S F* ;\n");
    }

    #[test]
    fn widen_and_narrow() {
        let gr = g("root E\nE ::= S E+ ;\n");
        let out = roundtrip(&gr, &step("widen(E, 1) ;"));
        assert_eq!(print_grammar(&out), "root E\nE ::= S E* ;\n");
        let back = apply_backward(&out, &step("widen(E, 1) ;")).unwrap();
        assert_eq!(print_grammar(&back), "root E\nE ::= S E+ ;\n");
        let with_path = roundtrip(&gr, &step("widen(E, 1, [1]) ;"));
        assert_eq!(with_path, out);
        assert!(apply_forward(&out, &step("widen(E, 1) ;")).is_err());
    }

    #[test]
    fn pathless_widen_inverse_must_be_unique() {
        let gr = g("root E\nE ::= A* B+ ;\n");
        let s = step("widen(E, 1) ;");
        let out = apply_forward(&gr, &s).unwrap();
        assert_eq!(print_grammar(&out), "root E\nE ::= A* B* ;\n");
        assert!(apply_backward(&out, &s).is_err());
        let s = step("widen(E, 1, [1]) ;");
        assert_eq!(apply_backward(&out, &s).unwrap(), gr);
    }

    #[test]
    fn deyaccify_left_and_right() {
        let gr = g("root X\nX ::= A ;\nX ::= X B ;\n");
        let out = roundtrip(&gr, &step("deyaccify(X, left, <A>, <B>, 1) ;"));
        assert_eq!(print_grammar(&out), "root X\nX ::= A B* ;\n");
        let gr = g("root X\nX ::= B X ;\nX ::= A ;\n");
        let out = roundtrip(&gr, &step("deyaccify(X, right, <A>, <B>, 2) ;"));
        assert_eq!(print_grammar(&out), "root X\nX ::= B* A ;\n");
        assert!(apply_forward(&gr, &step("deyaccify(X, left, <A>, <B>, 2) ;")).is_err());
    }

    #[test]
    fn abstract_and_restore_literals() {
        let gr = g("root E\nE ::= \"if\" C \"then\" E | A ;\n");
        let s = step("abstract(E, 1, <\"if\" C \"then\" E | A>) ;");
        let out = roundtrip(&gr, &s);
        assert_eq!(print_grammar(&out), "root E\nE ::= C E | A ;\n");
        assert!(out.terminals().is_empty());
        assert!(apply_forward(&out, &step("abstract(E, 1, <C E | A>) ;")).is_err());
    }

    #[test]
    fn unselect_splices_sequences() {
        let gr = g("root A\nA ::= x::(B C) D ;\n");
        let out = roundtrip(&gr, &step("unselect(A, 1, [0], x, <B C>) ;"));
        assert_eq!(print_grammar(&out), "root A\nA ::= B C D ;\n");
    }

    #[test]
    fn desugar_separator_lists() {
        let gr = g("root A\nA ::= {F \",\"}+ ;\n");
        let out = roundtrip(&gr, &step("desugarSepPlus(A, 1, [], <F>, <\",\">) ;"));
        assert_eq!(print_grammar(&out), "root A\nA ::= F+ ;\n");
        let gr = g("root A\nA ::= X {F Sep}* Y ;\n");
        let out = roundtrip(&gr, &step("desugarSepStar(A, 1, [1], <F>, <Sep>) ;"));
        assert_eq!(print_grammar(&out), "root A\nA ::= X (F (Sep F)*)? Y ;\n");
        let gr = g("root A\nA ::= X {F Sep}+ Y ;\n");
        let out = roundtrip(&gr, &step("desugarSepPlus(A, 1, [1], <F>, <Sep>) ;"));
        assert_eq!(print_grammar(&out), "root A\nA ::= X F (Sep F)* Y ;\n");
    }

    #[test]
    fn extract_inline_vertical() {
        let gr = g("root A\nA ::= B (C | D) ;\nZ ::= A ;\n");
        let out = roundtrip(&gr, &step("extract(A_1, <C | D>, A) ;"));
        assert_eq!(
            print_grammar(&out),
            "root A\nA ::= B A_1 ;\nA_1 ::= C | D ;\nZ ::= A ;\n"
        );
        let out = roundtrip(&out, &step("vertical(A_1) ;"));
        assert_eq!(
            print_grammar(&out),
            "root A\nA ::= B A_1 ;\nA_1 ::= C ;\nA_1 ::= D ;\nZ ::= A ;\n"
        );
        let gr = g("root A\nA ::= B M ;\nM ::= C ;\nZ ::= M* ;\n");
        let out = roundtrip(
            &gr,
            &step("inline(M, 2, \"\", <C>, A, 1, [1], Z, 1, [0]) ;"),
        );
        assert_eq!(print_grammar(&out), "root A\nA ::= B C ;\nZ ::= C* ;\n");
        assert!(apply_forward(&gr, &step("inline(M, 2, \"\", <C>, A, 1, [1]) ;")).is_err());
    }

    #[test]
    fn eliminate_epsilon_wraps_occurrences() {
        let gr = g("root A\nA ::= B C ;\nB ::= eps ;\nB ::= D ;\n");
        let out = roundtrip(
            &gr,
            &step("eliminateEpsilon(B, 2, \"\", <eps>, A, 1, [0]) ;"),
        );
        assert_eq!(print_grammar(&out), "root A\nA ::= B? C ;\nB ::= D ;\n");
    }

    #[test]
    fn remove_unreachable_and_reroot() {
        let gr = g("root A\nroot D\nA ::= B ;\nD ::= D ;\n");
        let out = roundtrip(&gr, &step("reroot([A], [A, D]) ;"));
        let out = roundtrip(&out, &step("removeUnreachable(D, 2, \"\", <D>) ;"));
        assert_eq!(print_grammar(&out), "root A\nA ::= B ;\n");
        assert!(apply_forward(&gr, &step("removeUnreachable(D, 2, \"\", <D>) ;")).is_err());
    }

    #[test]
    fn permute_sequence() {
        let gr = g("root F\nF ::= S E T ;\n");
        let out = roundtrip(&gr, &step("permute(F, [1, 2, 0]) ;"));
        assert_eq!(print_grammar(&out), "root F\nF ::= E T S ;\n");
        assert!(apply_forward(&gr, &step("permute(F, [0, 0, 1]) ;")).is_err());
    }

    #[test]
    fn trace_reports_failing_index() {
        let gr = g("root E\nE ::= S E+ ;\n");
        let t = parse_trace("widen(E, 1) ;\nrename(S, T) ;\nwiden(E, 1) ;\n").unwrap();
        let err = apply_trace(&gr, &t, Direction::Forward).unwrap_err();
        assert_eq!(err.index, 3);
        let prefix = Trace::from(t.steps[..2].to_vec());
        let mid = apply_trace(&gr, &prefix, Direction::Forward).unwrap();
        assert_eq!(apply_trace(&mid, &prefix, Direction::Backward).unwrap(), gr);
        assert_eq!(
            apply_trace(&gr, &Trace::new(), Direction::Forward).unwrap(),
            gr
        );
    }
}
