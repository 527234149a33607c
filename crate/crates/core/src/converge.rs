//! Converging a servant grammar onto a master grammar.
//!
//! The servant is mutated, both grammars are normalized, nonterminals are
//! matched, the servant is renamed to master names, and the remaining
//! repetition-kind and ordering differences are resolved. Each phase leaves
//! its own trace, and the concatenation replays the servant onto the
//! master's normal form.

use std::fmt;

use crate::anf::is_sequence_rhs;
use crate::error::{NormalizeError, StructError};
use crate::expr::Expr;
use crate::grammar::{production_multiset, Grammar, Production};
use crate::normalize::{mutate_for_convergence, normalize};
use crate::prodsig::NominalResolution;
use crate::resolve::{global_resolution, Justification, MatchError, MatchFailure};
use crate::trace::{Step, Trace};
use crate::transform::apply_forward;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Converged,
    Failed(String),
}

impl Verdict {
    pub fn is_converged(&self) -> bool {
        matches!(self, Verdict::Converged)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Converged => f.write_str("converged"),
            Verdict::Failed(r) => write!(f, "failed: {r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergenceResult {
    pub servant_name: String,
    pub mutation_trace: Trace,
    pub servant_anf_trace: Trace,
    pub master_anf_trace: Trace,
    /// Pairs are `(master, servant)`.
    pub resolution: NominalResolution,
    pub justifications: Vec<Justification>,
    pub backtracks: usize,
    pub rename_trace: Trace,
    pub structural_trace: Trace,
    pub verdict: Verdict,
    /// Set when matching failed.
    pub failure: Option<MatchFailure>,
}

impl ConvergenceResult {
    fn new(servant_name: &str) -> Self {
        ConvergenceResult {
            servant_name: servant_name.to_string(),
            mutation_trace: Trace::new(),
            servant_anf_trace: Trace::new(),
            master_anf_trace: Trace::new(),
            resolution: NominalResolution::new(),
            justifications: Vec::new(),
            backtracks: 0,
            rename_trace: Trace::new(),
            structural_trace: Trace::new(),
            verdict: Verdict::Converged,
            failure: None,
        }
    }

    fn failed(mut self, reason: impl Into<String>) -> Self {
        self.verdict = Verdict::Failed(reason.into());
        self
    }

    /// The four servant-side traces in replay order.
    pub fn servant_trace(&self) -> Trace {
        let mut t = self.mutation_trace.clone();
        t.extend(self.servant_anf_trace.clone());
        t.extend(self.rename_trace.clone());
        t.extend(self.structural_trace.clone());
        t
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("normalizing the {side} grammar: {error}")]
pub struct ConvergeError {
    pub side: &'static str,
    pub error: NormalizeError,
}

fn normalize_side(
    g: &Grammar,
    side: &'static str,
) -> Result<Result<(Grammar, Trace), String>, ConvergeError> {
    match normalize(g) {
        Ok(r) => Ok(Ok((r.normalized, r.trace))),
        Err(error @ NormalizeError::BudgetExhausted(_)) => Err(ConvergeError { side, error }),
        Err(e) => Ok(Err(format!("{side} normalization failed: {e}"))),
    }
}

/// Runs the whole pipeline. Only an exhausted normalization budget is an
/// error; every other problem is reported through the verdict.
pub fn converge(
    master: &Grammar,
    servant: &Grammar,
    servant_name: &str,
) -> Result<ConvergenceResult, ConvergeError> {
    let mut out = ConvergenceResult::new(servant_name);
    let (mutated, mutation_trace) = mutate_for_convergence(servant);
    out.mutation_trace = mutation_trace;

    let master_anf = match normalize_side(master, "master")? {
        Ok((g, t)) => {
            out.master_anf_trace = t;
            g
        }
        Err(r) => return Ok(out.failed(r)),
    };
    let servant_anf = match normalize_side(&mutated, "servant")? {
        Ok((g, t)) => {
            out.servant_anf_trace = t;
            g
        }
        Err(r) => return Ok(out.failed(r)),
    };

    let resolved = match global_resolution(&master_anf, &servant_anf) {
        Ok(r) => r,
        Err(MatchError::Failure(f)) => {
            out.backtracks = f.backtracks;
            out.resolution = f.partial.clone();
            let reason = format!("no nominal resolution: {f}");
            out.failure = Some(f);
            return Ok(out.failed(reason));
        }
        Err(e) => return Ok(out.failed(e.to_string())),
    };
    out.resolution = resolved.resolution;
    out.justifications = resolved.justifications;
    out.backtracks = resolved.backtracks;

    let (renamed, rename_trace) = match rename_to_master(&servant_anf, &out.resolution) {
        Ok(r) => r,
        Err(e) => return Ok(out.failed(e)),
    };
    out.rename_trace = rename_trace;

    let structural = match structural_resolve(&master_anf, &renamed) {
        Ok(t) => t,
        Err(e) => return Ok(out.failed(e.to_string())),
    };
    let mut fin = renamed;
    for s in &structural.steps {
        fin = match apply_forward(&fin, s) {
            Ok(g) => g,
            Err(e) => return Ok(out.failed(e.to_string())),
        };
    }
    out.structural_trace = structural;
    if !verify_converged(&master_anf, &fin) {
        return Ok(out.failed("final grammar differs from the master normal form"));
    }
    Ok(out)
}

fn fresh_tmp(g: &Grammar) -> String {
    (1..)
        .map(|k| format!("tmp_{k}"))
        .find(|n| !g.contains(n))
        .expect("unbounded supply of names")
}

/// Renames every servant nonterminal to its master counterpart. A rename
/// whose target is still taken waits; when all remaining renames wait on
/// each other, one of them detours through a temporary name.
pub fn rename_to_master(
    servant: &Grammar,
    resolution: &NominalResolution,
) -> Result<(Grammar, Trace), String> {
    let mut pending: Vec<(String, String)> = resolution
        .named_pairs()
        .filter(|(m, s)| m != s)
        .map(|(m, s)| (s.to_string(), m.to_string()))
        .collect();
    pending.sort();
    let mut g = servant.clone();
    let mut trace = Trace::new();
    while !pending.is_empty() {
        let step = match pending.iter().position(|(_, to)| !g.contains(to)) {
            Some(i) => {
                let (from, to) = pending.remove(i);
                Step::Rename { from, to }
            }
            None => {
                let tmp = fresh_tmp(&g);
                let from = std::mem::replace(&mut pending[0].0, tmp.clone());
                Step::Rename { from, to: tmp }
            }
        };
        g = apply_forward(&g, &step).map_err(|e| e.to_string())?;
        trace.push(step);
    }
    Ok((g, trace))
}

fn items(rhs: &Expr) -> Vec<&Expr> {
    match rhs {
        Expr::Sequence(v) => v.iter().collect(),
        e => vec![e],
    }
}

fn repetition_twins(a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (Expr::Plus(x), Expr::Star(y)) | (Expr::Star(x), Expr::Plus(y)) => x == y,
        _ => false,
    }
}

fn rules(ps: &[&Production]) -> String {
    ps.iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Steps turning each servant rule into the master rule of the same name:
/// a permutation followed by repetition-kind flips. Chain rules must
/// already agree as multisets.
pub fn structural_resolve(master: &Grammar, servant: &Grammar) -> Result<Trace, StructError> {
    let mut trace = Trace::new();
    let mut names: Vec<&str> = Vec::new();
    for p in master.productions().iter().chain(servant.productions()) {
        if !names.contains(&p.lhs.as_str()) {
            names.push(&p.lhs);
        }
    }
    for n in names {
        let mp: Vec<&Production> = master.defining(n).collect();
        let sp: Vec<&Production> = servant.defining(n).collect();
        let err = |reason: &str| StructError {
            nonterminal: n.to_string(),
            reason: reason.to_string(),
            master: rules(&mp),
            servant: rules(&sp),
        };
        if mp.len() != sp.len() {
            return Err(err("different numbers of rules"));
        }
        if mp.iter().chain(&sp).any(|p| p.label.is_some()) {
            return Err(err("labelled rule"));
        }
        if mp.iter().all(|p| p.is_chain()) && sp.iter().all(|p| p.is_chain()) {
            if production_multiset(&mp.iter().map(|p| (*p).clone()).collect::<Vec<_>>())
                != production_multiset(&sp.iter().map(|p| (*p).clone()).collect::<Vec<_>>())
            {
                return Err(err("chain rules differ"));
            }
            continue;
        }
        let ([m], [s]) = (&mp[..], &sp[..]) else {
            return Err(err("rules are neither all chains nor a single sequence"));
        };
        if !is_sequence_rhs(&m.rhs) || !is_sequence_rhs(&s.rhs) {
            return Err(err("rule is not a sequence of nonterminals"));
        }
        let (mi, si) = (items(&m.rhs), items(&s.rhs));
        if mi.len() != si.len() {
            return Err(err("sequences differ in length"));
        }
        let mut order: Vec<Option<usize>> = vec![None; mi.len()];
        let mut used = vec![false; si.len()];
        for pass in [0, 1] {
            for i in 0..mi.len() {
                if order[i].is_some() {
                    continue;
                }
                let fit = (0..si.len()).find(|&j| {
                    !used[j]
                        && if pass == 0 {
                            si[j] == mi[i]
                        } else {
                            repetition_twins(mi[i], si[j])
                        }
                });
                if let Some(j) = fit {
                    used[j] = true;
                    order[i] = Some(j);
                }
            }
        }
        let Some(order) = order.into_iter().collect::<Option<Vec<usize>>>() else {
            return Err(err("sequence items cannot be paired"));
        };
        if order.iter().enumerate().any(|(i, &j)| i != j) {
            trace.push(Step::Permute {
                lhs: n.to_string(),
                order: order.clone(),
            });
        }
        let single = mi.len() == 1 && !matches!(s.rhs, Expr::Sequence(_));
        for (i, &j) in order.iter().enumerate() {
            if si[j] == mi[i] {
                continue;
            }
            let path = Some(if single { vec![] } else { vec![i] });
            let lhs = n.to_string();
            trace.push(match mi[i] {
                Expr::Star(_) => Step::Widen {
                    lhs,
                    index: 1,
                    path,
                },
                _ => Step::Narrow {
                    lhs,
                    index: 1,
                    path,
                },
            });
        }
    }
    Ok(trace)
}

/// Equal nonterminal sets, roots, and production multisets.
pub fn verify_converged(master: &Grammar, servant: &Grammar) -> bool {
    master.nonterminals() == servant.nonterminals()
        && master.roots() == servant.roots()
        && production_multiset(master.productions()) == production_multiset(servant.productions())
}
