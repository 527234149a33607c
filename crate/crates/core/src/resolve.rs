//! Grammar-wide nominal resolution between two ANF grammars.
//!
//! Starting from the pair of roots, every matched pair of nonterminals must
//! agree in kind. Sequence nonterminals are matched through the signatures
//! of their single rules; chain nonterminals by a bijection between their
//! chain targets. Each choice point is explored depth first, and a choice
//! that leads to a conflict is undone and the next candidate tried.

use std::collections::BTreeMap;
use std::fmt;

use crate::anf::{classify_anf, AnfClassification};
use crate::grammar::Grammar;
use crate::prodsig::{prodsig_equiv, production_resolutions, NominalResolution};

/// Why a pair of nonterminals was matched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Justification {
    pub master: String,
    pub servant: String,
    pub reason: String,
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}: {}", self.master, self.servant, self.reason)
    }
}

/// A successful match. Pairs are `(master, servant)`; justifications are in
/// the order the pairs were first established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalResolution {
    pub resolution: NominalResolution,
    pub justifications: Vec<Justification>,
    /// Candidate choices abandoned during the search.
    pub backtracks: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchFailure {
    pub reason: String,
    /// The pair under examination when the deepest conflict arose.
    pub frontier: Option<(String, String)>,
    /// The largest consistent partial resolution reached.
    pub partial: NominalResolution,
    pub backtracks: usize,
}

impl fmt::Display for MatchFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.frontier {
            Some((m, s)) => write!(f, "cannot match {m} with {s}: {}", self.reason),
            None => f.write_str(&self.reason),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MatchError {
    #[error("{side} grammar is not in ANF: {}", describe(.violations))]
    NotAnf {
        side: &'static str,
        violations: Vec<(String, String)>,
    },
    #[error("{0}")]
    Failure(MatchFailure),
}

fn describe(vs: &[(String, String)]) -> String {
    vs.iter()
        .map(|(n, r)| format!("{n}: {r}"))
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Chain,
    Sequence,
    Undefined,
}

impl Kind {
    fn of(c: &AnfClassification, n: &str) -> Kind {
        if c.chain.contains(n) {
            Kind::Chain
        } else if c.sequence.contains(n) {
            Kind::Sequence
        } else {
            Kind::Undefined
        }
    }

    fn word(self) -> &'static str {
        match self {
            Kind::Chain => "chain",
            Kind::Sequence => "sequence",
            Kind::Undefined => "undefined",
        }
    }
}

#[derive(Clone)]
struct State {
    resolution: NominalResolution,
    queue: Vec<(String, String)>,
    why: Vec<String>,
}

impl State {
    /// Adds the given pairs; new ones are queued. `None` on a conflict.
    fn extend(&self, pairs: &[(String, String)], reason: &str) -> Option<State> {
        let mut next = self.clone();
        for (m, s) in pairs {
            if next.resolution.right_of(m) == Some(s.as_str()) {
                continue;
            }
            if !next.resolution.insert_names(m, s) {
                return None;
            }
            next.queue.push((m.clone(), s.clone()));
            next.why.push(reason.to_string());
        }
        Some(next)
    }
}

struct Search<'g> {
    master: &'g Grammar,
    servant: &'g Grammar,
    mc: AnfClassification,
    sc: AnfClassification,
    backtracks: usize,
    deepest: Option<(usize, MatchFailure)>,
}

impl Search<'_> {
    fn fail(&mut self, state: &State, k: usize, pair: &(String, String), reason: String) {
        let depth = state.resolution.len() * 1000 + k;
        if self.deepest.as_ref().is_none_or(|(d, _)| depth > *d) {
            self.deepest = Some((
                depth,
                MatchFailure {
                    reason,
                    frontier: Some(pair.clone()),
                    partial: state.resolution.clone(),
                    backtracks: 0,
                },
            ));
        }
    }

    /// Tries each candidate extension in order.
    fn branch(
        &mut self,
        state: &State,
        k: usize,
        candidates: Vec<State>,
        pair: &(String, String),
        what: &str,
    ) -> Option<State> {
        if candidates.is_empty() {
            self.fail(
                state,
                k,
                pair,
                format!("no {what} consistent with earlier matches"),
            );
            return None;
        }
        for c in candidates {
            if let Some(done) = self.expand(c, k + 1) {
                return Some(done);
            }
            self.backtracks += 1;
        }
        None
    }

    fn expand(&mut self, state: State, k: usize) -> Option<State> {
        let Some(pair) = state.queue.get(k).cloned() else {
            return Some(state);
        };
        let (m, s) = &pair;
        let (km, ks) = (Kind::of(&self.mc, m), Kind::of(&self.sc, s));
        if km != ks {
            let reason = format!("{m} is {} but {s} is {}", km.word(), ks.word());
            self.fail(&state, k, &pair, reason);
            return None;
        }
        match km {
            Kind::Undefined => self.expand(state, k + 1),
            Kind::Sequence => {
                let p = self.master.defining(m).next().expect("sequence rule");
                let q = self.servant.defining(s).next().expect("sequence rule");
                if !prodsig_equiv(p, q) {
                    self.fail(&state, k, &pair, format!("signatures differ: {p} vs {q}"));
                    return None;
                }
                let reason = format!("signature of {p} matches {q}");
                let candidates: Vec<State> = production_resolutions(p, q)
                    .expect("equivalent signatures")
                    .iter()
                    .filter_map(|r| {
                        let pairs: Vec<(String, String)> = r
                            .named_pairs()
                            .map(|(a, b)| (a.to_string(), b.to_string()))
                            .collect();
                        state.extend(&pairs, &reason)
                    })
                    .collect();
                self.branch(&state, k, candidates, &pair, "signature pairing")
            }
            Kind::Chain => {
                let tm: Vec<String> = chain_targets(self.master, m);
                let ts: Vec<String> = chain_targets(self.servant, s);
                if tm.len() != ts.len() {
                    let reason =
                        format!("{m} has {} chain rules but {s} has {}", tm.len(), ts.len());
                    self.fail(&state, k, &pair, reason);
                    return None;
                }
                let reason = format!("chain alternative of {m} and {s}");
                let mut candidates = Vec::new();
                let mut seen = Vec::new();
                for perm in bijections(&tm, &ts, &state.resolution) {
                    let pairs: Vec<(String, String)> = perm
                        .iter()
                        .enumerate()
                        .map(|(i, &j)| (tm[i].clone(), ts[j].clone()))
                        .collect();
                    let mut key = pairs.clone();
                    key.sort();
                    if seen.contains(&key) {
                        continue;
                    }
                    seen.push(key);
                    if let Some(next) = state.extend(&pairs, &reason) {
                        candidates.push(next);
                    }
                }
                self.branch(&state, k, candidates, &pair, "chain bijection")
            }
        }
    }
}

fn chain_targets(g: &Grammar, n: &str) -> Vec<String> {
    g.defining(n)
        .filter_map(|p| p.rhs.as_nonterminal().map(str::to_string))
        .collect()
}

/// Index permutations `perm` with `perm[i]` the servant target for master
/// target `i`, in lexicographic order, skipping those already contradicted
/// by `fixed`.
fn bijections(tm: &[String], ts: &[String], fixed: &NominalResolution) -> Vec<Vec<usize>> {
    fn go(
        i: usize,
        tm: &[String],
        ts: &[String],
        fixed: &NominalResolution,
        used: &mut Vec<bool>,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == tm.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..ts.len() {
            if used[j] {
                continue;
            }
            let left_ok = fixed.right_of(&tm[i]).is_none_or(|r| r == ts[j]);
            let right_ok = fixed.left_of(&ts[j]).is_none_or(|l| l == tm[i]);
            let dup_ok = (0..i).all(|a| (tm[a] == tm[i]) == (ts[cur[a]] == ts[j]));
            if !(left_ok && right_ok && dup_ok) {
                continue;
            }
            used[j] = true;
            cur.push(j);
            go(i + 1, tm, ts, fixed, used, cur, out);
            cur.pop();
            used[j] = false;
        }
    }
    let mut out = Vec::new();
    go(
        0,
        tm,
        ts,
        fixed,
        &mut vec![false; ts.len()],
        &mut Vec::new(),
        &mut out,
    );
    out
}

/// Matches `servant` against `master`. Both must be in ANF.
pub fn global_resolution(
    master: &Grammar,
    servant: &Grammar,
) -> Result<GlobalResolution, MatchError> {
    let mc = classify_anf(master);
    if !mc.is_anf() {
        return Err(MatchError::NotAnf {
            side: "master",
            violations: mc.violations,
        });
    }
    let sc = classify_anf(servant);
    if !sc.is_anf() {
        return Err(MatchError::NotAnf {
            side: "servant",
            violations: sc.violations,
        });
    }
    let (rm, rs) = (master.roots()[0].clone(), servant.roots()[0].clone());
    let seed = State {
        resolution: NominalResolution::new(),
        queue: Vec::new(),
        why: Vec::new(),
    }
    .extend(&[(rm, rs)], "roots")
    .expect("empty resolution admits any pair");

    let mut search = Search {
        master,
        servant,
        mc,
        sc,
        backtracks: 0,
        deepest: None,
    };
    match search.expand(seed, 0) {
        Some(done) => {
            let justifications = done
                .queue
                .iter()
                .zip(&done.why)
                .map(|((m, s), r)| Justification {
                    master: m.clone(),
                    servant: s.clone(),
                    reason: r.clone(),
                })
                .collect();
            Ok(GlobalResolution {
                resolution: done.resolution,
                justifications,
                backtracks: search.backtracks,
            })
        }
        None => {
            let (_, mut failure) = search.deepest.expect("failed search records a failure");
            failure.backtracks = search.backtracks;
            Err(MatchError::Failure(failure))
        }
    }
}

/// The resolution as a map from master names to servant names.
pub fn as_map(r: &NominalResolution) -> BTreeMap<String, String> {
    r.named_pairs()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}
