//! Reference implementations used to check the library from the outside.
//! They share no code with the library beyond the grammar data types.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use gconv::{Expr, Grammar, Production};

/// Footprint as a sorted list of marker words.
pub fn footprint(n: &str, e: &Expr) -> Vec<&'static str> {
    let mut out = Vec::new();
    fn go(n: &str, e: &Expr, out: &mut Vec<&'static str>) {
        let bare = |b: &Expr| matches!(b, Expr::Nonterminal(m) if m == n);
        match e {
            Expr::Nonterminal(m) if m == n => out.push("one"),
            Expr::Optional(b) if bare(b) => out.push("opt"),
            Expr::Plus(b) if bare(b) => out.push("plus"),
            Expr::Star(b) if bare(b) => out.push("star"),
            Expr::Selector(_, b) => go(n, b, out),
            Expr::Sequence(items) => {
                for i in items {
                    go(n, i, out);
                }
            }
            _ => {}
        }
    }
    go(n, e, &mut out);
    let rank = |w: &&str| {
        ["one", "opt", "plus", "star"]
            .iter()
            .position(|x| x == w)
            .unwrap()
    };
    out.sort_by_key(rank);
    out
}

fn names(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Nonterminal(n) => {
            out.insert(n.clone());
        }
        Expr::Sequence(v) | Expr::Choice(v) => v.iter().for_each(|c| names(c, out)),
        Expr::Optional(b) | Expr::Star(b) | Expr::Plus(b) | Expr::Selector(_, b) => names(b, out),
        Expr::SepListPlus(a, b) | Expr::SepListStar(a, b) => {
            names(a, out);
            names(b, out);
        }
        _ => {}
    }
}

/// Signature with footprints already widened (`plus` read as `star`).
fn widened_sig(
    p: &Production,
    rename: &dyn Fn(&str) -> String,
) -> BTreeMap<String, Vec<&'static str>> {
    let mut ns = BTreeSet::new();
    names(&p.rhs, &mut ns);
    ns.into_iter()
        .filter_map(|n| {
            let mut f: Vec<&'static str> = footprint(&n, &p.rhs)
                .into_iter()
                .map(|w| if w == "plus" { "star" } else { w })
                .collect();
            f.sort_by_key(|w| {
                ["one", "opt", "plus", "star"]
                    .iter()
                    .position(|x| x == w)
                    .unwrap()
            });
            (!f.is_empty()).then(|| (rename(&n), f))
        })
        .collect()
}

fn rules<'g>(g: &'g Grammar, n: &str) -> Vec<&'g Production> {
    g.productions().iter().filter(|p| p.lhs == n).collect()
}

/// Whether the rules of `n` and `fn_` can be paired one to one with equal
/// signatures once `f` is applied to the master side.
fn rules_agree(m: &Grammar, s: &Grammar, n: &str, f: &BTreeMap<String, String>) -> bool {
    let mp = rules(m, n);
    let sp = rules(s, &f[n]);
    if mp.len() != sp.len() {
        return false;
    }
    let rename = |x: &str| f.get(x).cloned().unwrap_or_else(|| format!("?{x}"));
    let ms: Vec<_> = mp.iter().map(|p| widened_sig(p, &rename)).collect();
    let ss: Vec<_> = sp
        .iter()
        .map(|p| widened_sig(p, &|x: &str| x.to_string()))
        .collect();
    // Equal signatures are interchangeable, so multiset equality decides.
    let mut a = ms;
    let mut b = ss;
    a.sort();
    b.sort();
    a == b
}

/// Every bijection between the nonterminal sets that maps root to root and
/// makes all rule sets agree.
pub fn all_resolutions(m: &Grammar, s: &Grammar) -> Vec<BTreeMap<String, String>> {
    let mn: Vec<String> = m.nonterminals().iter().cloned().collect();
    let sn: Vec<String> = s.nonterminals().iter().cloned().collect();
    if mn.len() != sn.len() || m.roots().len() != 1 || s.roots().len() != 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..sn.len()).collect();
    permutations(&mut perm, 0, &mut |p| {
        let f: BTreeMap<String, String> = mn
            .iter()
            .cloned()
            .zip(p.iter().map(|&j| sn[j].clone()))
            .collect();
        if f[&m.roots()[0]] == s.roots()[0] && mn.iter().all(|n| rules_agree(m, s, n, &f)) {
            out.push(f);
        }
    });
    out
}

fn permutations(v: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, visit);
        v.swap(k, i);
    }
}

pub type Word = Vec<String>;

fn concat(a: &BTreeSet<Word>, b: &BTreeSet<Word>, bound: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            if x.len() + y.len() <= bound {
                let mut w = x.clone();
                w.extend(y.iter().cloned());
                out.insert(w);
            }
        }
    }
    out
}

fn star(a: &BTreeSet<Word>, bound: usize) -> BTreeSet<Word> {
    let mut out: BTreeSet<Word> = [Vec::new()].into_iter().collect();
    loop {
        let next: BTreeSet<Word> = out.union(&concat(&out, a, bound)).cloned().collect();
        if next == out {
            return out;
        }
        out = next;
    }
}

fn lang(e: &Expr, env: &BTreeMap<String, BTreeSet<Word>>, bound: usize) -> BTreeSet<Word> {
    let single = |s: &str| {
        [vec![s.to_string()]]
            .into_iter()
            .collect::<BTreeSet<Word>>()
    };
    match e {
        Expr::Epsilon => [Vec::new()].into_iter().collect(),
        Expr::Terminal(t) => single(&format!("\"{t}\"")),
        Expr::Nonterminal(n) => env.get(n).cloned().unwrap_or_else(|| single(n)),
        Expr::Sequence(items) => items
            .iter()
            .fold([Vec::new()].into_iter().collect(), |acc, i| {
                concat(&acc, &lang(i, env, bound), bound)
            }),
        Expr::Choice(alts) => alts.iter().flat_map(|a| lang(a, env, bound)).collect(),
        Expr::Optional(b) => {
            let mut l = lang(b, env, bound);
            l.insert(Vec::new());
            l
        }
        Expr::Star(b) => star(&lang(b, env, bound), bound),
        Expr::Plus(b) => {
            let l = lang(b, env, bound);
            concat(&l, &star(&l, bound), bound)
        }
        Expr::Selector(_, b) => lang(b, env, bound),
        Expr::SepListPlus(el, sep) | Expr::SepListStar(el, sep) => {
            let l = lang(el, env, bound);
            let tail = star(&concat(&lang(sep, env, bound), &l, bound), bound);
            let mut out = concat(&l, &tail, bound);
            if matches!(e, Expr::SepListStar(..)) {
                out.insert(Vec::new());
            }
            out
        }
    }
}

/// Words of length at most `bound` derivable from each defined nonterminal.
/// Terminals and undefined nonterminals are the atoms.
pub fn bounded_languages(g: &Grammar, bound: usize) -> BTreeMap<String, BTreeSet<Word>> {
    let defined: BTreeSet<&str> = g.productions().iter().map(|p| p.lhs.as_str()).collect();
    let mut env: BTreeMap<String, BTreeSet<Word>> = defined
        .iter()
        .map(|n| (n.to_string(), BTreeSet::new()))
        .collect();
    loop {
        let mut next = env.clone();
        for p in g.productions() {
            let l = lang(&p.rhs, &env, bound);
            next.get_mut(&p.lhs).unwrap().extend(l);
        }
        if next == env {
            return env;
        }
        env = next;
    }
}
