//! Footprints, production signatures and per-production nominal resolution.
//!
//! A footprint records how one nonterminal occurs in a right-hand side as a
//! multiset of presence markers. A production's signature maps each
//! nonterminal it uses to its footprint. Two productions are
//! signature-equivalent when their entries can be paired one-to-one with
//! footprints that agree modulo the `+`/`*` distinction; every such pairing
//! induces a candidate correspondence between the nonterminals involved.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::expr::Expr;
use crate::grammar::Production;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Marker {
    One,
    Opt,
    Plus,
    Star,
}

impl Marker {
    pub fn word(self) -> &'static str {
        match self {
            Marker::One => "one",
            Marker::Opt => "opt",
            Marker::Plus => "plus",
            Marker::Star => "star",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Marker::One => "1",
            Marker::Opt => "?",
            Marker::Plus => "+",
            Marker::Star => "*",
        }
    }
}

/// A multiset of markers, kept sorted `one < opt < plus < star`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Footprint(Vec<Marker>);

impl Footprint {
    pub fn new(mut markers: Vec<Marker>) -> Self {
        markers.sort();
        Footprint(markers)
    }

    pub fn markers(&self) -> &[Marker] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Words joined by commas, e.g. `one,star`.
    pub fn words(&self) -> String {
        self.0
            .iter()
            .map(|m| m.word())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Symbols joined by `, `, e.g. `1, *`.
    pub fn symbols(&self) -> String {
        self.0
            .iter()
            .map(|m| m.symbol())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn collect(n: &str, x: &Expr, out: &mut Vec<Marker>) {
    match x {
        Expr::Nonterminal(m) if m == n => out.push(Marker::One),
        Expr::Optional(b) if b.is_nonterminal(n) => out.push(Marker::Opt),
        Expr::Plus(b) if b.is_nonterminal(n) => out.push(Marker::Plus),
        Expr::Star(b) if b.is_nonterminal(n) => out.push(Marker::Star),
        Expr::Selector(_, y) => collect(n, y, out),
        Expr::Sequence(items) => items.iter().for_each(|i| collect(n, i, out)),
        _ => {}
    }
}

/// The footprint of `n` in `x`. Choices and decorated compound bodies
/// contribute nothing.
pub fn footprint(n: &str, x: &Expr) -> Footprint {
    let mut out = Vec::new();
    collect(n, x, &mut out);
    Footprint::new(out)
}

pub fn plus_to_star(f: &Footprint) -> Footprint {
    Footprint::new(
        f.0.iter()
            .map(|&m| if m == Marker::Plus { Marker::Star } else { m })
            .collect(),
    )
}

pub fn footprint_equiv(f: &Footprint, g: &Footprint) -> bool {
    f == g || plus_to_star(f) == plus_to_star(g)
}

/// A production signature: nonterminal to nonempty footprint.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ProdSig(BTreeMap<String, Footprint>);

impl ProdSig {
    pub fn entries(&self) -> &BTreeMap<String, Footprint> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, n: &str) -> Option<&Footprint> {
        self.0.get(n)
    }
}

impl fmt::Display for ProdSig {
    /// `{E:{one}, S:{one,star}}`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (n, fp)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}:{{{}}}", fp.words())?;
        }
        f.write_str("}")
    }
}

pub fn prodsig(p: &Production) -> ProdSig {
    let mut names = BTreeSet::new();
    p.rhs.nonterminals_into(&mut names);
    ProdSig(
        names
            .into_iter()
            .filter_map(|n| {
                let fp = footprint(&n, &p.rhs);
                (!fp.is_empty()).then_some((n, fp))
            })
            .collect(),
    )
}

/// Kuhn's augmenting-path matching over the compatibility matrix.
fn perfect_matching_exists(compatible: &[Vec<bool>]) -> bool {
    fn augment(
        i: usize,
        compatible: &[Vec<bool>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for j in 0..owner.len() {
            if compatible[i][j] && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, compatible, seen, owner)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let n = compatible.len();
    let mut owner = vec![None; compatible.first().map_or(0, |r| r.len())];
    if owner.len() != n {
        return false;
    }
    (0..n).all(|i| augment(i, compatible, &mut vec![false; n], &mut owner))
}

fn compatibility(a: &ProdSig, b: &ProdSig) -> Vec<Vec<bool>> {
    a.0.values()
        .map(|fa| b.0.values().map(|fb| footprint_equiv(fa, fb)).collect())
        .collect()
}

/// True when the signature entries of `p` and `q` admit a bijection pairing
/// equivalent footprints.
pub fn prodsig_equiv(p: &Production, q: &Production) -> bool {
    let (a, b) = (prodsig(p), prodsig(q));
    a.len() == b.len() && perfect_matching_exists(&compatibility(&a, &b))
}

/// One side of a resolution pair; `Omega` marks an unmatched nonterminal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Name(String),
    Omega,
}

impl Symbol {
    pub fn name(&self) -> Option<&str> {
        match self {
            Symbol::Name(n) => Some(n),
            Symbol::Omega => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Name(n) => f.write_str(n),
            Symbol::Omega => f.write_str("-"),
        }
    }
}

/// A relation between two nonterminal vocabularies, functional in both
/// directions on named entries and never containing `(ω, ω)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NominalResolution {
    pairs: BTreeSet<(Symbol, Symbol)>,
}

impl NominalResolution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pairs(&self) -> &BTreeSet<(Symbol, Symbol)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn omega_count(&self) -> usize {
        self.pairs
            .iter()
            .filter(|(a, b)| *a == Symbol::Omega || *b == Symbol::Omega)
            .count()
    }

    pub fn right_of(&self, left: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(a, _)| a.name() == Some(left))
            .and_then(|(_, b)| b.name())
    }

    pub fn left_of(&self, right: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(_, b)| b.name() == Some(right))
            .and_then(|(a, _)| a.name())
    }

    /// Whether `(a, b)` can join without breaking functionality.
    pub fn admits(&self, a: &Symbol, b: &Symbol) -> bool {
        if *a == Symbol::Omega && *b == Symbol::Omega {
            return false;
        }
        self.pairs.iter().all(|(x, y)| {
            (x != a || *a == Symbol::Omega || y == b) && (y != b || *b == Symbol::Omega || x == a)
        })
    }

    /// Adds a pair if it keeps the relation functional both ways.
    pub fn insert(&mut self, a: Symbol, b: Symbol) -> bool {
        if !self.admits(&a, &b) {
            return false;
        }
        self.pairs.insert((a, b));
        true
    }

    pub fn insert_names(&mut self, a: &str, b: &str) -> bool {
        self.insert(Symbol::Name(a.to_string()), Symbol::Name(b.to_string()))
    }

    /// Named pairs as `(left, right)` strings.
    pub fn named_pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs
            .iter()
            .filter_map(|(a, b)| Some((a.name()?, b.name()?)))
    }
}

impl fmt::Display for NominalResolution {
    /// One `left -> right` line per pair.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in &self.pairs {
            writeln!(f, "{a} -> {b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("productions are not signature-equivalent: {left} vs {right}")]
pub struct NotEquivalent {
    pub left: String,
    pub right: String,
}

/// All resolutions induced by bijections between the signature entries of
/// `p` and `q`, each including the left-hand-side pair. Enumerated
/// lexicographically by left entry, then right entry; bijections that
/// clash with the left-hand-side pair are dropped.
pub fn production_resolutions(
    p: &Production,
    q: &Production,
) -> Result<Vec<NominalResolution>, NotEquivalent> {
    if !prodsig_equiv(p, q) {
        return Err(NotEquivalent {
            left: p.to_string(),
            right: q.to_string(),
        });
    }
    let (a, b) = (prodsig(p), prodsig(q));
    let left: Vec<(&String, &Footprint)> = a.0.iter().collect();
    let right: Vec<(&String, &Footprint)> = b.0.iter().collect();

    fn go(
        i: usize,
        left: &[(&String, &Footprint)],
        right: &[(&String, &Footprint)],
        used: &mut Vec<bool>,
        cur: &mut NominalResolution,
        out: &mut Vec<NominalResolution>,
    ) {
        if i == left.len() {
            out.push(cur.clone());
            return;
        }
        for j in 0..right.len() {
            if used[j] || !footprint_equiv(left[i].1, right[j].1) {
                continue;
            }
            let mut next = cur.clone();
            if !next.insert_names(left[i].0, right[j].0) {
                continue;
            }
            used[j] = true;
            let saved = std::mem::replace(cur, next);
            go(i + 1, left, right, used, cur, out);
            *cur = saved;
            used[j] = false;
        }
    }

    let mut seed = NominalResolution::new();
    seed.insert_names(&p.lhs, &q.lhs);
    let mut out = Vec::new();
    go(
        0,
        &left,
        &right,
        &mut vec![false; right.len()],
        &mut seed,
        &mut out,
    );
    out.sort_by_key(|r| r.omega_count());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gin::parse_expr;

    fn fp(ms: &[Marker]) -> Footprint {
        Footprint::new(ms.to_vec())
    }

    fn prod(lhs: &str, rhs: &str) -> Production {
        Production::new(lhs, parse_expr(rhs).unwrap())
    }

    use Marker::*;

    #[test]
    fn footprint_cases() {
        assert_eq!(footprint("F", &parse_expr("F+").unwrap()), fp(&[Plus]));
        let x = parse_expr("S S* E").unwrap();
        assert_eq!(footprint("S", &x), fp(&[One, Star]));
        assert_eq!(footprint("Q", &x), fp(&[]));
        assert_eq!(
            footprint("S", &parse_expr("a::S S?").unwrap()),
            fp(&[One, Opt])
        );
        assert_eq!(footprint("S", &parse_expr("S | T").unwrap()), fp(&[]));
        assert_eq!(footprint("S", &parse_expr("(S T)*").unwrap()), fp(&[]));
    }

    #[test]
    fn plus_to_star_cases() {
        assert_eq!(plus_to_star(&fp(&[One, Plus])), fp(&[One, Star]));
        assert_eq!(plus_to_star(&fp(&[Opt])), fp(&[Opt]));
        assert_eq!(
            plus_to_star(&fp(&[Plus, Plus, Star])),
            fp(&[Star, Star, Star])
        );
    }

    #[test]
    fn footprint_equivalence() {
        assert!(footprint_equiv(&fp(&[Plus]), &fp(&[Star])));
        assert!(footprint_equiv(&fp(&[One, Star]), &fp(&[One, Plus])));
        assert!(!footprint_equiv(&fp(&[Opt]), &fp(&[One])));
    }

    #[test]
    fn signatures() {
        assert_eq!(prodsig(&prod("P", "F+")).to_string(), "{F:{plus}}");
        assert_eq!(
            prodsig(&prod("F", "S S* E")).to_string(),
            "{E:{one}, S:{one,star}}"
        );
        assert!(prodsig(&prod("A", "eps")).is_empty());
    }

    #[test]
    fn signature_equivalence() {
        let f1 = prod("F1", "S1 S1* E1");
        let f2 = prod("F2", "S2 S2+ E2");
        assert!(prodsig_equiv(&f1, &f2));
        assert!(prodsig_equiv(&f2, &f1));
        assert!(prodsig_equiv(&f1, &f1));
        assert!(!prodsig_equiv(&prod("P", "F+"), &prod("F", "S S* E")));
    }

    #[test]
    fn resolutions_for_list_example() {
        let rs =
            production_resolutions(&prod("F1", "S1 S1* E1"), &prod("F2", "S2 S2+ E2")).unwrap();
        assert_eq!(rs.len(), 1);
        let expected: Vec<(&str, &str)> = vec![("E1", "E2"), ("F1", "F2"), ("S1", "S2")];
        assert_eq!(rs[0].named_pairs().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn resolutions_enumerate_symmetric_bijections() {
        let rs = production_resolutions(&prod("A", "B C"), &prod("A2", "D E")).unwrap();
        let got: Vec<Vec<(&str, &str)>> = rs.iter().map(|r| r.named_pairs().collect()).collect();
        assert_eq!(
            got,
            vec![
                vec![("A", "A2"), ("B", "D"), ("C", "E")],
                vec![("A", "A2"), ("B", "E"), ("C", "D")],
            ]
        );
    }

    #[test]
    fn identity_resolution_comes_first() {
        let p = prod("A", "B C D");
        let rs = production_resolutions(&p, &p).unwrap();
        assert_eq!(rs.len(), 6);
        assert!(rs[0].named_pairs().all(|(a, b)| a == b));
    }

    #[test]
    fn resolution_requires_equivalence() {
        assert!(production_resolutions(&prod("P", "F+"), &prod("F", "S S* E")).is_err());
    }

    #[test]
    fn resolution_stays_functional() {
        let mut r = NominalResolution::new();
        assert!(r.insert_names("a", "b"));
        assert!(!r.insert_names("a", "d"));
        assert!(!r.insert_names("c", "b"));
        assert!(r.insert(Symbol::Omega, Symbol::Name("x".into())));
        assert!(!r.insert(Symbol::Omega, Symbol::Omega));
    }
}
