//! Random grammars for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::expr::Expr;
use crate::grammar::{Grammar, Production};

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_nonterminals: usize,
    pub max_depth: usize,
    pub max_alternatives: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_nonterminals: 15,
            max_depth: 4,
            max_alternatives: 3,
        }
    }
}

const TOKENS: [&str; 3] = ["Id", "Num", "Str"];
const TERMINALS: [&str; 5] = ["a", "b", "(", ")", ","];

struct ExprGen<'a, R: Rng> {
    rng: &'a mut R,
    names: &'a [String],
}

impl<R: Rng> ExprGen<'_, R> {
    fn name(&mut self) -> String {
        if self.rng.gen_bool(0.2) {
            TOKENS.choose(self.rng).unwrap().to_string()
        } else {
            self.names.choose(self.rng).unwrap().clone()
        }
    }

    fn leaf(&mut self) -> Expr {
        match self.rng.gen_range(0..10) {
            0 => Expr::Epsilon,
            1..=3 => Expr::t(*TERMINALS.choose(self.rng).unwrap()),
            _ => Expr::nt(self.name()),
        }
    }

    /// An expression of depth at most `depth`.
    fn expr(&mut self, depth: usize) -> Expr {
        if depth <= 1 || self.rng.gen_bool(0.3) {
            return self.leaf();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..9) {
            0 | 1 => {
                let n = self.rng.gen_range(2..=4);
                Expr::seq((0..n).map(|_| self.expr(d)).collect())
            }
            2 => {
                let n = self.rng.gen_range(2..=3);
                Expr::choice((0..n).map(|_| self.expr(d)).collect())
            }
            3 => Expr::opt(self.expr(d)),
            4 => Expr::star(self.expr(d)),
            5 => Expr::plus(self.expr(d)),
            6 => {
                let body = match self.expr(d) {
                    Expr::Epsilon => Expr::nt(self.name()),
                    e => e,
                };
                Expr::sel(format!("s{}", self.rng.gen_range(1..4)), body)
            }
            7 => {
                let sep = self.separator();
                Expr::sep_plus(self.expr(d), sep)
            }
            _ => {
                let sep = self.separator();
                Expr::sep_star(self.expr(d), sep)
            }
        }
    }

    fn separator(&mut self) -> Expr {
        if self.rng.gen_bool(0.75) {
            Expr::t(*TERMINALS.choose(self.rng).unwrap())
        } else {
            Expr::nt(self.name())
        }
    }
}

/// A grammar over `N1..Nk` plus a few undefined token nonterminals, at
/// most `max_nonterminals` in total. The first root's first rule starts
/// with an undefined token, so the root survives abstraction; a second
/// root, when present, is reachable.
pub fn random_grammar<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Grammar {
    let k = rng.gen_range(1..=cfg.max_nonterminals.saturating_sub(TOKENS.len()).max(1));
    let names: Vec<String> = (1..=k).map(|i| format!("N{i}")).collect();
    let mut productions = Vec::new();
    {
        let mut eg = ExprGen {
            rng: &mut *rng,
            names: &names,
        };
        for (i, n) in names.iter().enumerate() {
            let alts = eg.rng.gen_range(1..=cfg.max_alternatives.max(1));
            for a in 0..alts {
                let mut rhs = eg.expr(cfg.max_depth);
                if i == 0 && a == 0 {
                    let tok = Expr::nt(*TOKENS.choose(eg.rng).unwrap());
                    let rest = eg.expr(cfg.max_depth.saturating_sub(1).max(1));
                    rhs = Expr::seq(vec![tok, rest]);
                }
                if i + 1 < k && a == 0 && !rhs.mentions(&names[i + 1]) && eg.rng.gen_bool(0.5) {
                    let chained = Expr::seq(vec![rhs, Expr::nt(names[i + 1].clone())]);
                    rhs = if chained.depth() <= cfg.max_depth {
                        chained
                    } else {
                        Expr::nt(names[i + 1].clone())
                    };
                }
                let p = if eg.rng.gen_bool(0.15) {
                    Production::labelled(format!("l{}", productions.len() + 1), n.clone(), rhs)
                } else {
                    Production::new(n.clone(), rhs)
                };
                productions.push(p);
            }
        }
    }
    productions.shuffle(rng);
    let first = productions
        .iter()
        .position(|p| p.lhs == names[0])
        .expect("root is defined");
    let root_rule = productions.remove(first);
    productions.insert(0, root_rule);
    let mut roots = vec![names[0].clone()];
    let g = Grammar::from_parts(productions.clone(), roots.clone());
    let reach = g.reachable();
    let extra: Vec<&String> = names[1..].iter().filter(|n| reach.contains(*n)).collect();
    if !extra.is_empty() && rng.gen_bool(0.15) {
        roots.push((*extra.choose(rng).unwrap()).clone());
    }
    Grammar::from_parts(productions, roots)
}

fn atom<R: Rng>(rng: &mut R, name: &str) -> Expr {
    let n = Expr::nt(name);
    match rng.gen_range(0..6) {
        0 => Expr::opt(n),
        1 => Expr::star(n),
        2 => Expr::plus(n),
        _ => n,
    }
}

/// A small grammar already in ANF, every nonterminal reachable from the
/// root. Names are `A`, `B`, ... in the order they are reached.
pub fn random_anf<R: Rng>(rng: &mut R, max_nonterminals: usize) -> Grammar {
    let k = rng.gen_range(2..=max_nonterminals.max(2));
    let letters: Vec<String> = (0..k)
        .map(|i| ((b'A' + i as u8) as char).to_string())
        .collect();
    // Each nonterminal after the first is introduced by an earlier one.
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    for i in 1..k {
        let parent = rng.gen_range(0..i);
        children[parent].push(i);
    }
    let mut productions = Vec::new();
    for i in 0..k {
        let mut used: Vec<usize> = children[i].clone();
        if used.is_empty() && i != 0 && rng.gen_bool(0.5) {
            continue;
        }
        for _ in 0..rng.gen_range(0..=1) {
            used.push(rng.gen_range(0..k));
        }
        if used.is_empty() {
            used.push(rng.gen_range(1..k));
        }
        used.shuffle(rng);
        if used.len() >= 2 && rng.gen_bool(0.4) {
            let mut seen = Vec::new();
            for u in used {
                if !seen.contains(&u) {
                    seen.push(u);
                    productions.push(Production::new(
                        letters[i].clone(),
                        Expr::nt(letters[u].clone()),
                    ));
                }
            }
            if seen.len() == 1 {
                let p = productions.pop().unwrap();
                productions.push(Production::new(p.lhs, Expr::plus(p.rhs)));
            }
        } else {
            let items: Vec<Expr> = used.iter().map(|&u| atom(rng, &letters[u])).collect();
            let rhs = if items.len() == 1 && items[0].as_nonterminal().is_some() {
                Expr::Sequence(vec![items[0].clone(), atom(rng, &letters[used[0]])])
            } else {
                Expr::seq(items)
            };
            productions.push(Production::new(letters[i].clone(), rhs));
        }
    }
    Grammar::from_parts(productions, vec![letters[0].clone()])
}

/// Renames nonterminals through a random bijection, shuffles rule order and
/// sequence items, and swaps some `+` and `*`. The result matches `g`.
pub fn disguise<R: Rng>(rng: &mut R, g: &Grammar) -> Grammar {
    let old: Vec<String> = g.nonterminals().iter().cloned().collect();
    let mut new: Vec<String> = (0..old.len()).map(|i| format!("x{i}")).collect();
    new.shuffle(rng);
    let map = |n: &str| new[old.iter().position(|o| o == n).unwrap()].clone();
    let mut productions: Vec<Production> = g
        .productions()
        .iter()
        .map(|p| {
            let mut rhs = p.rhs.clone();
            for o in &old {
                rhs.rename(o, &format!("#{o}"));
            }
            for o in &old {
                rhs.rename(&format!("#{o}"), &map(o));
            }
            let rhs = match rhs {
                Expr::Sequence(mut items) => {
                    items.shuffle(rng);
                    Expr::Sequence(items.into_iter().map(|e| swap_repetition(rng, e)).collect())
                }
                e => swap_repetition(rng, e),
            };
            Production::new(map(&p.lhs), rhs)
        })
        .collect();
    productions.shuffle(rng);
    let roots = g.roots().iter().map(|r| map(r)).collect();
    Grammar::from_parts(productions, roots)
}

fn swap_repetition<R: Rng>(rng: &mut R, e: Expr) -> Expr {
    match e {
        Expr::Plus(b) if rng.gen_bool(0.5) => Expr::Star(b),
        Expr::Star(b) if rng.gen_bool(0.5) => Expr::Plus(b),
        e => e,
    }
}

/// Changes one decoration or drops one rule, which usually breaks the match.
pub fn perturb<R: Rng>(rng: &mut R, g: &Grammar) -> Grammar {
    let mut productions = g.productions().to_vec();
    let i = rng.gen_range(0..productions.len());
    let p = &mut productions[i];
    let flip = |e: Expr| match e {
        Expr::Nonterminal(n) => Expr::opt(Expr::nt(n)),
        Expr::Optional(b) | Expr::Star(b) | Expr::Plus(b) => *b,
        e => e,
    };
    match &mut p.rhs {
        Expr::Sequence(items) => {
            let j = rng.gen_range(0..items.len());
            items[j] = flip(items[j].clone());
        }
        Expr::Nonterminal(_) if g.productions().iter().filter(|q| q.lhs == p.lhs).count() > 1 => {
            productions.remove(i);
        }
        rhs => *rhs = flip(rhs.clone()),
    }
    Grammar::from_parts(productions, g.roots().to_vec())
}
