mod common;

use std::collections::BTreeMap;

use common::oracle;
use gconv::gen::{disguise, perturb, random_anf};
use gconv::{classify_anf, global_resolution, Grammar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn usable(g: &Grammar) -> bool {
    classify_anf(g).is_anf() && g.reachable() == *g.nonterminals()
}

/// Pairs of small ANF grammars: disguised copies, perturbed copies and
/// unrelated grammars.
fn suite(seed: u64, count: usize) -> Vec<(Grammar, Grammar)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let m = random_anf(&mut rng, 6);
        let s = match rng.gen_range(0..3) {
            0 => disguise(&mut rng, &m),
            1 => {
                let p = perturb(&mut rng, &m);
                disguise(&mut rng, &p)
            }
            _ => random_anf(&mut rng, 6),
        };
        if usable(&m) && usable(&s) {
            out.push((m, s));
        }
    }
    out
}

fn guided(m: &Grammar, s: &Grammar) -> Option<BTreeMap<String, String>> {
    global_resolution(m, s).ok().map(|r| {
        r.resolution
            .named_pairs()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    })
}

#[test]
fn guided_search_agrees_with_brute_force() {
    let pairs = suite(2024, 400);
    let (mut hits, mut misses) = (0, 0);
    for (m, s) in &pairs {
        let expected = oracle::all_resolutions(m, s);
        match guided(m, s) {
            Some(f) => {
                hits += 1;
                assert!(
                    expected.contains(&f),
                    "guided result not in oracle set\n{m}\n{s}\n{f:?}"
                );
            }
            None => {
                misses += 1;
                assert!(
                    expected.is_empty(),
                    "guided search missed a resolution\n{m}\n{s}\n{:?}",
                    expected[0]
                );
            }
        }
    }
    assert!(
        hits >= 50 && misses >= 50,
        "unbalanced suite: {hits} matches, {misses} failures"
    );
}

#[test]
fn disguised_copies_always_match() {
    for (m, s) in suite(99, 300)
        .into_iter()
        .filter(|(m, s)| m.nonterminals().len() == s.nonterminals().len())
    {
        let expected = oracle::all_resolutions(&m, &s);
        assert_eq!(guided(&m, &s).is_some(), !expected.is_empty());
    }
}
