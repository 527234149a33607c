mod common;

use common::oracle::bounded_languages;
use gconv::corpus::{self, SERVANTS};
use gconv::{apply_forward, mutate_for_convergence, parse_grammar, Grammar, Step};

/// Replays a mutation trace and checks the bounded languages around every
/// deyaccify step. Returns the number of steps checked.
fn check_deyaccify_steps(g: &Grammar) -> usize {
    let (_, trace) = mutate_for_convergence(g);
    let mut cur = g.clone();
    let mut checked = 0;
    for step in &trace.steps {
        let next = apply_forward(&cur, step).unwrap();
        if matches!(step, Step::Deyaccify { .. }) {
            assert_eq!(
                bounded_languages(&cur, 4),
                bounded_languages(&next, 4),
                "{step:?}"
            );
            checked += 1;
        }
        cur = next;
    }
    checked
}

#[test]
fn left_recursion_over_two_symbols() {
    let g = parse_grammar("root X\nX ::= A ;\nX ::= X B ;\n").unwrap();
    assert_eq!(check_deyaccify_steps(&g), 1);
    let (m, _) = mutate_for_convergence(&g);
    assert_eq!(m.to_string(), "root X\nX ::= A B* ;\n");
}

#[test]
fn right_recursion_with_empty_base() {
    let g = parse_grammar("root L\nL ::= eps ;\nL ::= A B L ;\n").unwrap();
    assert_eq!(check_deyaccify_steps(&g), 1);
}

#[test]
fn recursion_with_compound_parts() {
    let g = parse_grammar("root E\nE ::= E \"+\" T ;\nE ::= T ;\nT ::= \"x\" | \"(\" E \")\" ;\n")
        .unwrap();
    assert_eq!(check_deyaccify_steps(&g), 1);
}

#[test]
fn every_corpus_deyaccify_preserves_language() {
    let total: usize = SERVANTS
        .iter()
        .map(|(_, text)| check_deyaccify_steps(&corpus::grammar(text)))
        .sum();
    assert!(total >= 1);
}
