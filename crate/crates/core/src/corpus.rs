//! The bundled FL grammars: one master, five convergent servants, and an
//! unrelated arithmetic grammar that must not converge.

use crate::gin::parse_grammar;
use crate::grammar::Grammar;

pub const MASTER: &str = include_str!("../corpus/master.gin");
pub const CONCRETE: &str = include_str!("../corpus/concrete.gin");
pub const STAR_LISTS: &str = include_str!("../corpus/starlists.gin");
pub const LABELLED: &str = include_str!("../corpus/labelled.gin");
pub const PERMUTED: &str = include_str!("../corpus/permuted.gin");
pub const LAYERED: &str = include_str!("../corpus/layered.gin");
pub const ARITHMETIC: &str = include_str!("../corpus/arithmetic.gin");

/// Normal form of [`CONCRETE`], checked against the normalizer's output.
pub const CONCRETE_ANF: &str = include_str!("../corpus/concrete.anf.gin");

/// Servants that converge to the master, by file stem.
pub const SERVANTS: [(&str, &str); 5] = [
    ("concrete", CONCRETE),
    ("starlists", STAR_LISTS),
    ("labelled", LABELLED),
    ("permuted", PERMUTED),
    ("layered", LAYERED),
];

/// Every bundled grammar, by file stem.
pub fn all() -> Vec<(&'static str, &'static str)> {
    let mut out = vec![("master", MASTER)];
    out.extend(SERVANTS);
    out.push(("arithmetic", ARITHMETIC));
    out
}

/// Parses a bundled grammar. The corpus is known to be well formed.
pub fn grammar(text: &str) -> Grammar {
    parse_grammar(text).expect("bundled grammar parses")
}
