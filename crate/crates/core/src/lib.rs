//! Grammar convergence by normalization and signature matching.
//!
//! Grammars of the same intended language are rewritten to Abstract Normal
//! Form, their nonterminals are matched through production signatures, and
//! the differences are expressed as reversible transformation traces.

pub mod anf;
pub mod converge;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod gen;
pub mod gin;
pub mod grammar;
pub mod normalize;
pub mod prodsig;
pub mod report;
pub mod resolve;
pub mod trace;
pub mod transform;

pub use anf::{classify_anf, AnfClassification};
pub use converge::{
    converge, structural_resolve, verify_converged, ConvergeError, ConvergenceResult, Verdict,
};
pub use error::{ModelError, NormalizeError, ParseError, SourceSpan, TraceError, TransformError};
pub use expr::{Expr, Path};
pub use gin::{parse_expr, parse_grammar, print_expr, print_grammar};
pub use grammar::{grammar_identical, nominally_equivalent, Grammar, Production};
pub use normalize::{mutate_for_convergence, normalize, NormalizationResult};
pub use prodsig::{
    footprint, footprint_equiv, plus_to_star, prodsig, prodsig_equiv, production_resolutions,
    Footprint, Marker, NominalResolution, ProdSig, Symbol,
};
pub use report::{render_report, render_section};
pub use resolve::{global_resolution, GlobalResolution, Justification, MatchError, MatchFailure};
pub use trace::{parse_trace, print_trace, Occurrence, Recorded, Recursion, Step, Trace};
pub use transform::{apply_backward, apply_forward, apply_trace, Direction};
