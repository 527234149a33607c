//! Markdown convergence reports.

use std::fmt::Write;

use crate::converge::{ConvergenceResult, Verdict};
use crate::gin::print_grammar;
use crate::grammar::Grammar;
use crate::normalize::normalize;
use crate::trace::{print_trace, Trace};

fn fenced(out: &mut String, lang: &str, body: &str) {
    let _ = writeln!(out, "```{lang}");
    out.push_str(body);
    if !body.is_empty() && !body.ends_with('\n') {
        out.push('\n');
    }
    out.push_str("```\n\n");
}

fn trace_block(out: &mut String, title: &str, t: &Trace) {
    let _ = writeln!(out, "#### {title} ({} steps)\n", t.len());
    if !t.is_empty() {
        fenced(out, "xbgf", &print_trace(t));
    }
}

/// One servant section. Resolution lines read `servant -> master`, the
/// direction in which the servant is renamed.
pub fn render_section(r: &ConvergenceResult) -> String {
    let mut out = String::new();
    let status = match &r.verdict {
        Verdict::Converged => "converged",
        Verdict::Failed(_) => "FAILED",
    };
    let _ = writeln!(out, "## Servant `{}`: {status}\n", r.servant_name);
    if let Verdict::Failed(reason) = &r.verdict {
        let _ = writeln!(out, "reason: {reason}\n");
    }
    if let Some(f) = &r.failure {
        if let Some((m, s)) = &f.frontier {
            let _ = writeln!(out, "frontier: master `{m}` vs servant `{s}`\n");
        }
        let _ = writeln!(
            out,
            "search exhausted after {} abandoned alternatives\n",
            f.backtracks
        );
    }
    let _ = writeln!(out, "| phase | steps |\n|---|---|");
    for (phase, t) in [
        ("mutation", &r.mutation_trace),
        ("normalization", &r.servant_anf_trace),
        ("renaming", &r.rename_trace),
        ("structural", &r.structural_trace),
    ] {
        let _ = writeln!(out, "| {phase} | {} |", t.len());
    }
    let _ = writeln!(out, "\nabandoned alternatives: {}\n", r.backtracks);

    let heading = if r.failure.is_some() {
        "Partial resolution"
    } else {
        "Nominal resolution"
    };
    let _ = writeln!(out, "### {heading}\n");
    if r.justifications.is_empty() {
        for (m, s) in r.resolution.named_pairs() {
            let _ = writeln!(out, "- resolution: {s} -> {m}");
        }
    }
    for j in &r.justifications {
        let _ = writeln!(
            out,
            "- resolution: {} -> {} ({})",
            j.servant, j.master, j.reason
        );
    }
    out.push('\n');

    let _ = writeln!(out, "### Traces\n");
    trace_block(&mut out, "mutation", &r.mutation_trace);
    trace_block(&mut out, "normalization", &r.servant_anf_trace);
    trace_block(&mut out, "renaming", &r.rename_trace);
    trace_block(&mut out, "structural", &r.structural_trace);
    out
}

/// The full report: a master section followed by one section per servant,
/// in the given order.
pub fn render_report(master_name: &str, master: &Grammar, results: &[ConvergenceResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Convergence report\n");
    let converged = results.iter().filter(|r| r.verdict.is_converged()).count();
    let _ = writeln!(
        out,
        "{converged} of {} servants converged.\n",
        results.len()
    );
    let _ = writeln!(out, "## Master `{master_name}`\n");
    match normalize(master) {
        Ok(n) => {
            let _ = writeln!(out, "Normal form after {} steps:\n", n.trace.len());
            fenced(&mut out, "gin", &print_grammar(&n.normalized));
        }
        Err(e) => {
            let _ = writeln!(out, "normalization FAILED: {e}\n");
        }
    }
    for r in results {
        out.push_str(&render_section(r));
    }
    out
}
