//! One line per acceptance criterion. Exits non-zero if any criterion fails.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::collections::HashSet;
use std::fs;
use std::mem::{discriminant, Discriminant};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use gconv::corpus::{self, ARITHMETIC, MASTER, SERVANTS};
use gconv::gen::{disguise, perturb, random_anf, random_grammar, GenConfig};
use gconv::{
    apply_backward, apply_forward, apply_trace, classify_anf, footprint_equiv, global_resolution,
    grammar_identical, mutate_for_convergence, normalize, parse_grammar, parse_trace,
    print_grammar, print_trace, Direction, Expr, Footprint, Grammar, Marker, Step,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, u64, Box<dyn Fn() -> Check + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn gconv(args: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gconv"))
        .args(args)
        .output()
        .expect("gconv runs")
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn generated(count: usize) -> Vec<Grammar> {
    let cfg = GenConfig::default();
    (0..count as u64)
        .map(|seed| random_grammar(&mut ChaCha8Rng::seed_from_u64(seed), &cfg))
        .collect()
}

fn corpus_grammars() -> Vec<Grammar> {
    corpus::all()
        .into_iter()
        .map(|(_, t)| corpus::grammar(t))
        .collect()
}

fn signature_examples() -> Check {
    let d = TempDir::new().unwrap();
    let g = put(d.path(), "g.gin", "root P\nP ::= F+ ;\nF ::= S S* E ;\n");
    let out = gconv(&[Path::new("prodsig"), &g]);
    let text = String::from_utf8_lossy(&out.stdout);
    ensure!(
        text == "P :: {F:{plus}}\nF :: {E:{one}, S:{one,star}}\n",
        "prodsig printed {text:?}"
    );
    let a = Footprint::new(vec![Marker::One, Marker::Star]);
    let b = Footprint::new(vec![Marker::One, Marker::Plus]);
    ensure!(
        footprint_equiv(&a, &b),
        "{{one,star}} and {{one,plus}} not equivalent"
    );
    Ok("signatures byte-exact".into())
}

fn corpus_convergence() -> Check {
    let d = TempDir::new().unwrap();
    let m = put(d.path(), "master.gin", MASTER);
    let servants: Vec<PathBuf> = SERVANTS
        .iter()
        .map(|(n, t)| put(d.path(), &format!("{n}.gin"), t))
        .collect();
    let report = d.path().join("report.md");
    let mut args: Vec<&Path> = vec![Path::new("converge"), &m];
    args.extend(servants.iter().map(PathBuf::as_path));
    args.extend([Path::new("--report"), &report]);
    let out = gconv(&args);
    ensure!(
        out.status.code() == Some(0),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = String::from_utf8_lossy(&out.stdout).into_owned();
    let mut notes = Vec::new();
    for line in summary.lines() {
        // name: converged (mutation a, normalization b, renaming c, structural d)
        let (name, rest) = line.split_once(": ").ok_or(format!("bad line {line}"))?;
        let nums: Vec<usize> = rest
            .split(|c: char| !c.is_ascii_digit())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().unwrap())
            .collect();
        let [mutation, anf, rename, structural] = nums[..] else {
            return Err(format!("bad line {line}"));
        };
        ensure!(rest.starts_with("converged"), "{name} did not converge");
        ensure!((5..=40).contains(&anf), "{name}: {anf} normalization steps");
        if name == "concrete" {
            ensure!(
                (20..=30).contains(&anf),
                "concrete: {anf} normalization steps"
            );
        }
        if name == "layered" {
            ensure!(
                (2..=6).contains(&mutation),
                "layered: {mutation} mutation steps"
            );
        }
        ensure!(rename <= 9, "{name}: {rename} renames");
        ensure!(structural <= 5, "{name}: {structural} structural steps");
        notes.push(format!("{name} {mutation}/{anf}/{rename}/{structural}"));
    }
    ensure!(
        notes.len() == SERVANTS.len(),
        "{} summary lines",
        notes.len()
    );
    Ok(notes.join(", "))
}

fn variants(e: &Expr, seen: &mut HashSet<Discriminant<Expr>>) {
    seen.insert(discriminant(e));
    match e {
        Expr::Sequence(v) | Expr::Choice(v) => v.iter().for_each(|c| variants(c, seen)),
        Expr::Optional(b) | Expr::Star(b) | Expr::Plus(b) | Expr::Selector(_, b) => {
            variants(b, seen)
        }
        Expr::SepListPlus(a, b) | Expr::SepListStar(a, b) => {
            variants(a, seen);
            variants(b, seen);
        }
        _ => {}
    }
}

fn anf_soundness(gs: &[Grammar]) -> Check {
    let mut seen = HashSet::new();
    gs.iter()
        .flat_map(|g| g.productions())
        .for_each(|p| variants(&p.rhs, &mut seen));
    ensure!(
        seen.len() == 11,
        "only {} expression variants generated",
        seen.len()
    );
    for (i, g) in gs.iter().enumerate() {
        let r = normalize(g).map_err(|e| format!("grammar {i}: {e}"))?;
        let c = classify_anf(&r.normalized);
        ensure!(c.is_anf(), "grammar {i}: {:?}", c.violations);
        let again = normalize(&r.normalized).map_err(|e| format!("grammar {i}: {e}"))?;
        ensure!(
            again.trace.is_empty() && grammar_identical(&again.normalized, &r.normalized),
            "grammar {i} not idempotent"
        );
    }
    Ok(format!("{} grammars", gs.len()))
}

fn replays(g: &Grammar, steps: &gconv::Trace) -> Result<(), String> {
    let mut cur = g.clone();
    for s in &steps.steps {
        let next = apply_forward(&cur, s).map_err(|e| e.to_string())?;
        let prev = apply_backward(&next, s).map_err(|e| e.to_string())?;
        ensure!(grammar_identical(&prev, &cur), "step {s:?} does not invert");
        cur = next;
    }
    let back = apply_trace(&cur, steps, Direction::Backward).map_err(|e| e.to_string())?;
    ensure!(
        grammar_identical(&back, g),
        "trace does not restore the original"
    );
    Ok(())
}

fn reversibility(gs: &[Grammar]) -> Check {
    let mut steps = 0;
    for (i, g) in gs.iter().enumerate() {
        let t = normalize(g).map_err(|e| format!("grammar {i}: {e}"))?.trace;
        replays(g, &t).map_err(|e| format!("grammar {i}: {e}"))?;
        steps += t.len();
    }
    let master = corpus::grammar(MASTER);
    for (name, text) in corpus::all() {
        let g = corpus::grammar(text);
        let r = gconv::converge(&master, &g, name).map_err(|e| e.to_string())?;
        let t = r.servant_trace();
        replays(&g, &t).map_err(|e| format!("{name}: {e}"))?;
        steps += t.len();
    }
    Ok(format!("{steps} steps replayed"))
}

fn oracle_equivalence() -> Check {
    let usable = |g: &Grammar| classify_anf(g).is_anf() && g.reachable() == *g.nonterminals();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut pairs, mut matched) = (0, 0);
    while pairs < 200 {
        let m = random_anf(&mut rng, 6);
        let s = match rng.gen_range(0..3) {
            0 => disguise(&mut rng, &m),
            1 => {
                let p = perturb(&mut rng, &m);
                disguise(&mut rng, &p)
            }
            _ => random_anf(&mut rng, 6),
        };
        if !usable(&m) || !usable(&s) {
            continue;
        }
        pairs += 1;
        let expected = oracle::all_resolutions(&m, &s);
        match global_resolution(&m, &s) {
            Ok(r) => {
                matched += 1;
                let f = r
                    .resolution
                    .named_pairs()
                    .map(|(a, b)| (a.to_string(), b.to_string()))
                    .collect();
                ensure!(
                    expected.contains(&f),
                    "guided result outside oracle set\n{m}\n{s}"
                );
            }
            Err(_) => ensure!(
                expected.is_empty(),
                "guided search missed a resolution\n{m}\n{s}"
            ),
        }
    }
    ensure!(
        matched > 0 && matched < pairs,
        "suite lacks variety: {matched} of {pairs} matched"
    );
    Ok(format!("{pairs} pairs, {matched} matched"))
}

fn deyaccify_language() -> Check {
    let mut checked = 0;
    for (name, text) in corpus::all() {
        let g = corpus::grammar(text);
        let (_, t) = mutate_for_convergence(&g);
        let mut cur = g;
        for s in &t.steps {
            let next = apply_forward(&cur, s).map_err(|e| e.to_string())?;
            if matches!(s, Step::Deyaccify { .. }) {
                ensure!(
                    oracle::bounded_languages(&cur, 4) == oracle::bounded_languages(&next, 4),
                    "{name}: {s:?} changes the language"
                );
                checked += 1;
            }
            cur = next;
        }
    }
    ensure!(checked > 0, "no deyaccify step in the corpus");
    Ok(format!("{checked} steps"))
}

fn round_trips(gs: &[Grammar]) -> Check {
    let master = corpus::grammar(MASTER);
    let mut all: Vec<(Grammar, gconv::Trace)> = Vec::new();
    for (name, text) in corpus::all() {
        let g = corpus::grammar(text);
        let t = gconv::converge(&master, &g, name)
            .map_err(|e| e.to_string())?
            .servant_trace();
        all.push((g, t));
    }
    for g in gs {
        let t = normalize(g).map_err(|e| e.to_string())?.trace;
        all.push((g.clone(), t));
    }
    for (i, (g, t)) in all.iter().enumerate() {
        let pg = parse_grammar(&print_grammar(g)).map_err(|e| format!("grammar {i}: {e}"))?;
        ensure!(grammar_identical(&pg, g), "grammar {i} does not round-trip");
        let pt = parse_trace(&print_trace(t)).map_err(|e| format!("trace {i}: {e}"))?;
        ensure!(&pt == t, "trace {i} does not round-trip");
    }
    let d = TempDir::new().unwrap();
    let m = put(d.path(), "master.gin", MASTER);
    let mut args: Vec<PathBuf> = vec!["converge".into(), m];
    args.extend(
        corpus::all()[1..]
            .iter()
            .map(|(n, t)| put(d.path(), &format!("{n}.gin"), t)),
    );
    let argv: Vec<&Path> = args.iter().map(PathBuf::as_path).collect();
    let (a, b) = (gconv(&argv), gconv(&argv));
    ensure!(
        !a.stdout.is_empty() && a.stdout == b.stdout,
        "reports differ between runs"
    );
    Ok(format!("{} grammar/trace pairs, report stable", all.len()))
}

fn failure_honesty() -> Check {
    let d = TempDir::new().unwrap();
    let m = put(d.path(), "master.gin", MASTER);
    let s = put(d.path(), "arithmetic.gin", ARITHMETIC);
    let out = gconv(&[Path::new("converge"), &m, &s]);
    ensure!(out.status.code() == Some(1), "exit {:?}", out.status.code());
    let text = String::from_utf8_lossy(&out.stdout);
    ensure!(
        text.contains("## Servant `arithmetic`: FAILED"),
        "no FAILED section"
    );
    let frontier = text
        .lines()
        .find(|l| l.starts_with("frontier: "))
        .ok_or("no frontier line")?;
    Ok(frontier.to_string())
}

fn main() {
    let gs = generated(500);
    let mut all_gs = gs.clone();
    all_gs.extend(corpus_grammars());
    let criteria: [Criterion; 8] = [
        ("1 signature examples", 1, Box::new(signature_examples)),
        ("2 corpus convergence", 5, Box::new(corpus_convergence)),
        ("3 ANF soundness", 60, Box::new(|| anf_soundness(&gs))),
        ("4 reversibility", 60, Box::new(|| reversibility(&gs))),
        ("5 oracle equivalence", 120, Box::new(oracle_equivalence)),
        ("6 deyaccify language", 30, Box::new(deyaccify_language)),
        (
            "7 round-trip formats",
            30,
            Box::new(|| round_trips(&all_gs)),
        ),
        ("8 failure honesty", 1, Box::new(failure_honesty)),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = match result {
            Ok(note) if took > Duration::from_secs(limit) => {
                Err(format!("{note}; over the {limit} s limit"))
            }
            r => r,
        };
        match result {
            Ok(note) => println!("PASS {name} ({:.2} s): {note}", took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({:.2} s): {why}", took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
