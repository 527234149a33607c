use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gconv::corpus::{self, ARITHMETIC, CONCRETE, MASTER, SERVANTS};
use gconv::{parse_grammar, parse_trace};
use tempfile::TempDir;

fn gconv(args: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gconv"))
        .args(args)
        .output()
        .unwrap()
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(s: &str) -> &Path {
    Path::new(s)
}

#[test]
fn check_anf_classifies_or_lists_violations() {
    let d = TempDir::new().unwrap();
    let ok = put(
        d.path(),
        "ok.gin",
        "root P\nP ::= F+ ;\nF ::= A ;\nF ::= B ;\n",
    );
    let o = gconv(&[p("check-anf"), &ok]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "chain: F\nsequence: P\nundefined: A B\n");

    let bad = put(d.path(), "bad.gin", "root P\nP ::= x::F+ ;\n");
    let o = gconv(&[p("check-anf"), &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("P: "), "{}", stderr(&o));
}

#[test]
fn normalize_writes_grammar_and_trace() {
    let d = TempDir::new().unwrap();
    let src = put(d.path(), "concrete.gin", CONCRETE);
    let (out, trace) = (d.path().join("out.gin"), d.path().join("out.xbgf"));
    let o = gconv(&[p("normalize"), &src, p("--out"), &out, p("--trace"), &trace]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let g = parse_grammar(&fs::read_to_string(&out).unwrap()).unwrap();
    let t = parse_trace(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(stderr(&o).starts_with(&format!("{} steps", t.len())));

    let back = d.path().join("back.gin");
    let o = gconv(&[p("apply"), &out, &trace, p("--backward"), p("--out"), &back]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        parse_grammar(&fs::read_to_string(&back).unwrap()).unwrap(),
        corpus::grammar(CONCRETE)
    );
    let o = gconv(&[p("apply"), &src, &trace]);
    assert_eq!(parse_grammar(&stdout(&o)).unwrap(), g);
}

#[test]
fn prodsig_prints_one_line_per_production() {
    let d = TempDir::new().unwrap();
    let g = put(d.path(), "g.gin", "root P\nP ::= F+ ;\nF ::= S S* E ;\n");
    let o = gconv(&[p("prodsig"), &g]);
    assert_eq!(
        stdout(&o),
        "P :: {F:{plus}}\nF :: {E:{one}, S:{one,star}}\n"
    );
}

#[test]
fn match_reports_pairs_or_failure() {
    let d = TempDir::new().unwrap();
    let m = put(d.path(), "m.gin", MASTER);
    let s = put(d.path(), "s.gin", SERVANTS[3].1);
    let o = gconv(&[p("match"), &m, &s]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(
        stdout(&o).lines().any(|l| l == "Program -> Program"),
        "{}",
        stdout(&o)
    );

    let bad = put(d.path(), "arith.gin", ARITHMETIC);
    let o = gconv(&[p("match"), &m, &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("cannot match Program with Expr"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn converge_writes_report_and_traces() {
    let d = TempDir::new().unwrap();
    let m = put(d.path(), "master.gin", MASTER);
    let servants: Vec<PathBuf> = SERVANTS
        .iter()
        .map(|(n, t)| put(d.path(), &format!("{n}.gin"), t))
        .collect();
    let (report, traces) = (d.path().join("report.md"), d.path().join("traces"));
    let mut args: Vec<&Path> = vec![p("converge"), &m];
    args.extend(servants.iter().map(PathBuf::as_path));
    args.extend([p("--report"), &report, p("--traces"), &traces]);
    let o = gconv(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = stdout(&o);
    let names: Vec<&str> = summary
        .lines()
        .map(|l| l.split(':').next().unwrap())
        .collect();
    assert_eq!(names, SERVANTS.map(|(n, _)| n));
    let text = fs::read_to_string(&report).unwrap();
    assert_eq!(text.matches(": converged").count(), SERVANTS.len());
    for (n, _) in SERVANTS {
        for phase in ["mutate", "anf", "rename", "struct"] {
            let t = fs::read_to_string(traces.join(format!("{n}.{phase}.xbgf"))).unwrap();
            parse_trace(&t).unwrap();
        }
    }
}

#[test]
fn converge_fails_on_incompatible_servant() {
    let d = TempDir::new().unwrap();
    let m = put(d.path(), "master.gin", MASTER);
    let s = put(d.path(), "arithmetic.gin", ARITHMETIC);
    let o = gconv(&[p("converge"), &m, &s]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("## Servant `arithmetic`: FAILED"));
    assert!(
        text.contains("frontier: master `Program` vs servant `Expr`"),
        "{text}"
    );
}

#[test]
fn input_errors_exit_two() {
    let d = TempDir::new().unwrap();
    let junk = put(d.path(), "junk.gin", "root\nP ::= ( ;\n");
    assert_eq!(gconv(&[p("normalize"), &junk]).status.code(), Some(2));
    assert_eq!(
        gconv(&[p("prodsig"), &d.path().join("missing.gin")])
            .status
            .code(),
        Some(2)
    );
    let g = put(d.path(), "g.gin", "root P\nP ::= A ;\n");
    let t = put(d.path(), "t.xbgf", "frobnicate(P);\n");
    assert_eq!(gconv(&[p("apply"), &g, &t]).status.code(), Some(2));
}
