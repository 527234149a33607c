use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gconv::{
    apply_trace, classify_anf, converge, global_resolution, normalize, parse_grammar, parse_trace,
    print_grammar, print_trace, prodsig, render_report, Direction, Grammar, MatchError, Trace,
};

#[derive(Parser)]
#[command(
    name = "gconv",
    version,
    about = "Normalize, match and converge grammars"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify nonterminals, or list what keeps the grammar out of ANF.
    CheckAnf { grammar: PathBuf },
    /// Rewrite a grammar into ANF.
    Normalize {
        grammar: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Print the signature of every production.
    Prodsig { grammar: PathBuf },
    /// Match the nonterminals of two grammars after normalizing both.
    Match { master: PathBuf, servant: PathBuf },
    /// Converge servant grammars onto a master grammar.
    Converge {
        master: PathBuf,
        servants: Vec<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        traces: Option<PathBuf>,
    },
    /// Replay a trace over a grammar.
    Apply {
        grammar: PathBuf,
        trace: PathBuf,
        #[arg(long)]
        backward: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A reason to stop, with the exit code it maps to.
enum Stop {
    /// Convergence, matching, ANF or replay failure.
    Failed(String),
    /// Parse or I/O error.
    Input(String),
}

type Outcome = Result<(), Stop>;

fn read(path: &Path) -> Result<String, Stop> {
    fs::read_to_string(path).map_err(|e| Stop::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Stop::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Grammar, Stop> {
    parse_grammar(&read(path)?).map_err(|e| Stop::Input(format!("{}:{e}", path.display())))
}

fn load_trace(path: &Path) -> Result<Trace, Stop> {
    parse_trace(&read(path)?).map_err(|e| Stop::Input(format!("{}:{e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "servant".into())
}

fn check_anf(path: &Path) -> Outcome {
    let c = classify_anf(&load(path)?);
    if !c.is_anf() {
        for (n, r) in &c.violations {
            eprintln!("{n}: {r}");
        }
        return Err(Stop::Failed(format!(
            "{} ANF violations",
            c.violations.len()
        )));
    }
    for (kind, set) in [
        ("chain", &c.chain),
        ("sequence", &c.sequence),
        ("undefined", &c.undefined),
    ] {
        let names: Vec<&str> = set.iter().map(String::as_str).collect();
        println!("{kind}: {}", names.join(" "));
    }
    Ok(())
}

fn normalize_cmd(path: &Path, out: Option<&Path>, trace: Option<&Path>) -> Outcome {
    let r = normalize(&load(path)?).map_err(|e| Stop::Failed(e.to_string()))?;
    if let Some(t) = trace {
        write(t, &print_trace(&r.trace))?;
    }
    eprintln!("{} steps", r.trace.len());
    emit(out, &print_grammar(&r.normalized))
}

fn prodsig_cmd(path: &Path) -> Outcome {
    for p in load(path)?.productions() {
        println!("{} :: {}", p.lhs, prodsig(p));
    }
    Ok(())
}

fn match_cmd(master: &Path, servant: &Path) -> Outcome {
    let anf = |p: &Path| -> Result<Grammar, Stop> {
        let g = load(p)?;
        normalize(&g)
            .map(|r| r.normalized)
            .map_err(|e| Stop::Failed(format!("{}: {e}", p.display())))
    };
    let (m, s) = (anf(master)?, anf(servant)?);
    match global_resolution(&m, &s) {
        Ok(r) => {
            print!("{}", r.resolution);
            Ok(())
        }
        Err(MatchError::Failure(f)) => {
            for (a, b) in f.partial.named_pairs() {
                eprintln!("matched before failure: {a} -> {b}");
            }
            Err(Stop::Failed(f.to_string()))
        }
        Err(e) => Err(Stop::Failed(e.to_string())),
    }
}

fn converge_cmd(
    master_path: &Path,
    servants: &[PathBuf],
    report: Option<&Path>,
    traces: Option<&Path>,
) -> Outcome {
    let master = load(master_path)?;
    let inputs: Vec<(String, Grammar)> = servants
        .iter()
        .map(|p| load(p).map(|g| (stem(p), g)))
        .collect::<Result<_, _>>()?;
    let results = std::thread::scope(|scope| {
        let handles: Vec<_> = inputs
            .iter()
            .map(|(name, g)| scope.spawn(|| converge(&master, g, name)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence thread panicked"))
            .collect::<Vec<_>>()
    });
    let mut done = Vec::new();
    let mut failed = false;
    for ((name, _), r) in inputs.iter().zip(results) {
        match r {
            Ok(r) => {
                if !r.verdict.is_converged() {
                    failed = true;
                    eprintln!("{name}: {}", r.verdict);
                }
                done.push(r);
            }
            Err(e) => {
                failed = true;
                eprintln!("{name}: {e}");
            }
        }
    }
    if let Some(dir) = traces {
        fs::create_dir_all(dir).map_err(|e| Stop::Input(format!("{}: {e}", dir.display())))?;
        for r in &done {
            for (suffix, t) in [
                ("mutate", &r.mutation_trace),
                ("anf", &r.servant_anf_trace),
                ("rename", &r.rename_trace),
                ("struct", &r.structural_trace),
            ] {
                write(
                    &dir.join(format!("{}.{suffix}.xbgf", r.servant_name)),
                    &print_trace(t),
                )?;
            }
        }
    }
    let text = render_report(&stem(master_path), &master, &done);
    match report {
        Some(p) => {
            write(p, &text)?;
            for r in &done {
                println!(
                    "{}: {} (mutation {}, normalization {}, renaming {}, structural {})",
                    r.servant_name,
                    if r.verdict.is_converged() {
                        "converged"
                    } else {
                        "FAILED"
                    },
                    r.mutation_trace.len(),
                    r.servant_anf_trace.len(),
                    r.rename_trace.len(),
                    r.structural_trace.len()
                );
            }
        }
        None => print!("{text}"),
    }
    if failed {
        Err(Stop::Failed("not every servant converged".into()))
    } else {
        Ok(())
    }
}

fn apply_cmd(grammar: &Path, trace: &Path, backward: bool, out: Option<&Path>) -> Outcome {
    let g = load(grammar)?;
    let t = load_trace(trace)?;
    let dir = if backward {
        Direction::Backward
    } else {
        Direction::Forward
    };
    let h = apply_trace(&g, &t, dir).map_err(|e| Stop::Failed(e.to_string()))?;
    emit(out, &print_grammar(&h))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::CheckAnf { grammar } => check_anf(grammar),
        Command::Normalize {
            grammar,
            out,
            trace,
        } => normalize_cmd(grammar, out.as_deref(), trace.as_deref()),
        Command::Prodsig { grammar } => prodsig_cmd(grammar),
        Command::Match { master, servant } => match_cmd(master, servant),
        Command::Converge {
            master,
            servants,
            report,
            traces,
        } => converge_cmd(master, servants, report.as_deref(), traces.as_deref()),
        Command::Apply {
            grammar,
            trace,
            backward,
            out,
        } => apply_cmd(grammar, trace, *backward, out.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Stop::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Stop::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
