//! Command-line front end: check, transpile, solve, eval, gen, axioms.

use std::fs;
use std::io::{self, Read, Write};
use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use heapsmt::elaborator::{elaborate_script, HeapId};
use heapsmt::frontend::{self, print_script, Command};
use heapsmt::redgen::{self, Cnf};
use heapsmt::semantics::{
    self, check_axiom, eval, AxiomId, AxiomReport, BatteryBounds, ConcreteModel, Interpretation, BATTERY_DECLARATION,
};
use heapsmt::solver::fuzz::{random_script, FuzzConfig};
use heapsmt::solver::{solve_with, Conjunction, SolveOptions, Verdict};
use heapsmt::transpiler::battery::{check_axiom_arrays, ArrayBounds};
use heapsmt::transpiler::{transpile_script, TranspileConfig};

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_UNKNOWN: u8 = 30;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(name = "heapsmt", version, about = "Tools for the SMT-LIB theory of heap")]
#[command(after_help = "Exit codes: 0 success, 1 rejected input, 2 usage error, \
10 sat, 20 unsat, 30 unknown, 70 internal error.")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SemanticsKind {
    Heap,
    Arrays,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and elaborate scripts; `-` reads standard input.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Lower a script to plain SMT-LIB arrays and datatypes.
    Transpile {
        file: PathBuf,
        /// Omit heap equality and well-formedness guards.
        #[arg(long)]
        uncorrected: bool,
        /// Prefix of generated symbols.
        #[arg(long, default_value = "enc.")]
        prefix: String,
    },
    /// Decide a conjunction of ground heap literals.
    Solve {
        file: PathBuf,
        /// Search nodes before answering unknown.
        #[arg(long, env = "HEAPSMT_BUDGET", default_value_t = SolveOptions::default().budget)]
        budget: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Print search statistics to standard error.
        #[arg(long)]
        stats: bool,
    },
    /// Evaluate a term under an interpretation file.
    Eval {
        /// Script with the declarations the term uses.
        file: PathBuf,
        /// Interpretation in JSON, as printed by `solve`.
        #[arg(long)]
        model: PathBuf,
        /// The term; omitted, every assertion of the script is evaluated.
        term: Option<String>,
    },
    /// Generate benchmark files.
    Gen {
        #[command(subcommand)]
        what: Gen,
    },
    /// Check the twelve heap axioms exhaustively.
    Axioms(AxiomsArgs),
}

#[derive(Args)]
struct AxiomsArgs {
    /// Script whose first heap declaration is checked; defaults to a built-in one.
    file: Option<PathBuf>,
    /// Heap semantics bounds `heap-size:objects:max-address`.
    #[arg(long, default_value = "3:3:5")]
    bounds: BatteryBounds,
    #[arg(long, value_enum, default_value = "heap")]
    semantics: SemanticsKind,
    /// Check only these axioms, e.g. `--axiom ext --axiom cons`.
    #[arg(long = "axiom")]
    only: Vec<AxiomId>,
    /// With `--semantics arrays`: integers range over `MIN:MAX`.
    #[arg(long, default_value = "-1:2", allow_hyphen_values = true)]
    ints: String,
    /// With `--semantics arrays`: number of objects.
    #[arg(long, default_value_t = 2)]
    objects: usize,
    /// With `--semantics arrays`: check the uncorrected encoding.
    #[arg(long)]
    uncorrected: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Gen {
    /// Encode a DIMACS CNF as heap literals.
    SatReduction {
        #[arg(long)]
        dimacs: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The two-sided interpolation instance.
    Lemma2 {
        /// Write `lemma2-a.smt2`, `lemma2-b.smt2` and `lemma2.smt2` here
        /// instead of printing the combined script.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// The linked-list fixtures and the instances above.
    Fixtures {
        #[arg(long, default_value = "fixtures")]
        out_dir: PathBuf,
    },
    /// Random conjunctions from the fuzz generator.
    Fuzz {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Write `fuzz-<seed>-<index>.smt2` files here instead of printing.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

/// Error ending the process with a given status.
struct Exit(u8, String);

impl Exit {
    fn usage(msg: impl Into<String>) -> Self {
        Exit(EXIT_USAGE, msg.into())
    }

    fn failed(msg: impl ToString) -> Self {
        Exit(EXIT_FAILED, msg.to_string())
    }
}

fn read_input(path: &Path) -> Result<String, Exit> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Exit::usage(format!("standard input: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Exit::usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Exit> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Exit::usage(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Exit::usage(format!("{}: {e}", path.display())))
}

fn check_one(path: &Path) -> Result<(), Exit> {
    let src = read_input(path)?;
    let cmds = frontend::parse_str(&src).map_err(Exit::failed)?;
    elaborate_script(&cmds).map_err(Exit::failed)?;
    Ok(())
}

/// Checks every file; the status is the worst one, usage errors over rejections.
fn check(files: &[PathBuf], out: &mut impl Write) -> Result<u8, Exit> {
    let results: Vec<Result<(), Exit>> = thread::scope(|s| {
        let handles: Vec<_> = files.iter().map(|f| s.spawn(move || check_one(f))).collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Exit(EXIT_INTERNAL, "internal error".into())))
            })
            .collect()
    });
    let mut status = 0;
    for (f, r) in files.iter().zip(results) {
        match r {
            Ok(()) => writeln!(out, "ok {}", f.display()).map_err(io_err)?,
            Err(Exit(EXIT_USAGE, e)) => {
                eprintln!("heapsmt: {e}");
                status = EXIT_USAGE;
            }
            Err(Exit(code, e)) => {
                eprintln!("{}: {e}", f.display());
                status = status.max(code);
            }
        }
    }
    Ok(status)
}

fn io_err(e: io::Error) -> Exit {
    if e.kind() == io::ErrorKind::BrokenPipe {
        // The reader went away, as with `| head`.
        std::process::exit(0);
    }
    Exit(EXIT_INTERNAL, format!("writing output: {e}"))
}

fn transpile(file: &Path, uncorrected: bool, prefix: String, out: &mut impl Write) -> Result<u8, Exit> {
    let src = read_input(file)?;
    let cfg = TranspileConfig {
        prefix,
        ..if uncorrected {
            TranspileConfig::uncorrected()
        } else {
            TranspileConfig::default()
        }
    };
    let cmds = frontend::parse_str(&src).map_err(Exit::failed)?;
    let lowered = transpile_script(&cmds, &cfg).map_err(Exit::failed)?;
    out.write_all(print_script(&lowered).as_bytes()).map_err(io_err)?;
    Ok(0)
}

fn solve(file: &Path, budget: u64, format: Format, stats: bool, out: &mut impl Write) -> Result<u8, Exit> {
    let src = read_input(file)?;
    let conj = Conjunction::parse(&src).map_err(Exit::failed)?;
    let r = solve_with(&conj, &SolveOptions { budget }).map_err(Exit::failed)?;
    if let Verdict::Sat(m) = &r.verdict {
        for lit in &conj.literals {
            if eval(&conj.env, &lit.term(), m).ok() != Some(semantics::Value::Bool(true)) {
                return Err(Exit(EXIT_INTERNAL, "model does not satisfy the input".into()));
            }
        }
    }
    match format {
        Format::Text => {
            writeln!(out, "{}", r.verdict).map_err(io_err)?;
            match &r.verdict {
                Verdict::Sat(m) => writeln!(out, "{}", m.to_json()).map_err(io_err)?,
                Verdict::Unknown(reason) => writeln!(out, "; {reason}").map_err(io_err)?,
                Verdict::Unsat => {}
            }
        }
        Format::Json => {
            let mut v = json!({
                "v": 1,
                "verdict": r.verdict.name(),
                "nodes": r.stats.nodes,
                "leaves": r.stats.leaves,
            });
            match &r.verdict {
                Verdict::Sat(m) => v["model"] = serde_json::to_value(m).expect("serializable"),
                Verdict::Unknown(reason) => v["reason"] = json!(reason),
                Verdict::Unsat => {}
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable")).map_err(io_err)?;
        }
    }
    if stats {
        eprintln!(
            "nodes {} leaves {} time {} ms",
            r.stats.nodes,
            r.stats.leaves,
            r.stats.time.as_millis()
        );
    }
    Ok(match r.verdict {
        Verdict::Sat(_) => EXIT_SAT,
        Verdict::Unsat => EXIT_UNSAT,
        Verdict::Unknown(_) => EXIT_UNKNOWN,
    })
}

fn eval_cmd(file: &Path, model: &Path, term: Option<&str>, out: &mut impl Write) -> Result<u8, Exit> {
    let src = read_input(file)?;
    let script = elaborate_script(&frontend::parse_str(&src).map_err(Exit::failed)?).map_err(Exit::failed)?;
    let interp = Interpretation::from_json(&read_input(model)?)
        .map_err(|e| Exit::failed(format!("{}: {e}", model.display())))?;
    let terms = match term {
        Some(t) => {
            let e = frontend::parse_sexpr(t).map_err(Exit::failed)?;
            vec![script.env.typecheck(&e, &mut vec![]).map_err(Exit::failed)?]
        }
        None => script.assertions().cloned().collect(),
    };
    for t in terms {
        let v = eval(&script.env, &t, &interp).map_err(Exit::failed)?;
        writeln!(out, "{v}").map_err(io_err)?;
    }
    Ok(0)
}

fn gen(what: Gen, out: &mut impl Write) -> Result<u8, Exit> {
    match what {
        Gen::SatReduction { dimacs, output } => {
            let cnf = Cnf::parse_dimacs(&read_input(&dimacs)?).map_err(Exit::failed)?;
            let g = redgen::sat_to_heap(&cnf).map_err(Exit::failed)?;
            match output {
                Some(p) => write_file(&p, &g.smt2)?,
                None => out.write_all(g.smt2.as_bytes()).map_err(io_err)?,
            }
        }
        Gen::Lemma2 { out_dir } => {
            let l = redgen::lemma2();
            match out_dir {
                Some(dir) => {
                    for (name, g) in [
                        ("lemma2-a.smt2", &l.a),
                        ("lemma2-b.smt2", &l.b),
                        ("lemma2.smt2", &l.combined),
                    ] {
                        write_file(&dir.join(name), &g.smt2)?;
                    }
                }
                None => out.write_all(l.combined.smt2.as_bytes()).map_err(io_err)?,
            }
        }
        Gen::Fixtures { out_dir } => {
            for p in redgen::emit_fixtures(&out_dir).map_err(|e| Exit::usage(format!("{}: {e}", out_dir.display())))? {
                writeln!(out, "{}", p.display()).map_err(io_err)?;
            }
        }
        Gen::Fuzz { seed, count, out_dir } => {
            for i in 0..count {
                let text = random_script(seed, i, FuzzConfig::default());
                match &out_dir {
                    Some(dir) => write_file(&dir.join(format!("fuzz-{seed}-{i}.smt2")), &text)?,
                    None => {
                        writeln!(out, "; fuzz seed {seed} index {i}").map_err(io_err)?;
                        out.write_all(text.as_bytes()).map_err(io_err)?;
                    }
                }
            }
        }
    }
    Ok(0)
}

/// Commands up to and including the first heap declaration.
fn heap_declaration(src: &str) -> Result<String, Exit> {
    let cmds = frontend::parse_str(src).map_err(Exit::failed)?;
    let end = cmds
        .iter()
        .position(|c| matches!(c, Command::DeclareHeap(_)))
        .ok_or_else(|| Exit::failed("the script declares no heap"))?;
    Ok(print_script(&cmds[..=end]))
}

fn parse_ints(s: &str) -> Result<(i64, i64), Exit> {
    let bad = || Exit::usage(format!("--ints must be `MIN:MAX` with MIN <= MAX, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let (lo, hi): (i64, i64) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn axioms(args: AxiomsArgs, out: &mut impl Write) -> Result<u8, Exit> {
    let declaration = match &args.file {
        Some(f) => heap_declaration(&read_input(f)?)?,
        None => BATTERY_DECLARATION.to_string(),
    };
    if args.uncorrected && args.semantics == SemanticsKind::Heap {
        return Err(Exit::usage("--uncorrected applies to --semantics arrays"));
    }
    let selected: Vec<AxiomId> = if args.only.is_empty() {
        AxiomId::ALL.to_vec()
    } else {
        AxiomId::ALL.into_iter().filter(|a| args.only.contains(a)).collect()
    };
    let reports: Vec<AxiomReport> = match args.semantics {
        SemanticsKind::Heap => {
            let script =
                elaborate_script(&frontend::parse_str(&declaration).map_err(Exit::failed)?).map_err(Exit::failed)?;
            let model = ConcreteModel::from_env(&script.env, HeapId(0), args.bounds).map_err(Exit::failed)?;
            selected.iter().map(|&a| check_axiom(&model, a)).collect()
        }
        SemanticsKind::Arrays => {
            let (int_min, int_max) = parse_ints(&args.ints)?;
            let cfg = if args.uncorrected {
                TranspileConfig::uncorrected()
            } else {
                TranspileConfig::default()
            };
            let ab = ArrayBounds {
                int_min,
                int_max,
                objects: args.objects,
            };
            selected
                .iter()
                .map(|&a| check_axiom_arrays(&declaration, a, &cfg, ab))
                .collect::<Result<_, _>>()
                .map_err(Exit::failed)?
        }
    };
    let passed = reports.iter().filter(|r| r.passed()).count();
    match args.format {
        Format::Text => {
            for r in &reports {
                let verdict = if r.passed() { "PASS" } else { "FAIL" };
                let cex = r.counterexample.as_ref().map(|c| c.to_string()).unwrap_or_default();
                writeln!(
                    out,
                    "{:<8} {verdict} {:>10}  {cex}",
                    format!("[{}]", r.axiom),
                    r.instances
                )
                .map_err(io_err)?;
            }
            writeln!(out, "{passed}/{} passed", reports.len()).map_err(io_err)?;
        }
        Format::Json => {
            let v = json!({ "v": 1, "passed": passed, "total": reports.len(), "axioms": reports });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable")).map_err(io_err)?;
        }
    }
    Ok(if passed == reports.len() { 0 } else { EXIT_FAILED })
}

fn run(cli: Cli) -> Result<u8, Exit> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Cmd::Check { files } => check(&files, &mut out),
        Cmd::Transpile {
            file,
            uncorrected,
            prefix,
        } => transpile(&file, uncorrected, prefix, &mut out),
        Cmd::Solve {
            file,
            budget,
            format,
            stats,
        } => solve(&file, budget, format, stats, &mut out),
        Cmd::Eval { file, model, term } => eval_cmd(&file, &model, term.as_deref(), &mut out),
        Cmd::Gen { what } => gen(what, &mut out),
        Cmd::Axioms(args) => axioms(args, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    panic::set_hook(Box::new(|info| eprintln!("internal error: {info}")));
    match panic::catch_unwind(|| run(cli)) {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(Exit(code, msg))) => {
            eprintln!("heapsmt: {msg}");
            ExitCode::from(code)
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
