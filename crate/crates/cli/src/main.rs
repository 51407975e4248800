//! `vsc`: batch front end for the value substitution calculus toolkit.
//!
//! Exit codes: 0 success, 1 domain negative (fuel exhausted, unsolvable,
//! invalid derivation), 2 usage or parse error, 3 invariant violation.

use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vsc_core::counterexamples::{read_any_derivation, reproduce_counterexamples, Bounds, System};
use vsc_core::props::{run_all, PropsConfig};
use vsc_core::quantitative::{derive_open, derive_solving, BoundReport, DeriveError};
use vsc_core::reduction::{default_fuel, evaluate, evaluate_plotkin, EvalStatus};
use vsc_core::solvability::{is_solvable, SolvabilityStatus};
use vsc_core::syntax::write_derivation;
use vsc_core::{classify, parse_term, ContextClass, Term};

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const USAGE: u8 = 2;
const VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "vsc",
    version,
    about = "Value substitution calculus: evaluation, typing and bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Open,
    Solving,
    Full,
    Plotkin,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureStrategy {
    Open,
    Solving,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Tight derivation from open evaluation.
    Tight,
    /// Precisely solvable derivation from solving evaluation.
    Precise,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Main,
    Pr,
    Kmr,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a term and print it canonically.
    Parse {
        /// File to read, or `-` for stdin.
        file: String,
    },
    /// Evaluate a term with a strategy.
    Eval {
        #[arg(long, value_enum, default_value = "open")]
        strategy: Strategy,
        #[arg(long)]
        fuel: Option<usize>,
        #[arg(long)]
        trace: bool,
        /// Term, or `@path` to read it from a file.
        term: String,
    },
    /// Print the normal-form classification flags.
    Classify { term: String },
    /// Build the canonical derivation and print its bound report.
    Type {
        #[arg(long, value_enum, default_value = "tight")]
        mode: Mode,
        #[arg(long)]
        fuel: Option<usize>,
        /// Where to write the derivation document.
        #[arg(long, default_value = "derivation.vscd")]
        out: PathBuf,
        term: String,
    },
    /// Check a derivation document.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        system: Option<SystemArg>,
    },
    /// Check the exact bound for a term.
    Measure {
        #[arg(long, value_enum, default_value = "open")]
        strategy: MeasureStrategy,
        #[arg(long)]
        fuel: Option<usize>,
        term: String,
    },
    /// Operational solvability test.
    Solvable {
        #[arg(long)]
        fuel: Option<usize>,
        term: String,
    },
    /// Run the enumerated property suites.
    Props {
        #[arg(long, default_value_t = 7)]
        max_nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Constructor bound for the derivation-enumerating suites.
        #[arg(long, default_value_t = 5)]
        derivation_nodes: usize,
        #[arg(long, default_value_t = 300)]
        samples: usize,
    },
    /// Reproduce the failures of two neighbouring type systems.
    Counterexamples,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: USAGE,
        message: message.into(),
    }
}

fn read_source(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))
}

/// Inline term text, or the contents of `path` for `@path`.
fn term_arg(arg: &str) -> Result<Term, Failure> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read_source(path)?,
        None => arg.to_string(),
    };
    parse_term(text.trim()).map_err(|e| usage(format!("parse error: {e}")))
}

fn strategy_label(s: Strategy) -> &'static str {
    match s {
        Strategy::Open => "open",
        Strategy::Solving => "solving",
        Strategy::Full => "full",
        Strategy::Plotkin => "plotkin",
    }
}

fn status_code(s: EvalStatus) -> u8 {
    match s {
        EvalStatus::Normal => OK,
        EvalStatus::FuelExhausted => NEGATIVE,
    }
}

fn status_label(s: EvalStatus) -> &'static str {
    match s {
        EvalStatus::Normal => "normal",
        EvalStatus::FuelExhausted => "fuel-exhausted",
    }
}

fn derive(t: &Term, solving: bool, fuel: usize) -> Result<BoundReport, Failure> {
    let r = if solving {
        derive_solving(t, fuel)
    } else {
        derive_open(t, fuel)
    };
    r.map_err(|e| match e {
        DeriveError::FuelExhausted { .. } => Failure {
            code: NEGATIVE,
            message: e.to_string(),
        },
        other => Failure {
            code: VIOLATION,
            message: other.to_string(),
        },
    })
}

fn run(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Parse { file } => {
            let src = read_source(&file)?;
            let t = parse_term(src.trim()).map_err(|e| usage(format!("parse error: {e}")))?;
            println!("{t}");
            Ok(OK)
        }
        Command::Eval {
            strategy,
            fuel,
            trace,
            term,
        } => {
            let t = term_arg(&term)?;
            let fuel = fuel.unwrap_or_else(default_fuel);
            let cls = match strategy {
                Strategy::Open => ContextClass::Open,
                Strategy::Solving => ContextClass::Solving,
                Strategy::Full => ContextClass::Full,
                Strategy::Plotkin => {
                    let (steps, status) = evaluate_plotkin(&t, fuel);
                    if trace {
                        for (k, u) in steps.iter().enumerate() {
                            println!("{}: beta -> {u}", k + 1);
                        }
                    }
                    let last = steps.last().unwrap_or(&t);
                    println!("{last}");
                    println!("beta={} status={}", steps.len(), status_label(status));
                    return Ok(status_code(status));
                }
            };
            let tr = evaluate(&t, cls, fuel);
            if trace {
                for (k, s) in tr.steps.iter().enumerate() {
                    println!("{}: {} -> {}", k + 1, s.position, s.result);
                }
            }
            println!("{}", tr.final_term());
            println!(
                "m={} e={} status={} strategy={}",
                tr.m_count,
                tr.e_count,
                status_label(tr.status),
                strategy_label(strategy)
            );
            Ok(status_code(tr.status))
        }
        Command::Classify { term } => {
            let t = term_arg(&term)?;
            for (name, v) in classify(&t).flags() {
                println!("{name}={v}");
            }
            Ok(OK)
        }
        Command::Type {
            mode,
            fuel,
            out,
            term,
        } => {
            let t = term_arg(&term)?;
            let r = derive(
                &t,
                matches!(mode, Mode::Precise),
                fuel.unwrap_or_else(default_fuel),
            )?;
            fs::write(&out, write_derivation(&r.derivation) + "\n")
                .map_err(|e| usage(format!("{}: {e}", out.display())))?;
            println!("{}", BoundReport::HEADER);
            println!("{}", r.row());
            Ok(if r.exact { OK } else { VIOLATION })
        }
        Command::Check { file, system } => {
            let src = read_source(&file.to_string_lossy())?;
            let system = system.map(|s| match s {
                SystemArg::Main => System::Main,
                SystemArg::Pr => System::Pr,
                SystemArg::Kmr => System::Kmr,
            });
            let d = read_any_derivation(&src, system)
                .map_err(|e| usage(format!("{}: {e}", file.display())))?;
            match d.check() {
                Ok(()) => {
                    println!("ok ({}): {}", d.system().tag(), d.judgment());
                    Ok(OK)
                }
                Err(vs) => {
                    for v in vs {
                        println!("violation {v}");
                    }
                    Ok(NEGATIVE)
                }
            }
        }
        Command::Measure {
            strategy,
            fuel,
            term,
        } => {
            let t = term_arg(&term)?;
            let solving = matches!(strategy, MeasureStrategy::Solving);
            let r = derive(&t, solving, fuel.unwrap_or_else(default_fuel))?;
            println!("{}", r.equation());
            Ok(if r.exact { OK } else { VIOLATION })
        }
        Command::Solvable { fuel, term } => {
            let t = term_arg(&term)?;
            let v = is_solvable(&t, fuel.unwrap_or_else(default_fuel));
            println!("{}", v.status);
            if let Some(w) = &v.witness {
                println!("{}", w.equation());
            }
            if let Some(note) = &v.note {
                println!("note: {note}");
            }
            Ok(match v.status {
                SolvabilityStatus::Solvable => OK,
                SolvabilityStatus::UnsolvableWithinFuel => NEGATIVE,
                SolvabilityStatus::Unknown => VIOLATION,
            })
        }
        Command::Props {
            max_nodes,
            seed,
            derivation_nodes,
            samples,
        } => {
            let cfg = PropsConfig {
                max_nodes,
                seed,
                derivation_nodes,
                samples,
                ..PropsConfig::default()
            };
            println!("seed={seed} max_nodes={max_nodes} derivation_nodes={derivation_nodes} samples={samples}");
            let results = run_all(&cfg);
            let (mut pass, mut fail) = (0, 0);
            for r in &results {
                println!("{r}");
                pass += r.passed();
                fail += r.failed;
            }
            println!("total pass={pass} fail={fail}");
            Ok(if fail == 0 { OK } else { VIOLATION })
        }
        Command::Counterexamples => {
            let r = reproduce_counterexamples(Bounds::default());
            print!("{r}");
            Ok(if r.all_ok() { OK } else { VIOLATION })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
