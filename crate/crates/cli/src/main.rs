//! Command-line surface for the Skolemization pipeline: batch queries
//! over formula files, with text or JSON output.
//!
//! Exit codes: 0 for success (including a FALSE verdict or an empty
//! search), 1 when `check` finds failures, 2 for usage and input
//! errors. Set `SKOLEM_FORGE_LOG=debug` (or `info`, `error`) to see
//! what the decision procedures are doing on stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use skolem_forge::demos::{dioph_search, parse_pcp, parse_poly, pcp_search, DiophOutcome};
use skolem_forge::logic::DomainElement;
use skolem_forge::skolemize::{to_skolem_normal_form, SkolemDecl};
use skolem_forge::syntax::{parse_rational, parse_structure, SourceText};
use skolem_forge::theories::{qe_for, theory_by_name, Theory};
use skolem_forge::{
    parse_formula, print_formula, skolemize, synthesize, to_prenex, Formula, SkolemEvaluator,
};

#[derive(Parser)]
#[command(
    name = "skolem-forge",
    version,
    about = "Skolemize first-order formulas and run their Skolem functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct TheoryArgs {
    /// Theory name: finite, dlo, presburger, or lra.
    #[arg(long)]
    theory: String,
    /// Structure file, required by the finite theory.
    #[arg(long)]
    structure: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Skolemize a formula: print the universal prefix, the rewritten
    /// matrix, and the introduced declarations.
    Skolemize {
        /// Formula file (s-expression).
        #[arg(long)]
        input: PathBuf,
        /// Convert the matrix to conjunctive normal form.
        #[arg(long)]
        cnf: bool,
    },
    /// Decide a sentence: print TRUE or FALSE.
    Decide {
        #[command(flatten)]
        theory: TheoryArgs,
        /// Formula file (s-expression).
        #[arg(long)]
        input: PathBuf,
    },
    /// Eliminate quantifiers and print the equivalent quantifier-free
    /// formula.
    Qe {
        #[command(flatten)]
        theory: TheoryArgs,
        /// Formula file (s-expression).
        #[arg(long)]
        input: PathBuf,
        /// Also print one line per elimination step.
        #[arg(long)]
        trace: bool,
    },
    /// List the Skolem functions of a formula.
    Synth {
        #[command(flatten)]
        theory: TheoryArgs,
        /// Formula file (s-expression).
        #[arg(long)]
        input: PathBuf,
    },
    /// Evaluate one Skolem function at one argument tuple.
    Eval {
        #[command(flatten)]
        theory: TheoryArgs,
        /// Formula file (s-expression).
        #[arg(long)]
        input: PathBuf,
        /// Name of the Skolem function, e.g. F_y.
        #[arg(long = "fn")]
        function: String,
        /// Comma-separated argument values, e.g. "0,1" or "-3,1/2".
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        args: String,
    },
    /// Sample the substitution guarantee and report disagreements.
    Check {
        #[command(flatten)]
        theory: TheoryArgs,
        /// Formula file (s-expression).
        #[arg(long)]
        input: PathBuf,
        /// Number of sampled valuations (infinite domains only; finite
        /// domains are checked exhaustively).
        #[arg(long, default_value_t = 200)]
        budget: usize,
        /// Corrupt the evaluator on purpose, to prove the checker
        /// notices. Debug builds only.
        #[arg(long, hide = true)]
        sabotage: bool,
    },
    /// Search for the shortest binary string the tiles can spell.
    Pcp {
        /// Tile file: one alpha,beta pair per line.
        #[arg(long)]
        input: PathBuf,
        /// Longest target string to try.
        #[arg(long = "max-len", default_value_t = 12)]
        max_len: usize,
    },
    /// Search for a root of an integer polynomial at a fixed parameter.
    Dioph {
        /// Polynomial file: one "coeff e_x e_1 … e_k" monomial per line.
        #[arg(long)]
        input: PathBuf,
        /// Parameter value x.
        #[arg(long, allow_hyphen_values = true)]
        args: String,
        /// Number of unknown tuples to try.
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
}

/// Any error that should abort with exit code 2.
struct CliError(String);

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

#[derive(Serialize)]
struct JsonDecl {
    name: String,
    deps: Vec<String>,
}

#[derive(Serialize)]
struct JsonReport {
    checked: usize,
    failures: usize,
}

/// The one JSON shape every command emits.
#[derive(Serialize)]
struct Output {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    theory: Option<String>,
    result: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    decls: Option<Vec<JsonDecl>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<JsonReport>,
}

impl Output {
    fn new(command: &'static str, result: impl Into<String>) -> Self {
        Output {
            command,
            theory: None,
            result: result.into(),
            decls: None,
            report: None,
        }
    }

    fn theory(mut self, name: &str) -> Self {
        self.theory = Some(name.to_string());
        self
    }

    fn decls(mut self, decls: &[SkolemDecl]) -> Self {
        self.decls = Some(
            decls
                .iter()
                .map(|d| JsonDecl {
                    name: d.symbol.name.clone(),
                    deps: d.deps.iter().map(|v| v.name.clone()).collect(),
                })
                .collect(),
        );
        self
    }
}

/// Print either the text lines or the JSON object.
fn emit(format: Format, lines: &[String], json: &Output) {
    match format {
        Format::Text => {
            for line in lines {
                println!("{line}");
            }
        }
        Format::Json => {
            println!("{}", serde_json::to_string(json).expect("serializable"));
        }
    }
}

fn load_source(path: &Path) -> Result<SourceText, CliError> {
    let content =
        fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    Ok(SourceText::new(content, path.display().to_string()))
}

fn load_formula(path: &Path) -> Result<Formula, CliError> {
    Ok(parse_formula(&load_source(path)?)?)
}

fn load_theory(args: &TheoryArgs) -> Result<Arc<dyn Theory>, CliError> {
    let structure = match &args.structure {
        Some(path) => Some(parse_structure(&load_source(path)?)?),
        None => None,
    };
    Ok(Arc::from(theory_by_name(&args.theory, structure)?))
}

fn load_evaluator(args: &TheoryArgs, input: &Path) -> Result<SkolemEvaluator, CliError> {
    Ok(synthesize(load_theory(args)?, &load_formula(input)?)?)
}

/// `F_v(x,u)` for functions, `C_y` for constants.
fn decl_signature(d: &SkolemDecl) -> String {
    if d.is_constant() {
        d.symbol.name.clone()
    } else {
        let deps: Vec<&str> = d.deps.iter().map(|v| v.name.as_str()).collect();
        format!("{}({})", d.symbol.name, deps.join(","))
    }
}

fn parse_domain_element(theory: &str, raw: &str) -> Result<DomainElement, CliError> {
    match theory {
        "presburger" => raw
            .parse::<u64>()
            .map(DomainElement::nat)
            .map_err(|_| CliError(format!("`{raw}` is not a natural number"))),
        "dlo" | "lra" => parse_rational(raw)
            .map(DomainElement::Rat)
            .map_err(|e| CliError(format!("`{raw}`: {e}"))),
        "finite" => {
            let digits = raw.strip_prefix('#').unwrap_or(raw);
            digits
                .parse::<usize>()
                .map(DomainElement::Fin)
                .map_err(|_| CliError(format!("`{raw}` is not an element index")))
        }
        other => Err(CliError(format!("unknown theory `{other}`"))),
    }
}

fn parse_domain_args(theory: &str, text: &str) -> Result<Vec<DomainElement>, CliError> {
    if text.trim().is_empty() {
        return Ok(vec![]);
    }
    text.split(',')
        .map(|raw| parse_domain_element(theory, raw.trim()))
        .collect()
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let format = cli.format;
    match cli.command {
        Command::Skolemize { input, cnf } => {
            let f = load_formula(&input)?;
            let mut system = skolemize(&to_prenex(&f));
            if cnf {
                system = to_skolem_normal_form(&system);
            }
            let mut lines = vec![];
            let prefix = if system.skolemized.prefix.is_empty() {
                "(none)".to_string()
            } else {
                system
                    .skolemized
                    .prefix
                    .iter()
                    .map(|(q, v)| format!("{q} {v}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            lines.push(format!("prefix: {prefix}"));
            lines.push(format!(
                "matrix: {}",
                print_formula(&system.skolemized.matrix)
            ));
            if system.decls.is_empty() {
                lines.push("decls: (none)".to_string());
            } else {
                lines.push("decls:".to_string());
                for d in &system.decls {
                    lines.push(format!("  {}  replaces {}", decl_signature(d), d.target_var));
                }
            }
            let json = Output::new(
                "skolemize",
                print_formula(&system.skolemized.to_formula()),
            )
            .decls(&system.decls);
            emit(format, &lines, &json);
            Ok(0)
        }
        Command::Decide { theory, input } => {
            let th = load_theory(&theory)?;
            let verdict = th.decide(&load_formula(&input)?)?;
            let text = if verdict { "TRUE" } else { "FALSE" };
            emit(
                format,
                &[text.to_string()],
                &Output::new("decide", text).theory(&theory.theory),
            );
            Ok(0)
        }
        Command::Qe {
            theory,
            input,
            trace,
        } => {
            let t = qe_for(&theory.theory, &load_formula(&input)?)?;
            let mut lines = vec![];
            if trace {
                for step in &t.steps {
                    lines.push(format!("step: {step}"));
                }
            }
            let result = print_formula(&t.output);
            lines.push(result.clone());
            emit(
                format,
                &lines,
                &Output::new("qe", result).theory(&theory.theory),
            );
            Ok(0)
        }
        Command::Synth { theory, input } => {
            let evaluator = load_evaluator(&theory, &input)?;
            let decls = evaluator.decls();
            let mut lines = vec![];
            let result = if decls.is_empty() {
                lines.push("no Skolem functions".to_string());
                "no Skolem functions".to_string()
            } else {
                for d in decls {
                    lines.push(format!(
                        "{}  [computable by decide-then-enumerate]",
                        decl_signature(d)
                    ));
                }
                "computable by decide-then-enumerate".to_string()
            };
            let json = Output::new("synth", result)
                .theory(&theory.theory)
                .decls(decls);
            emit(format, &lines, &json);
            Ok(0)
        }
        Command::Eval {
            theory,
            input,
            function,
            args,
        } => {
            let evaluator = load_evaluator(&theory, &input)?;
            let values = parse_domain_args(&theory.theory, &args)?;
            let outcome = evaluator.eval_detailed(&function, &values)?;
            if !outcome.witnessed {
                eprintln!("warning: no witness exists; default element returned");
            }
            let text = outcome.value.to_string();
            emit(
                format,
                &[text.clone()],
                &Output::new("eval", text).theory(&theory.theory),
            );
            Ok(0)
        }
        Command::Check {
            theory,
            input,
            budget,
            sabotage,
        } => {
            if budget == 0 {
                return Err(CliError("budget must be at least 1".to_string()));
            }
            #[allow(unused_mut)]
            let mut evaluator = load_evaluator(&theory, &input)?;
            if sabotage {
                #[cfg(debug_assertions)]
                evaluator.set_sabotage(true);
                #[cfg(not(debug_assertions))]
                return Err(CliError(
                    "--sabotage is only available in debug builds".to_string(),
                ));
            }
            let report = evaluator.check_equiv(budget)?;
            let failures = report.failures.len();
            let mut lines = vec![if report.exhaustive {
                format!(
                    "exhaustive, {failures} failures ({} checked)",
                    report.samples_checked
                )
            } else {
                format!("{} checked, {failures} failures", report.samples_checked)
            }];
            for failure in &report.failures {
                let bindings: Vec<String> = failure
                    .valuation
                    .iter()
                    .map(|(v, e)| format!("{v}={e}"))
                    .collect();
                lines.push(format!(
                    "  at {}: existential {}, substituted {}",
                    bindings.join(", "),
                    failure.lhs,
                    failure.rhs
                ));
            }
            let json = Output::new("check", if failures == 0 { "pass" } else { "fail" })
                .theory(&theory.theory);
            let json = Output {
                report: Some(JsonReport {
                    checked: report.samples_checked,
                    failures,
                }),
                ..json
            };
            emit(format, &lines, &json);
            Ok(if failures == 0 { 0 } else { 1 })
        }
        Command::Pcp { input, max_len } => {
            let instance = parse_pcp(&load_source(&input)?.content)?;
            let text = match pcp_search(&instance, max_len) {
                Some((u, witness)) => {
                    let indices: Vec<String> = witness.iter().map(|i| i.to_string()).collect();
                    format!("{u} [{}]", indices.join(","))
                }
                None => "none within bound".to_string(),
            };
            emit(format, &[text.clone()], &Output::new("pcp", text));
            Ok(0)
        }
        Command::Dioph { input, args, fuel } => {
            if fuel == 0 {
                return Err(CliError("fuel must be at least 1".to_string()));
            }
            let x: u64 = args
                .trim()
                .parse()
                .map_err(|_| CliError(format!("`{args}` is not a natural number")))?;
            let poly = parse_poly(&load_source(&input)?.content)?;
            let text = match dioph_search(&poly, x, fuel) {
                DiophOutcome::Found(ys) if ys.len() == 1 => format!("FOUND y={}", ys[0]),
                DiophOutcome::Found(ys) => {
                    let parts: Vec<String> = ys
                        .iter()
                        .enumerate()
                        .map(|(i, y)| format!("y{}={y}", i + 1))
                        .collect();
                    format!("FOUND {}", parts.join(" "))
                }
                DiophOutcome::Unknown => "UNKNOWN (fuel exhausted)".to_string(),
            };
            emit(format, &[text.clone()], &Output::new("dioph", text));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::new().filter("SKOLEM_FORGE_LOG")).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
