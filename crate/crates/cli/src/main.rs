//! `kly`: batch analysis of toric vector bundles described by JSON models.
//!
//! Exit codes: 0 computed, 1 invalid input, 2 budget exceeded, 3 internal
//! error. A report is written to stdout on 0 and 2.

mod commands;
mod model;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use sha2::{Digest, Sha256};

use commands::Command;
use klyachko::sections::DEFAULT_BUDGET;
use klyachko::Error;
use report::{nat, object, Report};

#[derive(Parser)]
#[command(name = "kly", version, about = "Exact analysis of toric vector bundles given by Klyachko filtrations")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cap on the dimension of any symmetric power; overrides KLY_BUDGET.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Input {
    /// Model file (JSON).
    model: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate the fan, the filtrations and compatibility on every maximal cone.
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Global sections of Sym^p E, by weight.
    H0 {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        sym: usize,
    },
    /// Section polytope of a fiber vector, given in monomial coordinates of Sym^p.
    Polytope {
        #[command(flatten)]
        input: Input,
        /// Comma-separated rationals, e.g. "1,-1/2".
        #[arg(long, allow_hyphen_values = true)]
        element: String,
        #[arg(long, default_value_t = 1)]
        sym: usize,
    },
    /// Dimensions of products of l sections of Sym^p E.
    ImageDims {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 6)]
        lmax: usize,
    },
    /// Lower bound for L(X,E) from symmetric powers up to pmax.
    LSpan {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        pmax: usize,
    },
    /// Weight points of the generators of Sym^p E.
    Weights {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 3)]
        pmax: usize,
    },
    /// Graded dimensions and the alpha estimator.
    Alpha {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 6)]
        lmax: usize,
        #[arg(long, default_value_t = 3)]
        pmax: usize,
    },
    /// Bigness verdict with certificates and evidence tables.
    Big {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        degree_bound: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 6)]
        lmax: usize,
        #[arg(long, default_value_t = 3)]
        pmax: usize,
    },
}

impl Cmd {
    fn split(self) -> (PathBuf, Command) {
        match self {
            Cmd::Validate { input } => (input.model, Command::Validate),
            Cmd::H0 { input, sym } => (input.model, Command::H0 { sym }),
            Cmd::Polytope { input, element, sym } => (input.model, Command::Polytope { element, sym }),
            Cmd::ImageDims { input, p, lmax } => (input.model, Command::ImageDims { p, l_max: lmax }),
            Cmd::LSpan { input, pmax } => (input.model, Command::LSpan { p_max: pmax }),
            Cmd::Weights { input, p, pmax } => (input.model, Command::Weights { p, p_max: pmax }),
            Cmd::Alpha { input, p, lmax, pmax } => (input.model, Command::Alpha { p, l_max: lmax, p_max: pmax }),
            Cmd::Big { input, degree_bound, p, lmax, pmax } => {
                (input.model, Command::Big { degree_bound, p, l_max: lmax, p_max: pmax })
            }
        }
    }
}

const INVALID: u8 = 1;
const BUDGET: u8 = 2;
const INTERNAL: u8 = 3;

fn budget_from(flag: Option<usize>) -> Result<usize, String> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("KLY_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| format!("KLY_BUDGET must be a nonnegative integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn emit(report: &Report, format: Format) {
    let text = match format {
        Format::Json => report.render_json(),
        Format::Text => report.render_text(),
    };
    print!("{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = cli.format;
    let budget = match budget_from(cli.budget) {
        Ok(b) => b,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(INVALID);
        }
    };
    let (path, command) = cli.command.split();
    let bytes = match std::fs::read(&path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(INVALID);
        }
    };
    let Ok(text) = std::str::from_utf8(&bytes) else {
        eprintln!("error: {} is not UTF-8", path.display());
        return ExitCode::from(INVALID);
    };
    let model = match model::parse_model(text) {
        Ok(m) => m,
        Err(e) => {
            for line in e.to_string().lines() {
                eprintln!("error: {line}");
            }
            return ExitCode::from(INVALID);
        }
    };

    let echo = object([
        ("name", Value::String(command.name().into())),
        ("model", Value::String(path.display().to_string())),
        ("params", command.params()),
        ("budget", nat(budget)),
    ]);
    let outcome = std::panic::catch_unwind(|| commands::run(&command, &model.bundle, budget));
    let mut report = Report { command: echo, digest: digest(&bytes), results: Value::Null, warnings: model.warnings };
    match outcome {
        Ok(Ok((results, warnings))) => {
            report.results = results;
            report.warnings.extend(warnings);
            emit(&report, format);
            ExitCode::SUCCESS
        }
        Ok(Err(Error::BudgetExceeded { needed, budget })) => {
            report.results = object([(
                "error",
                object([
                    ("kind", Value::String("budget_exceeded".into())),
                    ("needed", nat(needed)),
                    ("budget", nat(budget)),
                ]),
            )]);
            emit(&report, format);
            eprintln!("error: symmetric power dimension {needed} exceeds budget {budget}");
            ExitCode::from(BUDGET)
        }
        Ok(Err(Error::Internal(msg))) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(INTERNAL)
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(INVALID)
        }
        Err(_) => {
            eprintln!("internal error: computation panicked");
            ExitCode::from(INTERNAL)
        }
    }
}
