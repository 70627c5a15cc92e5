use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use kbmerge::forgetting::{dilate_models, forget, ForgetSet};
use kbmerge::merging::{MergeError, Operator};
use kbmerge::postulates::{self, Bounds, CellStatus, CheckReport, PostulateError, PostulateId};
use kbmerge::profile_file::{parse_profile, ProfileFileError};
use kbmerge::semantics::{self, ModelSet, SemanticsError};
use kbmerge::{parse, Formula, Vocabulary};

const OK: u8 = 0;
const VIOLATION: u8 = 1;
const PARSE_ERROR: u8 = 2;
const INVALID_INPUT: u8 = 3;
const INCONSISTENT_CONSTRAINT: u8 = 4;
const NOT_EQUIVALENT: u8 = 5;

/// Above this many variables enumeration gets slow enough to warn about.
const WARN_VARIABLES: usize = 16;

#[derive(Parser)]
#[command(name = "kbmerge", version, about = "Merge propositional knowledge bases under integrity constraints")]
struct Cli {
    /// Override the vocabulary size limit (at most 32).
    #[arg(long, global = true, value_name = "CAP")]
    max_vocab: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dnf,
    Models,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Merge the knowledge bases of a profile file.
    Merge {
        /// Profile file.
        #[arg(value_name = "FILE", required_unless_present = "input")]
        file: Option<PathBuf>,
        #[arg(short = 'f', long, value_name = "FILE", conflicts_with = "file")]
        input: Option<PathBuf>,
        #[arg(short = 'o', long, default_value = "sigma")]
        operator: Operator,
        #[arg(long, value_enum, default_value = "dnf")]
        format: Format,
    },
    /// Forget variables from a formula.
    Forget {
        /// Formula text.
        #[arg(value_name = "FORMULA", required_unless_present = "input")]
        formula: Option<String>,
        /// Read the formula from a file instead.
        #[arg(short = 'f', long, value_name = "FILE", conflicts_with = "formula")]
        input: Option<PathBuf>,
        /// Comma-separated variables to forget.
        #[arg(long, value_delimiter = ',', required = true)]
        vars: Vec<String>,
    },
    /// Dilate a formula by Hamming distance n.
    Dilate {
        #[arg(value_name = "FORMULA", required_unless_present = "input")]
        formula: Option<String>,
        #[arg(short = 'f', long, value_name = "FILE", conflicts_with = "formula")]
        input: Option<PathBuf>,
        #[arg(short = 'n', default_value_t = 1)]
        n: u32,
        /// Extra variables to include in the vocabulary.
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
    },
    /// Decide logical equivalence of two formulas.
    Equiv { left: String, right: String },
    /// Run randomized postulate checks against an operator.
    Check {
        #[arg(value_name = "OPERATOR", required_unless_present = "operator")]
        op: Option<Operator>,
        #[arg(short = 'o', long, conflicts_with = "op")]
        operator: Option<Operator>,
        /// Comma-separated postulates; all of them by default.
        #[arg(long, value_delimiter = ',')]
        postulates: Vec<PostulateId>,
        #[arg(long, default_value_t = 300)]
        trials: u64,
        #[arg(long, default_value_t = 4)]
        max_vars: usize,
        #[arg(long, default_value_t = 3)]
        max_kbs: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the JSON report with all stored violations here.
        #[arg(long, value_name = "PATH")]
        report: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<SemanticsError> for Failure {
    fn from(e: SemanticsError) -> Self {
        Failure::new(INVALID_INPUT, e.to_string())
    }
}

impl From<MergeError> for Failure {
    fn from(e: MergeError) -> Self {
        Failure::new(INVALID_INPUT, e.to_string())
    }
}

impl From<PostulateError> for Failure {
    fn from(e: PostulateError) -> Self {
        Failure::new(INVALID_INPUT, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(INVALID_INPUT, format!("{}: {e}", path.display())))
}

fn formula_arg(text: Option<String>, input: Option<PathBuf>) -> Result<Formula, Failure> {
    let text = match (text, input) {
        (Some(t), _) => t,
        (None, Some(path)) => read(&path)?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    parse(&text).map_err(|e| Failure::new(PARSE_ERROR, format!("parse error at {e}")))
}

fn warn_if_large(vocabulary: &Vocabulary) {
    if vocabulary.len() > WARN_VARIABLES {
        eprintln!(
            "warning: {} variables, enumerating 2^{} interpretations",
            vocabulary.len(),
            vocabulary.len()
        );
    }
}

fn model_line(set: &ModelSet) -> String {
    format!("{} model(s) over {}", set.len(), set.vocabulary())
}

fn print_table(set: &ModelSet) {
    let vocabulary = set.vocabulary();
    println!("{} | result", vocabulary.names().join(" "));
    for mask in 0..(1u64 << vocabulary.len()) {
        let omega = semantics::Interpretation::from_mask(vocabulary.clone(), mask);
        let row: Vec<String> = omega
            .literals()
            .into_iter()
            .map(|(name, value)| format!("{:>width$}", u8::from(value), width = name.len()))
            .collect();
        println!("{} | {}", row.join(" "), u8::from(set.contains(mask)));
    }
}

fn cmd_merge(path: &Path, op: Operator, format: Format) -> Outcome {
    let text = read(path)?;
    let profile = parse_profile(&text).map_err(|e| match e {
        ProfileFileError::Invalid(inner) => Failure::from(inner),
        other => Failure::new(PARSE_ERROR, format!("{}: {other}", path.display())),
    })?;
    warn_if_large(profile.vocabulary());
    let result = op.apply(&profile)?;
    match format {
        Format::Dnf => println!("{}", result.formula),
        Format::Models => {
            for omega in result.models.interpretations() {
                println!("{omega}");
            }
        }
        Format::Table => print_table(&result.models),
    }
    eprintln!("{}: {}", op, result.diagnostics);
    eprintln!("{}", model_line(&result.models));
    if result.degenerate {
        eprintln!("warning: the integrity constraint is inconsistent, the result is false");
        return Ok(INCONSISTENT_CONSTRAINT);
    }
    Ok(OK)
}

fn cmd_forget(phi: Formula, vars: Vec<String>) -> Outcome {
    let vars = ForgetSet::new(vars);
    let vocabulary = phi.variables().difference(&Vocabulary::new(vars.iter()));
    warn_if_large(&phi.variables());
    let forgotten = forget(&phi, &vars);
    let set = semantics::models(&forgotten, &vocabulary)?;
    println!("{}", semantics::to_dnf(&set));
    println!("{}", model_line(&set));
    Ok(OK)
}

fn cmd_dilate(phi: Formula, n: u32, extra: Vec<String>) -> Outcome {
    let vocabulary = phi.variables().union(&Vocabulary::new(extra));
    warn_if_large(&vocabulary);
    let set = dilate_models(&phi, n, &vocabulary)?;
    println!("{}", semantics::to_dnf(&set));
    println!("{}", model_line(&set));
    Ok(OK)
}

fn cmd_equiv(left: &str, right: &str) -> Outcome {
    let parse_one = |text: &str| parse(text).map_err(|e| Failure::new(PARSE_ERROR, format!("parse error at {e}")));
    let (a, b) = (parse_one(left)?, parse_one(right)?);
    match semantics::distinguishing_model(&a, &b)? {
        None => {
            println!("equivalent");
            Ok(OK)
        }
        Some(omega) => {
            println!("not equivalent");
            println!("distinguishing model: {omega}");
            Ok(NOT_EQUIVALENT)
        }
    }
}

fn cmd_check(op: Operator, list: Vec<PostulateId>, trials: u64, bounds: Bounds, report: Option<PathBuf>) -> Outcome {
    bounds.validate()?;
    let list = if list.is_empty() {
        PostulateId::ALL.to_vec()
    } else {
        list
    };
    println!(
        "operator {op}, {trials} trials, max-vars {}, max-kbs {}, seed {}",
        bounds.max_vars, bounds.max_kbs, bounds.seed
    );
    let mut reports: Vec<CheckReport> = Vec::new();
    let mut failed = false;
    for postulate in list {
        let r = postulates::check_randomized(postulate, op, trials, &bounds)?;
        let claim = postulates::claim(op, postulate);
        let status = CellStatus::of(claim, &r);
        failed |= status.is_failure(op, postulate);
        println!(
            "{:<4} {:<12} violations {:>5}/{:<5} applicable {:>5}  {}",
            postulate.name(),
            r.verdict.to_string(),
            r.violation_count,
            r.trials,
            r.applicable,
            status
        );
        if let Some(v) = r.violations.first() {
            println!("     witness (trial {}):", v.trial);
            for (i, text) in v.instance.profiles.iter().enumerate() {
                for line in text.lines() {
                    println!("       [{}] {line}", i + 1);
                }
            }
            if let Some(mu2) = &v.instance.second_constraint {
                println!("       second constraint: {mu2}");
            }
            if let Some(l) = &v.instance.literal {
                println!("       literal: {l}, positions {:?}", v.instance.subgroup);
            }
            println!("       left:  [{}]", v.left.join("; "));
            println!("       right: [{}]", v.right.join("; "));
        }
        reports.push(r);
    }
    if let Some(path) = report {
        let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
        fs::write(&path, json + "\n")
            .map_err(|e| Failure::new(INVALID_INPUT, format!("{}: {e}", path.display())))?;
    }
    Ok(if failed { VIOLATION } else { OK })
}

fn run(cli: Cli) -> Outcome {
    if let Some(cap) = cli.max_vocab {
        if cap == 0 || cap > semantics::HARD_VOCABULARY_LIMIT {
            return Err(Failure::new(
                INVALID_INPUT,
                format!("--max-vocab must be between 1 and {}", semantics::HARD_VOCABULARY_LIMIT),
            ));
        }
        semantics::set_vocabulary_cap(cap);
    }
    match cli.command {
        Command::Merge {
            file,
            input,
            operator,
            format,
        } => cmd_merge(&file.or(input).expect("clap requires a file"), operator, format),
        Command::Forget { formula, input, vars } => cmd_forget(formula_arg(formula, input)?, vars),
        Command::Dilate {
            formula,
            input,
            n,
            vars,
        } => cmd_dilate(formula_arg(formula, input)?, n, vars),
        Command::Equiv { left, right } => cmd_equiv(&left, &right),
        Command::Check {
            op,
            operator,
            postulates,
            trials,
            max_vars,
            max_kbs,
            seed,
            report,
        } => {
            let bounds = Bounds {
                max_vars,
                max_kbs,
                seed,
            };
            cmd_check(op.or(operator).expect("clap requires an operator"), postulates, trials, bounds, report)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
