use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dratkit::checkers::{check_drat, check_er, check_lrat, CheckMode, CheckReport, Verdict};
use dratkit::formats::{
    parse_dimacs, parse_drat, parse_er, parse_lrat, write_dimacs, write_drat_binary, write_drat_text,
    write_er, write_lrat, DratEncoding, ProofStep,
};
use dratkit::pipeline::{backward_check, emit_lrat, emit_trimmed, to_er, CheckedProof};
use dratkit::testkit::{cdcl_solve, gen_php, gen_random, SolveStatus};
use dratkit::{Error, Formula, PivotPolicy};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "dratkit", version, about = "Check, trim and translate DRAT, LRAT and ER proofs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a proof against a CNF
    #[command(subcommand)]
    Check(CheckCommand),
    /// Trim a DRAT proof and emit LRAT, trimmed DRAT and the core CNF
    Trim(TrimArgs),
    /// Translate a DRAT proof to extended resolution
    ToEr(ToErArgs),
    /// Solve a CNF with the built-in CDCL solver
    Solve(SolveArgs),
    /// Generate benchmark formulas
    #[command(subcommand)]
    Gen(GenCommand),
    /// Check many proofs in parallel; each list line is `drat|lrat|er <cnf> <proof>`
    Batch(BatchArgs),
}

#[derive(Subcommand)]
enum CheckCommand {
    Drat(DratCheckArgs),
    Lrat(PlainCheckArgs),
    Er(PlainCheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Specified,
    Operational,
}

#[derive(Args)]
struct ModeOptions {
    /// Deletion semantics
    #[arg(long, value_enum, default_value = "operational")]
    mode: ModeArg,
    /// Pivot search for RAT steps; defaults to all literals in specified mode and
    /// the first literal in operational mode
    #[arg(long, value_enum)]
    pivot: Option<PivotArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PivotArg {
    First,
    Any,
}

impl ModeOptions {
    fn mode(&self) -> CheckMode {
        let mut mode = match self.mode {
            ModeArg::Specified => CheckMode::specified(),
            ModeArg::Operational => CheckMode::operational(),
        };
        match self.pivot {
            Some(PivotArg::First) => mode.pivot_policy = PivotPolicy::FirstLiteral,
            Some(PivotArg::Any) => mode.pivot_policy = PivotPolicy::Any,
            None => {}
        }
        mode
    }
}

#[derive(Args)]
struct EncodingOptions {
    /// Read the DRAT proof as binary
    #[arg(long, conflicts_with = "text")]
    binary: bool,
    /// Read the DRAT proof as text
    #[arg(long)]
    text: bool,
}

impl EncodingOptions {
    fn encoding(&self) -> Option<DratEncoding> {
        match (self.binary, self.text) {
            (true, _) => Some(DratEncoding::Binary),
            (_, true) => Some(DratEncoding::Text),
            _ => None,
        }
    }
}

#[derive(Args)]
struct DratCheckArgs {
    cnf: PathBuf,
    proof: PathBuf,
    #[command(flatten)]
    mode: ModeOptions,
    #[command(flatten)]
    encoding: EncodingOptions,
    /// Print counters as `c <name> <value>` lines
    #[arg(long)]
    counters: bool,
}

#[derive(Args)]
struct PlainCheckArgs {
    cnf: PathBuf,
    proof: PathBuf,
    #[arg(long)]
    counters: bool,
}

#[derive(Args)]
struct TrimArgs {
    cnf: PathBuf,
    drat: PathBuf,
    #[command(flatten)]
    encoding: EncodingOptions,
    #[command(flatten)]
    mode: ModeOptions,
    #[arg(long)]
    out_lrat: PathBuf,
    #[arg(long)]
    out_drat: Option<PathBuf>,
    /// Write the trimmed DRAT proof in binary
    #[arg(long, requires = "out_drat")]
    binary_out: bool,
    #[arg(long)]
    out_core: Option<PathBuf>,
}

#[derive(Args)]
struct ToErArgs {
    cnf: PathBuf,
    drat: PathBuf,
    #[command(flatten)]
    encoding: EncodingOptions,
    #[command(flatten)]
    mode: ModeOptions,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    cnf: PathBuf,
    /// Write the DRAT proof here when the formula is unsatisfiable
    #[arg(long)]
    proof: Option<PathBuf>,
    /// Write the proof in binary
    #[arg(long, requires = "proof")]
    binary: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Pigeonhole formula with n holes and n + 1 pigeons
    Php {
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random k-CNF
    Random {
        #[arg(long)]
        vars: u32,
        #[arg(long)]
        clauses: usize,
        #[arg(long)]
        width: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BatchArgs {
    list: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    mode: ModeOptions,
}

/// Result of a command that ran to completion.
enum Outcome {
    Success,
    Rejected,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => write(path, bytes),
        None => Ok(io::stdout().write_all(bytes)?),
    }
}

fn load_cnf(path: &Path) -> Result<Formula> {
    let bytes = read(path)?;
    Ok(parse_dimacs(&bytes)
        .with_context(|| format!("invalid CNF {}", path.display()))?
        .formula)
}

fn load_drat(path: &Path, encoding: Option<DratEncoding>) -> Result<Vec<ProofStep>> {
    let bytes = read(path)?;
    parse_drat(&bytes, encoding).with_context(|| format!("invalid DRAT proof {}", path.display()))
}

fn report(report: &CheckReport, counters: bool) -> Outcome {
    if let Verdict::Rejected { step, reason } = report.verdict {
        eprintln!("rejected at step {}: {}", step, reason);
    }
    println!("s {}", if report.is_verified() { "VERIFIED" } else { "NOT VERIFIED" });
    if counters {
        for (name, value) in report.counters() {
            println!("c {} {}", name, value);
        }
    }
    if report.is_verified() {
        Outcome::Success
    } else {
        Outcome::Rejected
    }
}

/// Runs the backward check, printing the rejection when the proof is invalid.
fn checked(formula: &Formula, proof: &[ProofStep], mode: CheckMode) -> Result<Option<CheckedProof>> {
    match backward_check(formula, proof, mode) {
        Ok(cp) => Ok(Some(cp)),
        Err(Error::ForwardRejected { step, reason }) => {
            eprintln!("rejected at step {}: {}", step, reason);
            println!("s NOT VERIFIED");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn check(command: CheckCommand) -> Result<Outcome> {
    Ok(match command {
        CheckCommand::Drat(args) => {
            let formula = load_cnf(&args.cnf)?;
            let proof = load_drat(&args.proof, args.encoding.encoding())?;
            report(&check_drat(&formula, &proof, args.mode.mode()), args.counters)
        }
        CheckCommand::Lrat(args) => {
            let formula = load_cnf(&args.cnf)?;
            let proof = parse_lrat(&read(&args.proof)?)
                .with_context(|| format!("invalid LRAT proof {}", args.proof.display()))?;
            report(&check_lrat(&formula, &proof), args.counters)
        }
        CheckCommand::Er(args) => {
            let formula = load_cnf(&args.cnf)?;
            let proof = parse_er(&read(&args.proof)?)
                .with_context(|| format!("invalid ER proof {}", args.proof.display()))?;
            report(&check_er(&formula, &proof), args.counters)
        }
    })
}

fn trim(args: TrimArgs) -> Result<Outcome> {
    let formula = load_cnf(&args.cnf)?;
    let proof = load_drat(&args.drat, args.encoding.encoding())?;
    let Some(cp) = checked(&formula, &proof, args.mode.mode())? else {
        return Ok(Outcome::Rejected);
    };
    let lrat = emit_lrat(&cp);
    let (trimmed, core) = emit_trimmed(&cp);
    write(&args.out_lrat, &write_lrat(&lrat))?;
    if let Some(path) = &args.out_drat {
        let bytes = if args.binary_out {
            write_drat_binary(&trimmed)
        } else {
            write_drat_text(&trimmed)
        };
        write(path, &bytes)?;
    }
    if let Some(path) = &args.out_core {
        write(path, &write_dimacs(&core))?;
    }
    println!("s VERIFIED");
    println!("c core_clauses {}", core.len());
    println!("c core_additions {}", cp.core_additions());
    println!("c lrat_steps {}", lrat.len());
    Ok(Outcome::Success)
}

fn translate(args: ToErArgs) -> Result<Outcome> {
    let formula = load_cnf(&args.cnf)?;
    let proof = load_drat(&args.drat, args.encoding.encoding())?;
    let Some(cp) = checked(&formula, &proof, args.mode.mode())? else {
        return Ok(Outcome::Rejected);
    };
    let er = to_er(&cp)?;
    if !check_er(&formula, &er).is_verified() {
        bail!("translated proof failed its own check");
    }
    write(&args.out, &write_er(&er))?;
    println!("s VERIFIED");
    println!("c er_steps {}", er.len());
    Ok(Outcome::Success)
}

fn solve(args: SolveArgs) -> Result<Outcome> {
    let formula = load_cnf(&args.cnf)?;
    let result = cdcl_solve(&formula, args.seed);
    match result.status {
        SolveStatus::Sat(model) => {
            println!("s SATISFIABLE");
            let values: Vec<String> = model.iter().map(|l| l.to_dimacs().to_string()).collect();
            println!("v {} 0", values.join(" "));
        }
        SolveStatus::Unsat(proof) => {
            println!("s UNSATISFIABLE");
            if let Some(path) = &args.proof {
                let bytes = if args.binary {
                    write_drat_binary(&proof)
                } else {
                    write_drat_text(&proof)
                };
                write(path, &bytes)?;
            }
        }
    }
    println!("c conflicts {}", result.stats.conflicts);
    println!("c decisions {}", result.stats.decisions);
    println!("c propagations {}", result.stats.propagations);
    Ok(Outcome::Success)
}

fn generate(command: GenCommand) -> Result<Outcome> {
    let (formula, out) = match command {
        GenCommand::Php { n, out } => {
            if n == 0 {
                bail!("php needs at least one hole");
            }
            (gen_php(n), out)
        }
        GenCommand::Random {
            vars,
            clauses,
            width,
            seed,
            out,
        } => {
            if width == 0 || width > vars as usize {
                bail!("width must be between 1 and the number of variables");
            }
            (gen_random(vars, clauses, width, seed), out)
        }
    };
    emit(out.as_deref(), &write_dimacs(&formula))?;
    Ok(Outcome::Success)
}

fn check_entry(kind: &str, cnf: &Path, proof: &Path, mode: CheckMode) -> Result<bool> {
    let formula = load_cnf(cnf)?;
    let report = match kind {
        "drat" => check_drat(&formula, &load_drat(proof, None)?, mode),
        "lrat" => check_lrat(&formula, &parse_lrat(&read(proof)?)?),
        "er" => check_er(&formula, &parse_er(&read(proof)?)?),
        other => bail!("unknown proof kind {other:?}"),
    };
    Ok(report.is_verified())
}

fn batch(args: BatchArgs) -> Result<Outcome> {
    let list = String::from_utf8(read(&args.list)?).context("batch list is not UTF-8")?;
    let base = args.list.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    for (number, line) in list.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[..] {
            [] => {}
            [kind, cnf, proof] => entries.push((kind.to_string(), base.join(cnf), base.join(proof))),
            _ => bail!("line {}: expected `<kind> <cnf> <proof>`", number + 1),
        }
    }
    let mode = args.mode.mode();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs.max(1)).build()?;
    let results: Vec<Result<bool>> = pool.install(|| {
        entries
            .par_iter()
            .map(|(kind, cnf, proof)| check_entry(kind, cnf, proof, mode))
            .collect()
    });
    let mut all_verified = true;
    let mut errors = false;
    for ((_, _, proof), result) in entries.iter().zip(&results) {
        match result {
            Ok(true) => println!("{} VERIFIED", proof.display()),
            Ok(false) => {
                all_verified = false;
                println!("{} NOT VERIFIED", proof.display());
            }
            Err(e) => {
                errors = true;
                println!("{} ERROR {:#}", proof.display(), e);
            }
        }
    }
    if errors {
        bail!("some entries could not be checked");
    }
    Ok(if all_verified { Outcome::Success } else { Outcome::Rejected })
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Check(command) => check(command),
        Command::Trim(args) => trim(args),
        Command::ToEr(args) => translate(args),
        Command::Solve(args) => solve(args),
        Command::Gen(command) => generate(command),
        Command::Batch(args) => batch(args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}
