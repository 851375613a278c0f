mod commands;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phin_core::gamma_quotient::Clause;
use phin_core::spectral::SteenbrinkDatum;
use phin_core::{AdmissibilityOptions, Error, ErrorKind};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use commands::Outcome;

#[derive(Parser)]
#[command(name = "phin", version, about = "Exact (phi,N)-module, spectral sequence and building computations")]
struct Cli {
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    /// Seed for the sampled admissibility fallback.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Enumeration guard: candidate subspaces for admissibility, vertices for balls.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct InputArg {
    /// JSON input file, or `-` for stdin.
    input: PathBuf,
}

#[derive(Args)]
struct PagesArgs {
    input: PathBuf,
    /// Last page to print; defaults to the page where the sequence is stable.
    #[arg(long)]
    max_page: Option<usize>,
}

#[derive(Args)]
struct SteenbrinkArgs {
    /// JSON input file, or `-` for stdin.
    #[arg(required_unless_present = "cycle", conflicts_with = "cycle")]
    input: Option<PathBuf>,
    /// Use a cycle of this many projective lines instead of an input file.
    #[arg(long)]
    cycle: Option<usize>,
}

#[derive(Args)]
struct BallArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    p: u32,
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct CountsArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    i: usize,
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    q: u64,
}

#[derive(Subcommand)]
enum DrinfeldCommand {
    /// Ball of lattice classes around the standard vertex.
    Ball(BallArgs),
    /// Subspace, flag and stratum counts.
    Counts(CountsArgs),
    /// Betti numbers of P^r minus all rational hyperplanes.
    Arrangement(SpaceArgs),
    /// Betti numbers of the iterated rational blow-up of P^r.
    Blowup(SpaceArgs),
}

#[derive(Subcommand)]
enum Command {
    /// Numbers, filtrations, admissibility and ordinarity of a filtered (phi,N)-module.
    PhinAnalyze(InputArg),
    /// Compare the monodromy and weight filtrations.
    PhinCheckMw(InputArg),
    /// Quotient by the nonzero-slope part of ker N and its Gamma filtration.
    PhinGammaQuotient(InputArg),
    /// Spectral sequence of a filtered complex.
    SsPages(PagesArgs),
    /// Cech spectral sequence of a covering nerve.
    SsCech(PagesArgs),
    /// Weight spectral sequence and monodromy of a semistable degeneration.
    SsSteenbrink(SteenbrinkArgs),
    #[command(subcommand)]
    Drinfeld(DrinfeldCommand),
    DrinfeldBall(BallArgs),
    DrinfeldCounts(CountsArgs),
    DrinfeldArrangement(SpaceArgs),
    DrinfeldBlowup(SpaceArgs),
}

#[derive(Serialize)]
struct Report {
    schema: u32,
    command: &'static str,
    input_sha256: String,
    seed: u64,
    result: Value,
    clauses: Vec<Clause>,
}

fn read_input(path: &PathBuf) -> Result<String, Error> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let opts = AdmissibilityOptions { seed: cli.seed, budget: cli.budget.unwrap_or(AdmissibilityOptions::default().budget), ..Default::default() };
    let ball_budget = cli.budget.unwrap_or(100_000);
    let from_file = |path: &PathBuf, f: &dyn Fn(&str) -> Result<Outcome, Error>| -> Result<(String, Outcome), Error> {
        let text = read_input(path)?;
        Ok((sha256(text.as_bytes()), f(&text)?))
    };
    let from_args = |args: Value, out: Result<Outcome, Error>| -> Result<(String, Outcome), Error> { Ok((sha256(args.to_string().as_bytes()), out?)) };
    let ball = |a: &BallArgs| from_args(json!({"command": "drinfeld-ball", "d": a.d, "p": a.p, "n": a.n}), commands::drinfeld_ball(a.d, a.p, a.n, ball_budget));
    let counts = |a: &CountsArgs| from_args(json!({"command": "drinfeld-counts", "d": a.d, "q": a.q, "i": a.i}), commands::drinfeld_counts(a.d, a.q, a.i));
    let arrangement = |a: &SpaceArgs| from_args(json!({"command": "drinfeld-arrangement", "r": a.r, "q": a.q}), commands::drinfeld_arrangement(a.r, a.q));
    let blowup = |a: &SpaceArgs| from_args(json!({"command": "drinfeld-blowup", "r": a.r, "q": a.q}), commands::drinfeld_blowup(a.r, a.q));

    let (name, (hash, out)) = match &cli.command {
        Command::PhinAnalyze(a) => ("phin-analyze", from_file(&a.input, &|t| commands::phin_analyze(t, &opts))?),
        Command::PhinCheckMw(a) => ("phin-check-mw", from_file(&a.input, &commands::phin_check_mw)?),
        Command::PhinGammaQuotient(a) => ("phin-gamma-quotient", from_file(&a.input, &commands::phin_gamma_quotient)?),
        Command::SsPages(a) => ("ss-pages", from_file(&a.input, &|t| commands::ss_pages(t, a.max_page))?),
        Command::SsCech(a) => ("ss-cech", from_file(&a.input, &|t| commands::ss_cech(t, a.max_page))?),
        Command::SsSteenbrink(a) => match (&a.input, a.cycle) {
            (Some(path), _) => ("ss-steenbrink", from_file(path, &|t| commands::ss_steenbrink(&commands::steenbrink_input(t)?))?),
            (None, Some(n)) => ("ss-steenbrink", from_args(json!({"command": "ss-steenbrink", "cycle": n}), SteenbrinkDatum::cycle(n).and_then(|sd| commands::ss_steenbrink(&sd)))?),
            (None, None) => return Err(Error::Parse("an input file or --cycle is required".into())),
        },
        Command::Drinfeld(DrinfeldCommand::Ball(a)) | Command::DrinfeldBall(a) => ("drinfeld-ball", ball(a)?),
        Command::Drinfeld(DrinfeldCommand::Counts(a)) | Command::DrinfeldCounts(a) => ("drinfeld-counts", counts(a)?),
        Command::Drinfeld(DrinfeldCommand::Arrangement(a)) | Command::DrinfeldArrangement(a) => ("drinfeld-arrangement", arrangement(a)?),
        Command::Drinfeld(DrinfeldCommand::Blowup(a)) | Command::DrinfeldBlowup(a) => ("drinfeld-blowup", blowup(a)?),
    };
    Ok(Report { schema: 1, command: name, input_sha256: hash, seed: cli.seed, result: out.result, clauses: out.clauses })
}

fn render_text(r: &Report) -> String {
    let mut s = format!("command: {}\ninput_sha256: {}\nseed: {}\nclauses:\n", r.command, r.input_sha256, r.seed);
    for c in &r.clauses {
        s += &format!("  [{}] {}: {}\n", if c.pass { "pass" } else { "FAIL" }, c.id, c.statement);
    }
    s += "result:\n";
    if let Value::Object(map) = &r.result {
        for (k, v) in map {
            s += &format!("  {k}: {v}\n");
        }
    }
    s
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::InvalidInput => 1,
        ErrorKind::Precondition => 2,
        ErrorKind::CrossCheck => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(report) => {
            let out = match cli.format {
                Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
                Format::Text => render_text(&report),
            };
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let kind = e.kind();
            let label = match kind {
                ErrorKind::InvalidInput => "invalid input",
                ErrorKind::Precondition => "precondition violated",
                ErrorKind::CrossCheck => "cross-check failed",
            };
            eprintln!("error: {label}: {e}");
            ExitCode::from(exit_code(kind))
        }
    }
}
