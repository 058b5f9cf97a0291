//! `padyn`: command-line front end for the p-adic dynamics library.

mod jobs;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use padyn::Error;
use serde_json::{json, Value};

use jobs::{embedded_ctx, error_json, exit_code, resolve_ctx, run, run_batch, CommandKind, CtxFlags, JobSpec};

#[derive(Parser, Debug)]
#[command(name = "padyn", version, about = "Dynamics of p-adic power series: polygons, commutants, torsion, ramification")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// The prime p.
    #[arg(long = "p", global = true)]
    p: Option<u64>,

    /// Coefficient precision: work modulo p^N.
    #[arg(long = "N", global = true)]
    n: Option<u32>,

    /// Series precision: work modulo x^(K+1).
    #[arg(long = "K", global = true)]
    k: Option<usize>,

    /// Seed for randomized generators.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Emit JSON instead of the human-readable report.
    #[arg(long, global = true)]
    json: bool,

    /// Run a JSON array of job specifications concurrently.
    #[arg(long, value_name = "FILE")]
    jobs: Option<PathBuf>,

    /// Also write the JSON report to this file.
    #[arg(long, short = 'o', global = true, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Input {
    /// JSON input file; reads stdin when absent or "-".
    input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Newton polygon, its negative part and root valuations of {"series"}.
    Polygon(Input),
    /// Weierstrass preparation of {"series"}.
    Wprep(Input),
    /// Weierstrass degree of {"series"}.
    Wideg(Input),
    /// Logarithm L_f of an invertible-linear series {"f"}.
    Linearize(Input),
    /// Commuting series [a]_f for {"f", "a"}.
    Commutant(Input),
    /// Integrality of the torsion commutant for {"f", "u"?, "out_prec"?}.
    TorsionCheck(Input),
    /// Lower ramification numbers of {"omega", "n_max"?} over F_p.
    Ramification(Input),
    /// Torsion order of {"omega", "d_max"?} over F_p.
    Order(Input),
    /// Normalizer membership witness for {"theta", "omega", "m"?}.
    Normalizer(Input),
    /// Compares root valuations of f^(n) and u^(p^(n-delta)) - x for {"f", "u", "n", "delta"?}.
    LambdaCheck(Input),
    /// Generates a test pair {"kind": "gm" | "lt" | "conjugated", "seed"?}.
    GenPair(Input),
    /// Checks the minimal-pair hypotheses for {"f", "u"}.
    ValidatePair(Input),
    /// Z_p-power omega^(a) to m digits for {"omega", "a", "m"}.
    ZpIterate(Input),
}

impl Command {
    fn split(&self) -> (CommandKind, Option<&Path>) {
        let (kind, input) = match self {
            Command::Polygon(i) => (CommandKind::Polygon, i),
            Command::Wprep(i) => (CommandKind::Wprep, i),
            Command::Wideg(i) => (CommandKind::Wideg, i),
            Command::Linearize(i) => (CommandKind::Linearize, i),
            Command::Commutant(i) => (CommandKind::Commutant, i),
            Command::TorsionCheck(i) => (CommandKind::TorsionCheck, i),
            Command::Ramification(i) => (CommandKind::Ramification, i),
            Command::Order(i) => (CommandKind::Order, i),
            Command::Normalizer(i) => (CommandKind::Normalizer, i),
            Command::LambdaCheck(i) => (CommandKind::LambdaCheck, i),
            Command::GenPair(i) => (CommandKind::GenPair, i),
            Command::ValidatePair(i) => (CommandKind::ValidatePair, i),
            Command::ZpIterate(i) => (CommandKind::ZpIterate, i),
        };
        (kind, input.input.as_deref())
    }
}

fn read_json(path: Option<&Path>) -> Result<Value, Error> {
    let text = match path {
        Some(p) if p != Path::new("-") => {
            std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("cannot read {}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    if text.trim().is_empty() {
        return Ok(json!({}));
    }
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

fn write_output(path: &Path, v: &Value) -> Result<(), Error> {
    std::fs::write(path, pretty(v) + "\n").map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

fn fail(e: &Error) -> ExitCode {
    emit(&(pretty(&error_json(e)) + "\n"));
    ExitCode::from(exit_code(e) as u8)
}

fn run_single(cli: &Cli, flags: CtxFlags, command: &Command) -> ExitCode {
    let (kind, path) = command.split();
    let job = read_json(path).and_then(|inputs| {
        let ctx = resolve_ctx(flags, embedded_ctx(&inputs))?;
        Ok(JobSpec { command: kind, ctx, inputs, seed: cli.seed, output_path: cli.output.clone() })
    });
    let job = match job {
        Ok(j) => j,
        Err(e) => return fail(&e),
    };
    match run(&job) {
        Ok(report) => {
            if let Some(p) = &job.output_path {
                if let Err(e) = write_output(p, &report.json) {
                    return fail(&e);
                }
            }
            if cli.json {
                emit(&(pretty(&report.json) + "\n"));
            } else {
                emit(&report.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn run_jobs(cli: &Cli, flags: CtxFlags, path: &Path) -> ExitCode {
    let specs = match read_json(Some(path)) {
        Ok(Value::Array(a)) => a,
        Ok(_) => return fail(&Error::Parse("the jobs file must hold a JSON array".into())),
        Err(e) => return fail(&e),
    };
    let jobs: Vec<_> = specs.iter().map(|s| JobSpec::from_json(s, flags, cli.seed)).collect();
    let results = run_batch(&jobs);
    let mut worst = 0;
    let mut out = Vec::with_capacity(results.len());
    for (job, (kind, res)) in jobs.iter().zip(results) {
        let mut entry = json!({"command": kind.map(CommandKind::as_str)});
        match res {
            Ok(report) => {
                let saved = match job.as_ref().ok().and_then(|j| j.output_path.as_ref()) {
                    Some(p) => write_output(p, &report.json),
                    None => Ok(()),
                };
                match saved {
                    Ok(()) => {
                        entry["exit"] = 0.into();
                        entry["report"] = report.json;
                    }
                    Err(e) => {
                        worst = worst.max(exit_code(&e));
                        entry["exit"] = exit_code(&e).into();
                        entry["error"] = error_json(&e)["error"].clone();
                    }
                }
            }
            Err(e) => {
                worst = worst.max(exit_code(&e));
                entry["exit"] = exit_code(&e).into();
                entry["error"] = error_json(&e)["error"].clone();
            }
        }
        out.push(entry);
    }
    emit(&(pretty(&Value::Array(out)) + "\n"));
    ExitCode::from(worst as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = CtxFlags { p: cli.p, n: cli.n, k: cli.k };
    match (&cli.jobs, &cli.command) {
        (Some(path), None) => run_jobs(&cli, flags, path),
        (None, Some(cmd)) => run_single(&cli, flags, cmd),
        (Some(_), Some(_)) => fail(&Error::Parse("--jobs cannot be combined with a subcommand".into())),
        (None, None) => fail(&Error::Parse("no subcommand given; see --help".into())),
    }
}
