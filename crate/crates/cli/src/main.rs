mod job;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, ValueEnum};
use polymoment::corpus::reducible_corpus;
use polymoment::solver::{build_instance, decompose_solution};
use polymoment::{acceptance, report, Complex64, ComplexPoly, Error, Tolerances, VerifyOptions};
use serde_json::{json, Value};

use crate::job::Job;

const EXIT_OK: u8 = 0;
const EXIT_INTERNAL: u8 = 1;
const EXIT_NEGATIVE: u8 = 2;
const EXIT_MALFORMED: u8 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Analyze,
    Verify,
    Decompose,
    Generate,
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Verify => "verify",
            Command::Decompose => "decompose",
            Command::Generate => "generate",
            Command::Selftest => "selftest",
        }
    }

    fn needs_input(self) -> bool {
        !matches!(self, Command::Generate | Command::Selftest)
    }
}

#[derive(Debug, Args)]
struct TolFlags {
    #[arg(long)]
    tol_root: Option<f64>,
    #[arg(long)]
    tol_decomp: Option<f64>,
    #[arg(long)]
    tol_cluster: Option<f64>,
    #[arg(long)]
    tol_moments: Option<f64>,
    #[arg(long)]
    tol_phi: Option<f64>,
    #[arg(long)]
    tol_series: Option<f64>,
    #[arg(long)]
    tol_perp: Option<f64>,
    #[arg(long)]
    tol_recover: Option<f64>,
    #[arg(long)]
    tol_point: Option<f64>,
    #[arg(long)]
    tol_block: Option<f64>,
    #[arg(long)]
    tol_track: Option<f64>,
}

impl TolFlags {
    fn apply(&self, tol: &mut Tolerances) {
        let pairs = [
            (self.tol_root, &mut tol.root),
            (self.tol_decomp, &mut tol.decomp),
            (self.tol_cluster, &mut tol.cluster),
            (self.tol_moments, &mut tol.moments),
            (self.tol_phi, &mut tol.phi),
            (self.tol_series, &mut tol.series),
            (self.tol_perp, &mut tol.perp),
            (self.tol_recover, &mut tol.recover),
            (self.tol_point, &mut tol.point),
            (self.tol_block, &mut tol.block),
            (self.tol_track, &mut tol.track),
        ];
        for (flag, slot) in pairs {
            if let Some(v) = flag {
                *slot = v;
            }
        }
    }
}

/// Monodromy, invariant subspaces and reducible solutions of polynomial
/// moment problems. Reads a JSON job and writes a JSON report.
#[derive(Debug, Parser)]
#[command(name = "polymoment", version)]
struct Cli {
    /// Overrides the job's `command` field.
    #[arg(long, value_enum)]
    command: Option<Command>,
    /// Job file; standard input when omitted.
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Report file; standard output when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Number of moments checked by quadrature.
    #[arg(long)]
    moments: Option<usize>,
    /// Puiseux truncation order.
    #[arg(long, allow_negative_numbers = true)]
    truncation: Option<i64>,
    /// Seed for `generate`.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    tol: TolFlags,
}

struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl Failure {
    fn malformed(message: impl Into<String>) -> Self {
        Failure { code: EXIT_MALFORMED, kind: "MalformedInput".into(), message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MalformedInput(_) | Error::DegenerateInput(_) | Error::NotNormalizable => EXIT_MALFORMED,
            Error::NotASolution(_) => EXIT_NEGATIVE,
            _ => EXIT_INTERNAL,
        };
        let debug = format!("{e:?}");
        let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        Failure { code, kind, message: e.to_string() }
    }
}

struct Resolved {
    opts: VerifyOptions,
    seed: u64,
}

impl Resolved {
    fn to_json(&self) -> Value {
        json!({
            "moments": self.opts.moments,
            "truncation": self.opts.truncation,
            "tol": self.opts.tol,
            "seed": self.seed,
        })
    }
}

fn resolve(cli: &Cli, job: &Job) -> Resolved {
    let mut opts = VerifyOptions::default();
    if let Some(t) = job.options.tol {
        opts.tol = t;
    }
    cli.tol.apply(&mut opts.tol);
    opts.moments = cli.moments.or(job.options.moments).unwrap_or(opts.moments);
    opts.truncation = cli.truncation.or(job.options.truncation);
    let seed = cli.seed.or(job.options.seed).unwrap_or(0);
    Resolved { opts, seed }
}

fn require<T: Clone>(field: &Option<T>, name: &str) -> Result<T, Failure> {
    field.clone().ok_or_else(|| Failure::malformed(format!("missing field `{name}`")))
}

fn validate(resolved: &Resolved) -> Result<(), Failure> {
    let tol = serde_json::to_value(resolved.opts.tol).expect("tolerances serialize");
    for (name, v) in tol.as_object().expect("struct serializes to a map") {
        let v = v.as_f64().unwrap_or(f64::NAN);
        if !(v.is_finite() && v > 0.0) {
            return Err(Failure::malformed(format!("tolerance `{name}` must be positive")));
        }
    }
    if resolved.opts.moments == 0 {
        return Err(Failure::malformed("moments must be positive"));
    }
    if resolved.opts.truncation.is_some_and(|t| t < 1) {
        return Err(Failure::malformed("truncation must be positive"));
    }
    Ok(())
}

fn finite(p: &ComplexPoly, name: &str) -> Result<(), Failure> {
    if p.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Failure::malformed(format!("`{name}` has non-finite coefficients")))
    }
}

/// Runs one command; the value is the `result` field and the flag tells
/// whether the outcome is affirmative.
fn execute(command: Command, job: &Job, resolved: &Resolved) -> Result<(Value, bool), Failure> {
    match command {
        Command::Generate => {
            let case = reducible_corpus(resolved.seed, 1).remove(0);
            Ok((
                json!({
                    "command": "decompose",
                    "P": report::poly(&case.p),
                    "a": report::complex(case.a),
                    "b": report::complex(case.b),
                    "Q": report::poly(&case.q),
                    "options": {"seed": resolved.seed},
                    "meta": {"A": report::poly(&case.outer), "B": report::poly(&case.inner), "R": report::poly(&case.r)},
                }),
                true,
            ))
        }
        Command::Selftest => {
            let results = acceptance::run_all();
            let ok = acceptance::acceptable(&results);
            for r in &results {
                eprintln!("{r}");
            }
            Ok((
                json!({
                    "criteria": results,
                    "known_unattainable": acceptance::KNOWN_UNATTAINABLE,
                    "all_passed": results.iter().all(|r| r.passed),
                }),
                ok,
            ))
        }
        Command::Analyze | Command::Verify | Command::Decompose => {
            let p = require(&job.p, "P")?;
            finite(&p, "P")?;
            let a: Complex64 = require(&job.a, "a")?;
            let b: Complex64 = require(&job.b, "b")?;
            let inst = build_instance(&p, a, b, &resolved.opts)?;
            match command {
                Command::Analyze => Ok((report::analyze(&inst)?, true)),
                Command::Verify => {
                    let q = require(&job.q, "Q")?;
                    finite(&q, "Q")?;
                    let r = inst.verify(&q)?;
                    Ok((report::verify(&r), r.verdict))
                }
                _ => {
                    let q = require(&job.q, "Q")?;
                    finite(&q, "Q")?;
                    let parts = decompose_solution(&inst, &q)?;
                    Ok((report::decompose(&inst.p, &parts), !parts.is_empty()))
                }
            }
        }
    }
}

fn read_job(cli: &Cli, command: Option<Command>) -> Result<Job, Failure> {
    let text = match &cli.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::malformed(format!("cannot read {}: {e}", path.display())))?,
        None if command.is_some_and(|c| !c.needs_input()) => return Ok(Job::default()),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::malformed(format!("cannot read standard input: {e}")))?;
            s
        }
    };
    job::parse(&text).map_err(Failure::malformed)
}

fn run(cli: &Cli) -> (Value, u8) {
    let mut envelope = json!({"version": env!("CARGO_PKG_VERSION")});
    let outcome = (|| {
        let job = read_job(cli, cli.command)?;
        let command = match (cli.command, &job.command) {
            (Some(c), _) => c,
            (None, Some(name)) => Command::from_str(name, true)
                .map_err(|_| Failure::malformed(format!("unknown command `{name}`")))?,
            (None, None) => return Err(Failure::malformed("no command given")),
        };
        envelope["command"] = json!(command.name());
        let resolved = resolve(cli, &job);
        envelope["options"] = resolved.to_json();
        validate(&resolved)?;
        execute(command, &job, &resolved)
    })();
    match outcome {
        Ok((result, ok)) => {
            envelope["result"] = result;
            (envelope, if ok { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Err(f) => {
            eprintln!("polymoment: {}", f.message);
            envelope["error"] = json!({"kind": f.kind, "message": f.message});
            (envelope, f.code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (envelope, mut code) = run(&cli);
    let text = serde_json::to_string_pretty(&envelope).expect("reports serialize") + "\n";
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("polymoment: cannot write {}: {e}", path.display());
                code = EXIT_INTERNAL;
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}
