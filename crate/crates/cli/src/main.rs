//! `qindel`: deletion spheres, indel distances and code-capability verdicts
//! from the command line.
//!
//! Exit codes: 0 = success / true, 1 = false, 2 = inconclusive,
//! 3 = usage, parse or input error.

mod inputs;
mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qindel::channels::deletion_sphere;
use qindel::distance::{corrects, corrects_insertions, indel_distance, ErrorSpec, Verdict};
use qindel::feasibility::FeasibilityOptions;
use qindel::reproduction::{run_all, ReproductionConfig};
use qindel::{Error, Tolerance};

use inputs::{load_code, load_state};
use report::{digest, RunReport, ToleranceSettings};

const EXIT_TRUE: u8 = 0;
const EXIT_FALSE: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qindel", version, about = "Quantum deletion/insertion error spheres, indel distance and code verdicts")]
struct Cli {
    /// Equality tolerance per unit dimension (scaled by sqrt(dim)).
    #[arg(long, global = true, default_value_t = 1e-9)]
    eq_tol: f64,
    /// PSD tolerance per unit dimension (scaled by dim).
    #[arg(long, global = true, default_value_t = 1e-9)]
    psd_tol: f64,
    /// Constraint residual accepted as feasible.
    #[arg(long, global = true, default_value_t = 1e-6)]
    feas_tol: f64,
    /// Gap above which a stalled solve is declared infeasible.
    #[arg(long, global = true, default_value_t = 1e-3)]
    gap_tol: f64,
    /// Report elapsed_ms as 0 so output is byte-stable.
    #[arg(long, global = true)]
    stable: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Errors {
    Deletions,
    Indel,
    Insertions,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Deduplicated s-deletion sphere of a state.
    Sphere {
        /// State file or builtin:NAME[:alpha,beta]
        state: String,
        #[arg(long = "s")]
        s: usize,
        /// Write the sphere members as a JSON list of state files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quantum indel distance between two states, with a witness.
    Distance { a: String, b: String },
    /// Decide whether a code corrects t errors of the given kind.
    Verify {
        /// builtin:x1, builtin:x2, builtin:collision-x2, builtin:rho,psi, or a directory of state files
        code: String,
        #[arg(long = "t")]
        t: usize,
        #[arg(long, value_enum)]
        errors: Errors,
        /// Grid resolution THETA_STEPS,PHI_STEPS for builtin continuous codes.
        #[arg(long, value_parser = parse_grid)]
        grid: Option<(usize, usize)>,
        /// Recorded in the report; verdicts are deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the full reproduction suite of worked examples and properties.
    Reproduce {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Also write the item report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn parse_grid(text: &str) -> Result<(usize, usize), String> {
    let (t, p) = text
        .split_once(',')
        .ok_or_else(|| format!("expected THETA_STEPS,PHI_STEPS, got '{text}'"))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| format!("grid steps must be positive integers, got '{s}'"))
    };
    Ok((parse(t)?, parse(p)?))
}

fn verdict_exit(v: Verdict) -> u8 {
    match v {
        Verdict::True => EXIT_TRUE,
        Verdict::False => EXIT_FALSE,
        Verdict::Unknown => EXIT_INCONCLUSIVE,
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

struct Outcome {
    results: Value,
    fingerprint: Vec<Vec<u8>>,
    exit: u8,
}

fn execute(cli: &Cli, tol: &Tolerance, feas: &FeasibilityOptions) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Sphere { state, s, out } => {
            let loaded = load_state(state, tol)?;
            let sphere = deletion_sphere(&loaded.value, *s, tol)?;
            let members: Vec<Value> = sphere
                .members()
                .iter()
                .map(|m| json!({ "deleted": m.index_set, "state": m.state }))
                .collect();
            if let Some(path) = out {
                let states: Vec<_> = sphere.members().iter().map(|m| m.state.to_state_file()).collect();
                let text = serde_json::to_string_pretty(&states).expect("state files serialize");
                fs::write(path, text).map_err(|e| Error::Parse(format!("cannot write '{}': {e}", path.display())))?;
            }
            Ok(Outcome {
                results: json!({
                    "s": s,
                    "cardinality": sphere.len(),
                    "raw_count": sphere.raw_count(),
                    "members": members,
                }),
                fingerprint: vec![loaded.fingerprint, s.to_string().into_bytes()],
                exit: EXIT_TRUE,
            })
        }
        Command::Distance { a, b } => {
            let x = load_state(a, tol)?;
            let y = load_state(b, tol)?;
            let d = indel_distance(&x.value, &y.value, tol)?;
            Ok(Outcome {
                results: to_value(&d),
                fingerprint: vec![x.fingerprint, y.fingerprint],
                exit: EXIT_TRUE,
            })
        }
        Command::Verify {
            code,
            t,
            errors,
            grid,
            seed,
        } => {
            let loaded = load_code(code, *grid, tol)?;
            let sample = &loaded.value;
            let (verdict, body) = match errors {
                Errors::Deletions | Errors::Indel => {
                    let spec = if *errors == Errors::Deletions {
                        ErrorSpec::Deletions(*t)
                    } else {
                        ErrorSpec::TotalIndel(*t)
                    };
                    let v = corrects(sample, spec, tol)?;
                    (v.verdict, to_value(&v))
                }
                Errors::Insertions => {
                    let v = corrects_insertions(sample, *t, feas, tol)?;
                    (v.verdict, to_value(&v))
                }
            };
            Ok(Outcome {
                results: json!({
                    "codewords": sample.len(),
                    "duplicates_dropped": sample.dropped(),
                    "seed": seed,
                    "verdict": verdict,
                    "report": body,
                }),
                fingerprint: vec![loaded.fingerprint, format!("{t}|{errors:?}").into_bytes()],
                exit: verdict_exit(verdict),
            })
        }
        Command::Reproduce { seed, report } => {
            let cfg = ReproductionConfig {
                seed: *seed,
                tol: *tol,
                feasibility: *feas,
            };
            let start = Instant::now();
            let items = run_all(&cfg);
            let elapsed = if cli.stable { 0 } else { start.elapsed().as_millis() as u64 };
            let all_pass = items.iter().all(|i| i.passed);
            let body = json!({
                "items": items.iter().map(|i| json!({
                    "name": i.name,
                    "status": i.status(),
                    "residual": i.residual,
                    "details": i.details,
                })).collect::<Vec<_>>(),
                "seed": seed,
                "tolerances": ToleranceSettings::new(tol, feas),
                "elapsed_ms": elapsed,
            });
            if let Some(path) = report {
                let text = serde_json::to_string_pretty(&body).expect("report serializes");
                fs::write(path, text).map_err(|e| Error::Parse(format!("cannot write '{}': {e}", path.display())))?;
            }
            Ok(Outcome {
                results: body,
                fingerprint: vec![seed.to_le_bytes().to_vec()],
                exit: if all_pass { EXIT_TRUE } else { EXIT_FALSE },
            })
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };

    let tol = match Tolerance::new(cli.eq_tol, cli.psd_tol, Tolerance::default().eig_tol) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if !(cli.feas_tol > 0.0 && cli.feas_tol.is_finite() && cli.gap_tol > 0.0 && cli.gap_tol.is_finite()) {
        eprintln!("error: --feas-tol and --gap-tol must be positive and finite");
        return ExitCode::from(EXIT_USAGE);
    }
    let feas = FeasibilityOptions {
        feas_tol: cli.feas_tol,
        gap_tol: cli.gap_tol,
        ..FeasibilityOptions::default()
    };

    let start = Instant::now();
    match execute(&cli, &tol, &feas) {
        Ok(outcome) => {
            let parts: Vec<&[u8]> = outcome.fingerprint.iter().map(Vec::as_slice).collect();
            let report = RunReport {
                command: argv[1..].to_vec(),
                inputs_digest: digest(&parts),
                results: outcome.results,
                elapsed_ms: if cli.stable { 0 } else { start.elapsed().as_millis() as u64 },
                tolerances: ToleranceSettings::new(&tol, &feas),
            };
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(outcome.exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
