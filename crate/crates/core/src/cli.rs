//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 sequence not admissible,
//! 3 no counterexample at the requested theta.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{bound_ladder, bound_report};
use crate::error::{Error, Result};
use crate::extremal::{
    best_constant_scan, extremal_half, extremal_sequence, near_extremal, refute_false_bound,
    OddFraction, RefuteScope,
};
use crate::formats::{
    best_constant_csv, chain_svg, format_phases, kuzmin_csv, kuzmin_summary, landau_csv,
    landau_summary, parse_inline_phases, parse_theta, read_phases, NearExtremalJson,
    RefutationJson, WitnessJson,
};
use crate::kuzmin::{build_chain, kuzmin_bound_trace};
use crate::landau::landau_decompose;
use crate::phases::{check_admissible, PhaseSequence};
use crate::search::{maximize, SearchConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NOT_ADMISSIBLE: i32 = 2;
pub const EXIT_NO_COUNTEREXAMPLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "expsum",
    version,
    about = "Sharp bounds for exponential sums over admissible phase sequences"
)]
pub struct Cli {
    /// Write the primary output here instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
pub struct PhaseInput {
    /// Phase file: one decimal per line, or a JSON array
    #[arg(long, value_name = "FILE")]
    pub phases: Option<PathBuf>,

    /// Phases inline, comma separated, e.g. "0,0.2,0.5"
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub inline: Option<String>,
}

impl PhaseInput {
    fn load(&self) -> Result<Option<PhaseSequence>> {
        match (&self.phases, &self.inline) {
            (Some(path), _) => read_phases(path).map(Some),
            (None, Some(text)) => parse_inline_phases(text).map(Some),
            (None, None) => Ok(None),
        }
    }

    fn require(&self) -> Result<PhaseSequence> {
        self.load()?.ok_or_else(|| {
            Error::InvalidParameter("--phases FILE or --inline LIST is required".into())
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Landau,
    Kuzmin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound ladder at theta, plus the full report when phases are given
    Bound {
        #[arg(long)]
        theta: String,
        #[command(flatten)]
        input: PhaseInput,
    },
    /// Admissibility report; exits 2 when the sequence is not admissible
    Check {
        #[arg(long)]
        theta: String,
        #[command(flatten)]
        input: PhaseInput,
    },
    /// Extremal witness for an odd/odd theta = P/Q or theta = 1/2
    Extremal {
        #[arg(long, value_name = "P/Q")]
        theta: String,
        /// Also write the witness phases, one per line
        #[arg(long, value_name = "FILE")]
        emit_phases: Option<PathBuf>,
    },
    /// Admissible witness with |S| > cot(pi theta/2) - epsilon
    NearExtremal {
        #[arg(long)]
        theta: String,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_name = "FILE")]
        emit_phases: Option<PathBuf>,
    },
    /// Landau or Kuzmin decomposition with identity residuals
    Decompose {
        #[arg(long, value_enum)]
        method: Method,
        #[command(flatten)]
        input: PhaseInput,
        /// Include the Kuzmin bound trace at this theta
        #[arg(long)]
        theta: Option<String>,
        /// json: residual summary; csv: the per-term table
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Also write the per-term CSV table here
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Counterexample to |S| <= 1/(pi theta) + 1; exits 3 when none exists at theta
    Refute {
        #[arg(long)]
        theta: String,
        /// Fall back to an odd/odd theta' <= theta when theta itself admits none
        #[arg(long)]
        search_below: bool,
        #[arg(long, value_name = "FILE")]
        emit_phases: Option<PathBuf>,
    },
    /// Projected gradient ascent for max |S| at fixed (n, theta)
    Search {
        #[arg(long)]
        theta: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = SearchConfig::DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, env = "EXPSUM_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = SearchConfig::DEFAULT_MAX_ITERS)]
        max_iters: usize,
        #[arg(long, default_value_t = SearchConfig::DEFAULT_STEP_INIT)]
        step_init: f64,
        #[arg(long, default_value_t = SearchConfig::DEFAULT_TOL)]
        tol: f64,
        /// Skip the padded extremal start
        #[arg(long)]
        no_extremal_seed: bool,
        #[arg(long, value_name = "FILE")]
        emit_phases: Option<PathBuf>,
    },
    /// SVG of the partial-sum chain and its circumcenters
    Plot {
        #[command(flatten)]
        input: PhaseInput,
        #[arg(long, value_name = "FILE.svg")]
        out: PathBuf,
        /// Draw the circumcircles
        #[arg(long)]
        circles: bool,
    },
    /// Table of (theta_j, theta_j cot(pi theta_j/2)) for theta_j = 1/(2j+1)
    BestConstant {
        #[arg(long)]
        jmax: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

struct Outcome {
    body: String,
    code: i32,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self {
            body,
            code: EXIT_OK,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(format!("serializing output: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn write_file(path: &PathBuf, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn extremal_from_text(text: &str) -> Result<crate::extremal::ExtremalWitness> {
    let (p, q) = text.trim().split_once('/').ok_or_else(|| {
        Error::InvalidFraction(format!("extremal needs theta as P/Q, got {text:?}"))
    })?;
    let p: u64 = p
        .trim()
        .parse()
        .map_err(|e| Error::InvalidFraction(format!("{text:?}: {e}")))?;
    let q: u64 = q
        .trim()
        .parse()
        .map_err(|e| Error::InvalidFraction(format!("{text:?}: {e}")))?;
    if p > 0 && 2 * p == q {
        return Ok(extremal_half());
    }
    extremal_sequence(OddFraction::new(p, q)?)
}

fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Bound { theta, input } => {
            let theta = parse_theta(theta)?;
            match input.load()? {
                Some(a) => Ok(Outcome::ok(to_json(&bound_report(&a, theta)?)?)),
                None => Ok(Outcome::ok(to_json(&bound_ladder(theta)?)?)),
            }
        }
        Command::Check { theta, input } => {
            let theta = parse_theta(theta)?;
            let report = check_admissible(&input.require()?, theta)?;
            let code = if report.admissible {
                EXIT_OK
            } else {
                EXIT_NOT_ADMISSIBLE
            };
            Ok(Outcome {
                body: to_json(&report)?,
                code,
            })
        }
        Command::Extremal { theta, emit_phases } => {
            let w = extremal_from_text(theta)?;
            if let Some(path) = emit_phases {
                write_file(path, &format_phases(&w.sequence))?;
            }
            Ok(Outcome::ok(to_json(&WitnessJson::extremal(&w))?))
        }
        Command::NearExtremal {
            theta,
            epsilon,
            emit_phases,
        } => {
            let r = near_extremal(parse_theta(theta)?, *epsilon)?;
            if let Some(path) = emit_phases {
                write_file(path, &format_phases(&r.witness.sequence))?;
            }
            Ok(Outcome::ok(to_json(&NearExtremalJson {
                witness: WitnessJson::near_extremal(&r),
                epsilon: r.epsilon,
            })?))
        }
        Command::Decompose {
            method,
            input,
            theta,
            format,
            csv,
        } => {
            let a = input.require()?;
            let (table, summary) = match method {
                Method::Landau => {
                    let d = landau_decompose(&a)?;
                    (landau_csv(&d), to_json(&landau_summary(&a, &d)?)?)
                }
                Method::Kuzmin => {
                    let g = build_chain(&a)?;
                    let trace = match theta {
                        Some(t) => Some(kuzmin_bound_trace(&g, parse_theta(t)?)?),
                        None => None,
                    };
                    (
                        kuzmin_csv(&g),
                        to_json(&kuzmin_summary(&g, trace.as_ref()))?,
                    )
                }
            };
            if let Some(path) = csv {
                write_file(path, &table)?;
            }
            Ok(Outcome::ok(match format {
                Format::Json => summary,
                Format::Csv => table,
            }))
        }
        Command::Refute {
            theta,
            search_below,
            emit_phases,
        } => {
            let scope = if *search_below {
                RefuteScope::AtOrBelow
            } else {
                RefuteScope::AtTheta
            };
            match refute_false_bound(parse_theta(theta)?, scope) {
                Ok(r) => {
                    if let Some(path) = emit_phases {
                        write_file(path, &format_phases(&r.witness.sequence))?;
                    }
                    Ok(Outcome::ok(to_json(&RefutationJson::new(&r))?))
                }
                Err(Error::NoCounterexample(diag)) => Ok(Outcome {
                    body: to_json(&*diag)?,
                    code: EXIT_NO_COUNTEREXAMPLE,
                }),
                Err(e) => Err(e),
            }
        }
        Command::Search {
            theta,
            n,
            restarts,
            seed,
            max_iters,
            step_init,
            tol,
            no_extremal_seed,
            emit_phases,
        } => {
            let config = SearchConfig {
                n: *n,
                theta: parse_theta(theta)?,
                restarts: *restarts,
                max_iters: *max_iters,
                step_init: *step_init,
                tol: *tol,
                seed: *seed,
                extremal_seed: !no_extremal_seed,
            };
            let result = maximize(&config)?;
            if let Some(path) = emit_phases {
                write_file(path, &format_phases(&result.best_sequence))?;
            }
            Ok(Outcome::ok(to_json(&result)?))
        }
        Command::Plot {
            input,
            out,
            circles,
        } => {
            let g = build_chain(&input.require()?)?;
            write_file(out, &chain_svg(&g, *circles))?;
            Ok(Outcome::ok(String::new()))
        }
        Command::BestConstant { jmax, format } => {
            let rows = best_constant_scan(*jmax)?;
            Ok(Outcome::ok(match format {
                Format::Csv => best_constant_csv(&rows),
                Format::Json => to_json(&rows)?,
            }))
        }
    }
}

fn one_line(message: &str) -> String {
    message.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = writeln!(stderr, "error: {}", one_line(&e.to_string()));
                    EXIT_FAILURE
                }
            };
        }
    };

    let outcome = match execute(&cli.command) {
        Ok(outcome) => outcome,
        Err(Error::NotAdmissible { theta, report }) => {
            let _ = writeln!(
                stderr,
                "error: sequence is not admissible for theta = {theta}"
            );
            Outcome {
                body: to_json(&*report).unwrap_or_default(),
                code: EXIT_NOT_ADMISSIBLE,
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", one_line(&e.to_string()));
            return EXIT_FAILURE;
        }
    };

    if outcome.body.is_empty() {
        return outcome.code;
    }
    let written = match &cli.output {
        Some(path) => write_file(path, &outcome.body),
        None => stdout
            .write_all(outcome.body.as_bytes())
            .map_err(Error::from),
    };
    match written {
        Ok(()) => outcome.code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", one_line(&e.to_string()));
            EXIT_FAILURE
        }
    }
}
