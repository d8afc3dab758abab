//! Command-line surface.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use conerefine::jordan::ConeShape;
use conerefine::metrics::dimacs;
use conerefine::models::{DualStatusVerdict, StatusVerdict};
use conerefine::operators::ProblemData;
use conerefine::prsolver::{BasicScheme, PrConfig};
use conerefine::refine::{postprocess, Exit, RefineConfig, WarmStart};
use conerefine::status::{status_dualside, status_primal, StatusConfig};

use crate::clock::WallClock;
use crate::error::{read_file, write_file, CliError, CliResult};
use crate::gen::{generate_instance, perturbed_start, GenMode};
use crate::record::{push_certificate, result_record, write_trace, Record};
use crate::sdpa::{parse_sdpa, write_sdpa};
use crate::warm::WarmStartFile;

pub const EXIT_SOLUTION: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CERTIFICATE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_TIME: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "conerefine", version, about = "Refine approximate SDP solutions by projection and rescaling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Primal,
    Dual,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    VonNeumann,
    SmoothPerceptron,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    StrongBoth,
    KnownOptimal,
    WeakPrimal,
    RayP,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Refine a solution; without --warm the start is x = e, y = 0, z = c.
    Refine {
        problem: String,
        #[arg(long)]
        warm: Option<String>,
        #[arg(long, default_value_t = 1e-12)]
        theta_acc: f64,
        #[arg(long, default_value_t = 1e-16)]
        eps: f64,
        #[arg(long, default_value_t = 0.25)]
        xi: f64,
        #[arg(long, default_value_t = 1800.0)]
        time_limit: f64,
        #[arg(long, value_enum, default_value = "smooth-perceptron")]
        scheme: SchemeArg,
        /// One line per outer iteration.
        #[arg(long)]
        trace: Option<String>,
        /// Final (x, y, z) in the warm-start format.
        #[arg(long)]
        out: Option<String>,
    },
    /// Decide strong feasibility of one side through its status problem.
    Status {
        problem: String,
        #[arg(long, value_enum, default_value = "primal")]
        side: SideArg,
        #[arg(long, default_value_t = 1800.0)]
        time_limit: f64,
    },
    /// Print the six DIMACS errors of a solution.
    Dimacs { problem: String, solution: String },
    /// Write a seeded random instance.
    Gen {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Signed block sizes, negative for diagonal blocks, e.g. `4,-3`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        blocks: Vec<i64>,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: String,
        /// Planted solution in the warm-start format.
        #[arg(long)]
        solution: Option<String>,
        /// Interior start blended from the planted solution with weight --perturb.
        #[arg(long)]
        warm: Option<String>,
        #[arg(long, default_value_t = 1e-3)]
        perturb: f64,
    },
}

fn load_problem(path: &str) -> CliResult<ProblemData> {
    parse_sdpa(&read_file(path)?)
}

fn exit_code(exit: &Exit) -> i32 {
    match exit {
        Exit::Complete => EXIT_SOLUTION,
        Exit::CertificateFound(_) => EXIT_CERTIFICATE,
        Exit::NumericalError => EXIT_NUMERICAL,
        Exit::TimeOver => EXIT_TIME,
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> CliResult<i32> {
    match cli.command {
        Command::Refine { problem, warm, theta_acc, eps, xi, time_limit, scheme, trace, out: sol } => {
            let p = load_problem(&problem)?;
            let start = match &warm {
                Some(f) => WarmStartFile::parse(&read_file(f)?)?.to_warm(&p)?,
                None => WarmStart::cold(&p),
            };
            let scheme = match scheme {
                SchemeArg::VonNeumann => BasicScheme::VonNeumann,
                SchemeArg::SmoothPerceptron => BasicScheme::SmoothPerceptron,
            };
            let cfg = RefineConfig {
                theta_acc,
                pr: PrConfig { eps, xi, scheme },
                time_limit,
                ..RefineConfig::default()
            };
            let clock = WallClock::start();
            let res = postprocess(&p, &start, &cfg, &clock)?;
            let seconds = conerefine::refine::Clock::seconds(&clock);
            if let Some(f) = &trace {
                write_file(f, &write_trace(&res.trace))?;
            }
            if let Some(f) = &sol {
                write_file(f, &WarmStartFile::from_solution(&res.x, &res.y, Some(&res.z)).write())?;
            }
            let rec = result_record(&problem, &res, p.dual_objective(&res.y), p.primal_objective(&res.x), seconds);
            emit(out, &rec)?;
            Ok(exit_code(&res.exit))
        }
        Command::Status { problem, side, time_limit } => {
            let p = load_problem(&problem)?;
            let cfg = StatusConfig { refine: RefineConfig { time_limit, ..RefineConfig::default() }, ..StatusConfig::default() };
            let clock = WallClock::start();
            let mut rec = Record::default();
            rec.push("problem", &problem);
            let (exit, code) = match side {
                SideArg::Primal => {
                    let rep = status_primal(&p, &cfg, &clock)?;
                    rec.push("side", "primal");
                    rec.push("value", format!("{:e}", rep.problem.problem.dual_objective(&rep.refine.y)));
                    let code = match &rep.verdict {
                        Ok(StatusVerdict::NotStronglyFeasible(c)) => {
                            rec.push("verdict", "not_strongly_feasible");
                            push_certificate(&mut rec, c);
                            EXIT_CERTIFICATE
                        }
                        Ok(StatusVerdict::InteriorPoint(x)) => {
                            rec.push("verdict", "strongly_feasible");
                            push_certificate(
                                &mut rec,
                                &conerefine::models::Certificate::PrimalInterior {
                                    x: x.clone(),
                                    objective: p.primal_objective(x),
                                    residual: (p.a.apply(x) - &p.b).norm(),
                                    lambda_min: x.lambda_min()?,
                                },
                            );
                            EXIT_SOLUTION
                        }
                        Err(e) => {
                            rec.push("verdict", "undecided");
                            rec.push("reason", e.to_string().replace(' ', "_"));
                            EXIT_NUMERICAL
                        }
                    };
                    (rep.refine.exit, code)
                }
                SideArg::Dual => {
                    let rep = status_dualside(&p, &cfg, &clock)?;
                    rec.push("side", "dual");
                    rec.push("value", format!("{:e}", rep.problem.problem.dual_objective(&rep.refine.y)));
                    let code = match &rep.verdict {
                        Ok(DualStatusVerdict::NotStronglyFeasible(c)) => {
                            rec.push("verdict", "not_strongly_feasible");
                            push_certificate(&mut rec, c);
                            EXIT_CERTIFICATE
                        }
                        Ok(DualStatusVerdict::InteriorPoint(y)) => {
                            rec.push("verdict", "strongly_feasible");
                            let z = p.slack(y);
                            push_certificate(
                                &mut rec,
                                &conerefine::models::Certificate::DualFeasible {
                                    y: y.clone(),
                                    objective: p.dual_objective(y),
                                    lambda_min: z.lambda_min()?,
                                    z,
                                },
                            );
                            EXIT_SOLUTION
                        }
                        Err(e) => {
                            rec.push("verdict", "undecided");
                            rec.push("reason", e.to_string().replace(' ', "_"));
                            EXIT_NUMERICAL
                        }
                    };
                    (rep.refine.exit, code)
                }
            };
            rec.push("exit", exit.name());
            rec.push("seconds", format!("{:e}", conerefine::refine::Clock::seconds(&clock)));
            emit(out, &rec)?;
            Ok(if code == EXIT_NUMERICAL && exit == Exit::TimeOver { EXIT_TIME } else { code })
        }
        Command::Dimacs { problem, solution } => {
            let p = load_problem(&problem)?;
            let w = WarmStartFile::parse(&read_file(&solution)?)?.to_warm(&p)?;
            let d = dimacs(&w.x, &w.y, &w.z, &p)?;
            let mut rec = Record::default();
            for (k, e) in d.as_array().iter().enumerate() {
                rec.push(&format!("err{}", k + 1), format!("{e:e}"));
            }
            emit(out, &rec)?;
            Ok(EXIT_SOLUTION)
        }
        Command::Gen { mode, blocks, m, seed, out: path, solution, warm, perturb } => {
            let mode = match mode {
                ModeArg::StrongBoth => GenMode::StrongBoth,
                ModeArg::KnownOptimal => GenMode::KnownOptimal,
                ModeArg::WeakPrimal => GenMode::WeakPrimal,
                ModeArg::RayP => GenMode::RayP,
            };
            if m == 0 {
                return Err(CliError::DimensionMismatch("--m must be positive".into()));
            }
            let shape = ConeShape::from_signed_sizes(&blocks)?;
            let inst = generate_instance(&shape, m, seed, mode);
            write_file(&path, &write_sdpa(&inst.problem))?;
            let pl = &inst.planted;
            if let Some(f) = &solution {
                write_file(f, &WarmStartFile::from_solution(&pl.x, &pl.y, Some(&pl.z)).write())?;
            }
            let mut rec = Record::default();
            rec.push("problem", &path);
            rec.push("mode", mode.name());
            rec.push("seed", seed);
            if let Some(f) = &warm {
                match perturbed_start(&inst, perturb) {
                    Some((x, y)) => {
                        write_file(f, &WarmStartFile::from_solution(&x, &y, None).write())?;
                        rec.push("warm", f);
                    }
                    None => rec.push("warm", "unavailable"),
                }
            }
            if let Some(t) = pl.theta {
                rec.push("theta", format!("{t:e}"));
            }
            if let Some(f) = &pl.reducing_y {
                rec.push("reducing_y", f.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(","));
            }
            emit(out, &rec)?;
            Ok(EXIT_SOLUTION)
        }
    }
}

fn emit(out: &mut dyn Write, rec: &Record) -> CliResult<()> {
    out.write_all(rec.to_lines().as_bytes())
        .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_SOLUTION };
        }
    };
    match run(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_cli_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
