//! `rpr3`: forward and inverse kinematics of planar 3-RPR manipulators from
//! JSON problem files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rpr3_core::{classify_family, inverse_kinematics, solve_forward, sweep_fk, Error, SweepConfig};

mod problem;
mod report;
mod svg;

use problem::ProblemFile;
use report::{sets_match, to_json, ClassifyReport, IkReport, OracleReport, SolutionEntry, SolutionReport, SweepReport};

/// Oracle and pipeline agree when every mode matches within these.
const MATCH_POSITION_TOL: f64 = 1e-5;
const MATCH_ANGLE_TOL_DEG: f64 = 0.01;

#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            e if e.is_invalid_input() => Failure::Invalid(e.to_string()),
            Error::ContinuumOfSolutions => Failure::Invalid(e.to_string()),
            e => Failure::Internal(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "rpr3", version, about = "Kinematics of planar 3-RPR parallel manipulators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the forward kinematics.
    Fk(Common),
    /// Report the family and the singular orientations of a geometry.
    Classify(Common),
    /// Draw every assembly mode to an SVG file.
    Plot(Common),
    /// Forward kinematics by orientation sweep only.
    Oracle(Common),
    /// Leg lengths for the pose in the problem file.
    Ik(Common),
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON).
    file: PathBuf,
    /// Cross-check the solve against the orientation sweep.
    #[arg(long)]
    oracle: bool,
    /// Residual tolerance, scaled by 1 + rho_max^2.
    #[arg(long)]
    tol: Option<f64>,
    /// Sweep grid size.
    #[arg(long)]
    samples: Option<usize>,
    /// Output path. Reports go to standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sweep(problem: &ProblemFile, args: &Common) -> Result<(SweepConfig, Vec<SolutionEntry>), Failure> {
    let g = problem.geometry()?;
    let j = problem.joints()?;
    let opts = problem.fk_options(args.tol)?;
    let mut cfg = match args.samples.or(problem.options.samples) {
        Some(n) => SweepConfig::with_samples(n)?,
        None => SweepConfig::default(),
    };
    cfg.residual_tol = opts.residual_tol;
    let solutions = sweep_fk(&g, &j, &cfg).iter().map(SolutionEntry::from).collect();
    Ok((cfg, solutions))
}

fn fk(problem: &ProblemFile, args: &Common) -> Result<SolutionReport, Failure> {
    let g = problem.geometry()?;
    let j = problem.joints()?;
    let opts = problem.fk_options(args.tol)?;
    let solved = solve_forward(&g, &j, &opts)?;
    let class = classify_family(&g, opts.family_tol);
    let mut report = SolutionReport::new(&g, &j, &class, &solved, opts.degenerate_tol);
    if args.oracle || problem.options.oracle {
        let (cfg, solutions) = sweep(problem, args)?;
        let matches = sets_match(&report.solutions, &solutions, MATCH_POSITION_TOL, MATCH_ANGLE_TOL_DEG);
        report.oracle = Some(OracleReport { samples: cfg.samples, solutions, matches: Some(matches) });
    }
    Ok(report)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Fk(args) => {
            let problem = ProblemFile::load(&args.file)?;
            emit(&to_json(&fk(&problem, &args)?), args.out.as_deref())
        }
        Command::Classify(args) => {
            let problem = ProblemFile::load(&args.file)?;
            let g = problem.geometry()?;
            let j = problem.joints.map(|_| problem.joints()).transpose()?;
            let opts = problem.fk_options(args.tol)?;
            let class = classify_family(&g, opts.family_tol);
            emit(&to_json(&ClassifyReport::new(&g, j.as_ref(), &class, opts.degenerate_tol)), args.out.as_deref())
        }
        Command::Plot(args) => {
            let out = args.out.clone().ok_or_else(|| Failure::Invalid("plot needs --out <path>".into()))?;
            let problem = ProblemFile::load(&args.file)?;
            let report = fk(&problem, &args)?;
            emit(&svg::render(&problem.geometry()?, &report.solutions), Some(&out))
        }
        Command::Oracle(args) => {
            let problem = ProblemFile::load(&args.file)?;
            let (cfg, solutions) = sweep(&problem, &args)?;
            let report = SweepReport {
                version: report::VERSION.to_string(),
                oracle: OracleReport { samples: cfg.samples, solutions, matches: None },
            };
            emit(&to_json(&report), args.out.as_deref())
        }
        Command::Ik(args) => {
            let problem = ProblemFile::load(&args.file)?;
            let j = inverse_kinematics(&problem.geometry()?, &problem.pose()?);
            emit(&to_json(&IkReport::new(&j)), args.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
