//! Command-line front end: `analyze`, `dof` and `orbit`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! manifest, schema, argument or I/O problems, 3 for expression syntax and
//! evaluation-domain problems.

mod analyze;
mod manifest;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::expr::{EvalError, ParseError, DEFAULT_SEED};
use crate::frames::{orbit_invariant, same_orbit, Frame, FrameError, SubgroupSpec};
use crate::geometry::GeometryError;
use crate::reductions::ReductionError;

pub use analyze::{
    analyze_manifest, dof_entry, Check, Classification, ConnectionCounts, DofEntry, Extracted, Report, Settings,
};
pub use manifest::{ChartSpec, Options, Scene, SceneManifest};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_MANIFEST: i32 = 2;
pub const EXIT_EXPRESSION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("in expression `{text}`: {error}")]
    Expression { text: String, error: ParseError },
    #[error("domain error: {0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Manifest(_) | CliError::Usage(_) => EXIT_MANIFEST,
            CliError::Expression { .. } | CliError::Domain(_) => EXIT_EXPRESSION,
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> CliError {
        CliError::Domain(e.to_string())
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> CliError {
        match e {
            GeometryError::Eval(e) => e.into(),
            GeometryError::SingularMetric
            | GeometryError::SingularFrame
            | GeometryError::NonPositiveFactor
            | GeometryError::NonPositiveDensity => CliError::Domain(e.to_string()),
            _ => CliError::Manifest(e.to_string()),
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> CliError {
        match e {
            ReductionError::Geometry(e) => e.into(),
            ReductionError::Eval(e) => e.into(),
            _ => CliError::Manifest(e.to_string()),
        }
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> CliError {
        match e {
            FrameError::SingularFrame { .. } | FrameError::SingularMatrix { .. } => CliError::Domain(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "geored",
    version,
    about = "Frame-bundle reductions and connection checks on a chart"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every applicable check on a scene manifest and emit a JSON report.
    Analyze {
        manifest: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Print the dimension ledger of a reduction GL(n) -> H.
    Dof {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        group: String,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Decide whether two bases lie in one H-orbit.
    Orbit {
        /// Row-major entries, separated by commas, semicolons or whitespace.
        #[arg(long)]
        basis1: String,
        #[arg(long)]
        basis2: String,
        #[arg(long)]
        group: String,
    },
}

/// Overrides applied on top of a manifest's `options`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyzeOptions {
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub seed: u64,
}

impl Default for AnalyzeOptions {
    fn default() -> AnalyzeOptions {
        AnalyzeOptions {
            samples: None,
            tol: None,
            seed: DEFAULT_SEED,
        }
    }
}

/// Serializes a report as pretty JSON with a trailing newline.
pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_MANIFEST } else { EXIT_PASS };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Analyze {
            manifest,
            report,
            samples,
            tol,
            seed,
        } => {
            let text = fs::read_to_string(&manifest).map_err(|source| CliError::Io {
                path: manifest.clone(),
                source,
            })?;
            let result = analyze_manifest(&text, &AnalyzeOptions { samples, tol, seed })?;
            let json = report_json(&result);
            match report {
                Some(path) => fs::write(&path, json).map_err(|source| CliError::Io { path, source })?,
                None => std::io::stdout()
                    .write_all(json.as_bytes())
                    .map_err(|source| CliError::Io {
                        path: PathBuf::from("<stdout>"),
                        source,
                    })?,
            }
            Ok(if result.all_pass { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
        Command::Dof { n, group, json } => {
            let entry = dof_entry(&group, n)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&entry).expect("dof serializes"));
            } else {
                print!("{}", dof_text(&entry));
            }
            Ok(EXIT_PASS)
        }
        Command::Orbit { basis1, basis2, group } => {
            let spec = SubgroupSpec::from_str(&group).map_err(CliError::from)?;
            let b1 = parse_basis(&basis1)?;
            let b2 = parse_basis(&basis2)?;
            if b1.dim() != b2.dim() {
                return Err(CliError::Usage(format!(
                    "bases have dimensions {} and {}",
                    b1.dim(),
                    b2.dim()
                )));
            }
            let verdict = same_orbit(&b1, &b2, &spec)?;
            let invariant = orbit_invariant(&b1, &spec)?;
            println!("group: {spec}");
            println!("same_orbit: {verdict}");
            println!("invariant: {invariant}");
            Ok(EXIT_PASS)
        }
    }
}

/// Human-readable dimension ledger.
pub fn dof_text(entry: &DofEntry) -> String {
    let t = &entry.table;
    let c = &entry.connections;
    let mut out = format!(
        "group: {}\nn: {}\nd: {}\nD-d: {}\nconnections: {}\npreserving: {}\nsymmetric: {}\nsymmetric_preserving: {}\n",
        t.group, t.n, t.dim_h, t.dim_quotient, c.all, c.preserving, c.symmetric, c.symmetric_preserving
    );
    for s in &t.stages {
        out.push_str(&format!("stage {} -> {}: {}\n", s.from, s.to, s.dim_quotient));
    }
    out.push_str(&format!("notes: {}\n", t.notes));
    out
}

/// Parses a square row-major matrix from text such as `1,0;0,1`.
pub fn parse_basis(text: &str) -> Result<Frame, CliError> {
    let values = text
        .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("`{s}` is not a number")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let n = (values.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != values.len() {
        return Err(CliError::Usage(format!(
            "{} entries do not form a square matrix",
            values.len()
        )));
    }
    Ok(Frame::from_row_major(n, &values)?)
}
