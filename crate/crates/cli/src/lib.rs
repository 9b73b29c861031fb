//! `glassey-lab`: reproducible experiments over the radial wave laboratory.
//!
//! Exit codes: 0 success, 2 precondition or usage error, 3 assertion
//! failure, 1 internal error.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Arg, ArgAction, Command};
use glassey_core::LabError;

use crate::config::{flag_name, schema, RunConfig, SUBCOMMANDS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_ASSERTION: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("assertion failed: {0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => EXIT_ASSERTION,
            CliError::Lab(e) => match e {
                LabError::PreconditionViolation(_)
                | LabError::HorizonMismatch { .. }
                | LabError::SupportOverflow { .. }
                | LabError::RangeViolation { .. }
                | LabError::DegenerateInput(_)
                | LabError::NonIntegrable(_)
                | LabError::Parse(_) => EXIT_PRECONDITION,
                LabError::Divergence { .. } | LabError::InsufficientData(_) => EXIT_ASSERTION,
                LabError::NonFinite { .. } | LabError::StepUnderflow { .. } | LabError::Io(_) => EXIT_INTERNAL,
            },
        }
    }
}

pub fn command() -> Command {
    let mut cmd = Command::new("glassey-lab")
        .about("Radial semilinear wave experiments")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for sub in SUBCOMMANDS {
        let mut sc = Command::new(sub).arg(
            Arg::new("config").long("config").value_name("FILE").help("flat key = value config file"),
        );
        for k in schema(sub) {
            sc = sc.arg(
                Arg::new(k.name)
                    .long(flag_name(k.name))
                    .value_name("VALUE")
                    .action(ArgAction::Set)
                    .help(k.help),
            );
        }
        cmd = cmd.subcommand(sc);
    }
    cmd
}

/// Runs one invocation, writing diagnostics to `err`. Returns the exit code.
pub fn run_with<I, T>(argv: I, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_PRECONDITION,
            };
            if code == EXIT_OK {
                let _ = e.print();
            } else {
                let _ = write!(err, "{}", e.render());
            }
            return code;
        }
    };
    let (sub, sm) = matches.subcommand().expect("subcommand required");
    let flags: Vec<(String, String)> = schema(sub)
        .iter()
        .filter_map(|k| sm.get_one::<String>(k.name).map(|v| (k.name.to_owned(), v.clone())))
        .collect();
    let file = sm.get_one::<String>("config").map(PathBuf::from);
    let cfg = match RunConfig::resolve(sub, file.as_deref(), &flags) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return e.exit_code();
        }
    };
    match execute(&cfg) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            let _ = writeln!(err, "parameters: {} {}", cfg.subcommand, cfg.summary());
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stderr())
}

/// Echoes the resolved config to the output directory, then runs the
/// subcommand on a pool of `jobs` threads.
pub fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    let jobs = cfg.usize("jobs")?;
    if jobs == 0 {
        return Err(LabError::PreconditionViolation("jobs must be >= 1".into()).into());
    }
    let out = PathBuf::from(cfg.raw("out"));
    std::fs::create_dir_all(&out).map_err(LabError::from)?;
    std::fs::write(out.join("config.txt"), cfg.render()).map_err(LabError::from)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| LabError::PreconditionViolation(format!("thread pool: {e}")))?;
    pool.install(|| commands::dispatch(cfg, &out))
}
