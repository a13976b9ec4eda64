//! The `luce` command-line tool.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure
//! (tolerance not met, singular system), 3 precondition violation.

pub mod args;
mod commands;
pub mod manifest;
pub mod output;

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;

use args::Cli;
use manifest::{replay_argv, RunManifest};
use output::Sink;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] luce::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use luce::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Model(e) => match e {
                E::Precondition(_) | E::NotNormalized { .. } | E::TooLarge { .. } => EXIT_PRECONDITION,
                E::ToleranceNotMet(_) | E::Singular(_) => EXIT_NUMERICAL,
                _ => EXIT_USAGE,
            },
        }
    }
}

/// Settings shared by every subcommand.
pub(crate) struct Context {
    pub seed: u64,
    pub exec: luce::Execution,
    pub tolerances: BTreeMap<String, f64>,
}

fn time_seed() -> u64 {
    let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
    // fold the high bits in so consecutive runs differ in every position
    (nanos as u64) ^ ((nanos >> 64) as u64).rotate_left(17)
}

/// Runs the tool on `argv` (including the program name) and returns the
/// exit code.
pub fn run(argv: Vec<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let started = SystemTime::now();
    let clock = Instant::now();
    let seed = cli.seed.unwrap_or_else(time_seed);
    let _ = writeln!(stderr, "luce: seed = {seed}");
    if let Some(t) = cli.threads {
        if t == 0 {
            let _ = writeln!(stderr, "luce: --threads must be at least 1");
            return EXIT_USAGE;
        }
        luce::par::set_threads(t);
    }
    let exec = if cli.sequential { luce::Execution::Sequential } else { luce::Execution::Parallel };
    let mut ctx = Context { seed, exec, tolerances: BTreeMap::new() };

    let mut sink = Sink::new(cli.format, Box::new(&mut *stdout));
    let result = commands::dispatch(&cli.command, &mut ctx, &mut sink, stderr);
    let result = result.and_then(|()| sink.finish().map_err(CliError::from));
    let code = match &result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "luce: error: {e}");
            e.exit_code()
        }
    };

    if !cli.no_manifest {
        let manifest = RunManifest {
            tool: "luce".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: cli.command.name().into(),
            argv: argv.clone(),
            replay: replay_argv(&argv, seed),
            seed,
            threads: cli.threads,
            parallel: exec.is_parallel(),
            tolerances: ctx.tolerances,
            started_unix_ms: started.duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0),
            wall_clock_seconds: clock.elapsed().as_secs_f64(),
            exit_code: code,
        };
        let path = cli.manifest.clone().unwrap_or_else(|| RunManifest::default_path(cli.command.name(), seed));
        if let Err(e) = manifest.write(&path) {
            let _ = writeln!(stderr, "luce: warning: could not write manifest {}: {e}", path.display());
        }
    }
    code
}
