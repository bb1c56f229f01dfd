//! Batch experiment driver.
//!
//! ```text
//! friction <bounds|simulate|stencil|optimize|scaling> <config-path>
//! ```
//!
//! Configs are flat `key = value` files; every run is fully reproducible
//! from the config alone. Exit codes: 0 success, 2 config error, 3
//! assertion/property failure. `FRICTION_WORKERS` overrides the worker
//! count; nothing else is read from the environment.

mod commands;
mod config;
mod report;
mod svg;

use std::fmt;

pub enum CliError {
    /// Bad invocation, unreadable or invalid config, unwritable output.
    Config(String),
    /// A checked property failed on real data.
    Check(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Check(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Check(msg) => write!(f, "check failed: {msg}"),
        }
    }
}

const USAGE: &str = "usage: friction <bounds|simulate|stencil|optimize|scaling> <config-path>";

fn run() -> Result<(), CliError> {
    if let Ok(workers) = std::env::var("FRICTION_WORKERS") {
        let n: usize = workers.parse().map_err(|_| {
            CliError::Config(format!("FRICTION_WORKERS must be a count, got `{workers}`"))
        })?;
        if n >= 1 {
            // A second initialization in the same process is harmless.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }

    let args: Vec<String> = std::env::args().collect();
    if args.len() != 3 {
        return Err(CliError::Config(USAGE.into()));
    }
    let cfg = config::Config::load(&args[2])?;
    match args[1].as_str() {
        "bounds" => commands::bounds::run(&cfg),
        "simulate" => commands::simulate::run(&cfg),
        "stencil" => commands::stencil::run(&cfg),
        "optimize" => commands::optimize::run(&cfg),
        "scaling" => commands::scaling::run(&cfg),
        other => Err(CliError::Config(format!(
            "unknown subcommand `{other}`\n{USAGE}"
        ))),
    }
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(err.exit_code());
        }
    }
}
