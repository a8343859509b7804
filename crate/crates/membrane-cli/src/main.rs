//! Batch entry point for the composite membrane solver.
//!
//! ```text
//! membrane <solve|sweep|diagnose|weiss|blowup|exact> --config <path>
//!          [--out <dir>] [--seed <u64>] [--threads <k>]
//! ```
//!
//! Exit codes: 0 ok, 1 config error, 2 numerical non-convergence.

mod commands;
mod config;
mod output;

use commands::{CmdError, Ctx};
use config::RunConfig;
use output::OutDir;
use std::process::ExitCode;

const USAGE: &str = "usage: membrane <solve|sweep|diagnose|weiss|blowup|exact> \
--config <path> [--out <dir>] [--seed <u64>] [--threads <k>]";

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::from(0),
        Err(CmdError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CmdError::Numerics(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<(), CmdError> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first().cloned() else {
        return Err(CmdError::Config(USAGE.into()));
    };
    let mut config_path: Option<String> = None;
    let mut out_dir: Option<String> = None;
    let mut seed: Option<u64> = None;
    let mut threads: usize = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut it = args.iter().skip(1);
    while let Some(flag) = it.next() {
        let mut value = |name: &str| {
            it.next()
                .cloned()
                .ok_or_else(|| CmdError::Config(format!("{name} needs a value\n{USAGE}")))
        };
        match flag.as_str() {
            "--config" => config_path = Some(value("--config")?),
            "--out" => out_dir = Some(value("--out")?),
            "--seed" => {
                seed = Some(
                    value("--seed")?
                        .parse()
                        .map_err(|_| CmdError::Config("--seed: bad integer".into()))?,
                )
            }
            "--threads" => {
                threads = value("--threads")?
                    .parse()
                    .map_err(|_| CmdError::Config("--threads: bad integer".into()))?;
            }
            other => return Err(CmdError::Config(format!("unknown flag '{other}'\n{USAGE}"))),
        }
    }
    let config_path = config_path.ok_or_else(|| CmdError::Config(format!("--config is required\n{USAGE}")))?;
    let cfg = RunConfig::load(std::path::Path::new(&config_path)).map_err(CmdError::from)?;
    let out_path = out_dir
        .or_else(|| cfg.get("output.dir").map(str::to_string))
        .unwrap_or_else(|| "out".to_string());
    let out = OutDir::create(std::path::Path::new(&out_path))?;
    let mut ctx = Ctx { cfg, out, threads: threads.max(1), seed_override: seed };
    match command.as_str() {
        "solve" => commands::cmd_solve(&mut ctx),
        "sweep" => commands::cmd_sweep(&mut ctx),
        "diagnose" => commands::cmd_diagnose(&mut ctx),
        "weiss" => commands::cmd_weiss(&mut ctx),
        "blowup" => commands::cmd_blowup(&mut ctx),
        "exact" => commands::cmd_exact(&mut ctx),
        other => Err(CmdError::Config(format!("unknown subcommand '{other}'\n{USAGE}"))),
    }
}
