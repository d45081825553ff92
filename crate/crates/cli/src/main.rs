//! `rcf`: command-line front end for the `rcf-core` algorithms.
//!
//! Exit codes: 0 success, 2 usage error, 3 domain error, 4 undetermined
//! certification (the partial certificate is still written), 5 resource limit.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod error;
mod record;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command, Format};
use commands::Outcome;
use error::{CliError, CliResult};

fn run(cli: &Cli) -> CliResult<Option<String>> {
    if cli.common.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    let start = Instant::now();
    let Outcome {
        mut record,
        undetermined,
    } = match &cli.command {
        Command::Lyapunov(a) => commands::cmd_lyapunov(a)?,
        Command::Alphac(a) => commands::cmd_alphac(a)?,
        Command::Lp(a) => commands::cmd_lp(a)?,
        Command::Sample(a) => commands::cmd_sample(a)?,
        Command::Cdf(a) => commands::cmd_cdf(a)?,
        Command::Gw(a) => commands::cmd_gw(a)?,
        Command::Shorted(a) => commands::cmd_shorted(a)?,
    };
    let elapsed = start.elapsed().as_secs_f64();
    record.wall_time_s = Some(elapsed);
    record.param("threads", cli.common.threads);
    log::info!("{} finished in {elapsed:.3}s", record.subcommand);

    let mut out: Box<dyn Write> = match &cli.common.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    match cli.common.format {
        Format::Csv => record.write_csv(&mut out)?,
        Format::Json => record.write_json(&mut out)?,
    }
    out.flush()?;
    Ok(undetermined)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(reason)) => {
            let err = CliError::Undetermined(reason);
            eprintln!("rcf: {err}");
            err.exit_code()
        }
        Err(err) => {
            eprintln!("rcf: {err}");
            err.exit_code()
        }
    }
}
