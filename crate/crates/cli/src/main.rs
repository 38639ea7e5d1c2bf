mod args;
mod commands;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::{validate_threads, Cli, Command};
use commands::{status_for, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match &cli.command {
        Command::Sample(a) => a.common.threads,
        Command::Extinction(a) => a.common.threads,
        Command::Sweep(a) => a.common.threads,
        Command::Verify(a) => a.common.threads,
        Command::Bound(_) => None,
    };
    let result = validate_threads(threads).and_then(|_| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| hardcore::Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| match &cli.command {
            Command::Sample(a) => commands::cmd_sample(a),
            Command::Extinction(a) => commands::cmd_extinction(a),
            Command::Sweep(a) => commands::cmd_sweep(a),
            Command::Verify(a) => commands::cmd_verify(a),
            Command::Bound(a) => commands::cmd_bound(a),
        })
    });
    let status = match result {
        Ok(status) => status,
        Err(e) => {
            let status = status_for(&e);
            eprintln!("error: {e}");
            if status == Status::NonTermination {
                eprintln!(
                    "hint: the sampler did not terminate; the intensity is probably past the \
                     artificial phase transition for this method"
                );
            }
            status
        }
    };
    ExitCode::from(status as u8)
}
