//! Command-line driver for the Surface-17 memory workbench.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric
//! failure.

mod config;
mod generate;

use clap::{Parser, Subcommand};
use surfmem::Error;

#[derive(Parser, Debug)]
#[command(name = "surfmem", version, about = "Surface-17 quantum memory workbench")]
struct Cli {
    /// Cap worker threads for generation, decoding and evaluation.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    Generate(generate::Args),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = i32::from(err.use_stderr());
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: thread pool: {err}");
            std::process::exit(1);
        }
    }
    let result = match &cli.command {
        Command::Generate(args) => generate::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::InvalidQubit(_) | Error::Shape(_) => 1,
        Error::Io { .. } | Error::CorruptRecord { .. } | Error::FormatVersion { .. } => 2,
        Error::Numeric(_) => 3,
    }
}
