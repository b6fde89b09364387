use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mof_cli::{append_rows, load_config, run, sweep, kernels, RunError, CSV_HEADER};

#[derive(Parser)]
#[command(name = "mof", about = "MOF advection benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one config file; trailing key=value pairs override it.
    Run {
        config: PathBuf,
        overrides: Vec<String>,
    },
    /// Run every .cfg file in a directory.
    Sweep { dir: PathBuf },
    /// Time analytic cuts against polyhedron clipping.
    BenchKernels {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main_inner(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Run { config, overrides } => {
            let configs = load_config(&config, &overrides)?;
            println!("{CSV_HEADER}");
            for cfg in &configs {
                let r = run(cfg)?;
                append_rows(&cfg.output, std::slice::from_ref(&r))?;
                println!("{}", r.csv_row());
            }
        }
        Command::Sweep { dir } => {
            let rows = sweep(&dir)?;
            println!("{CSV_HEADER}");
            for r in &rows {
                println!("{}", r.csv_row());
            }
        }
        Command::BenchKernels { samples, seed } => {
            let t = kernels::bench_kernels(samples, seed)?;
            print!("{}", t.csv());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
