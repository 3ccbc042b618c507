use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hypflux::cli::{self, EXIT_OK};

#[derive(Parser)]
#[command(name = "hypflux", version, about = "Finite-volume solver and verification harness for hyperbolic conservation laws")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write snapshots, metadata, ledger and report.
    Run {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Run every refinement level of a study and write the convergence table.
    Study {
        spec: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Levels run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Parse and validate a configuration without running it.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_PARSE as u8 } else { 0 });
        }
    };
    let code = match args.command {
        Command::Run { config, output_dir } => cli::run_single(&config, output_dir.as_deref()).map(|r| {
            println!(
                "{} / {}: {} cells, {} steps of {:.6e}, {}",
                r.metadata.system,
                r.metadata.scheme,
                r.metadata.n_cells,
                r.metadata.n_steps,
                r.metadata.dt,
                if r.pass { "all invariants hold" } else { "invariant failure" }
            );
            if let Some(e) = &r.errors {
                println!("cone L2 error {:.6e}", e.err_l2);
            }
            r.exit_code()
        }),
        Command::Study { spec, output_dir, jobs } => cli::run_study(&spec, output_dir.as_deref(), jobs).map(|r| {
            print!("{}", r.table.to_csv());
            println!("{}", if r.pass { "study passed" } else { "study failed" });
            r.exit_code()
        }),
        Command::Validate { config } => cli::validate(&config).map(|c| {
            println!("{}: ok", c.problem.system.name());
            EXIT_OK
        }),
    };
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
