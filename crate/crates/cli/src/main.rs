use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use shadowdrift::schemes::catalog;
use shadowdrift_cli::{load_config, run_config};

/// Splitting-scheme experiments for quantum Hamiltonian dynamics
#[derive(Parser, Debug)]
#[command(name = "shadowdrift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiment described by a JSON config
    Run {
        config: PathBuf,
        /// output directory (overrides the config)
        #[arg(long)]
        out: Option<PathBuf>,
        /// seed for random states and instances (overrides the config)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the scheme catalog with nominal orders
    ListSchemes,
    /// Print the library version
    Version,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::ListSchemes => {
            for entry in catalog() {
                println!("{entry}");
            }
            ExitCode::SUCCESS
        }
        Command::Version => {
            println!("shadowdrift {}", shadowdrift::VERSION);
            ExitCode::SUCCESS
        }
        Command::Run { config, out, seed } => {
            let result = load_config(&config, seed).and_then(|cfg| run_config(&cfg, out.as_deref()));
            match result {
                Ok(a) => {
                    for p in a.csv.iter().chain(&a.sidecar) {
                        println!("wrote {}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
            }
        }
    }
}
