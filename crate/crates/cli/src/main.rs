use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use darkprobe_cli::{fixtures, load_config, run_experiment, CliError};

#[derive(Parser)]
#[command(name = "darkprobe", version, about = "Pulsed probe reconstruction experiments")]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides `seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the named parameter sets.
    ListFixtures,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = match cli.threads {
        Some(0) => return Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
            n
        }
        None => rayon::current_num_threads(),
    };
    match cli.command {
        Command::ListFixtures => {
            print!("{}", fixtures::render_catalog());
            Ok(())
        }
        Command::Run {
            config,
            output_dir,
            seed,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(d) = output_dir {
                cfg.output_dir = Some(d);
            }
            let dir = cfg
                .output_dir
                .clone()
                .unwrap_or_else(|| PathBuf::from("output").join(cfg.experiment.name()));
            let out = run_experiment(&cfg, &dir, threads)?;
            for w in &out.report.warnings {
                eprintln!("warning: {w}");
            }
            for f in &out.files {
                println!("{}", f.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
