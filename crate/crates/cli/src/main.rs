use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use multimode_hom_cli::{run, Experiment, RunConfig, RunOptions};

/// Multimode Hong-Ou-Mandel interference simulator.
#[derive(Debug, Parser)]
#[command(name = "mmhom", version)]
struct Args {
    experiment: Experiment,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "mmhom-out")]
    out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = RunConfig::load(&args.config).and_then(|config| {
        run(
            &config,
            &RunOptions {
                experiment: args.experiment,
                out_dir: args.out.clone(),
                seed: args.seed,
            },
        )
    });
    match result {
        Ok(summary) => {
            for path in &summary.outputs {
                println!("wrote {}", path.display());
            }
            println!("wrote {}", summary.metadata.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mmhom: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
