use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use growthlab::model::validate_params;
use growthlab::scenario::{list_presets, run_preset, run_scenario, RunOutcome, ScenarioConfig};
use growthlab::Error;

#[derive(Parser)]
#[command(name = "growthlab", version, about = "Growth model experiments: BGP, transitions, policy, data resale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file
    Run { config: PathBuf },
    /// Run a named preset
    Preset {
        name: String,
        /// Write here instead of <output root>/<preset name>
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List presets
    List,
    /// Check a scenario file without running it
    Validate { config: PathBuf },
}

fn report(outcome: RunOutcome) {
    println!("wrote {} files to {}", outcome.files.len(), outcome.dir.display());
    for f in outcome.files {
        println!("  {f}");
    }
}

fn validate(path: &Path) -> Result<(), Error> {
    let cfg = ScenarioConfig::load(path)?;
    let r = validate_params(&cfg.params);
    for w in &r.warnings {
        eprintln!("warning: {} ({})", w.name, w.detail);
    }
    r.into_result()?;
    println!("{}: ok ({} experiment)", path.display(), cfg.experiment.kind());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => run_scenario(config).map(report),
        Command::Preset { name, out } => run_preset(name, out.as_deref()).map(report),
        Command::List => {
            for p in list_presets() {
                println!("{:<20} {}", p.name, p.description);
            }
            Ok(())
        }
        Command::Validate { config } => validate(config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
