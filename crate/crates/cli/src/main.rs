use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use depthtune_cli::commands::{cmd_compare, cmd_plant_show, cmd_simulate, cmd_tune, read_theta, SimMode};
use depthtune_cli::{CliError, RunSpec};

/// Fuzzy PID depth-control simulation and constrained PSO tuning.
#[derive(Debug, Parser)]
#[command(name = "depthtune", version)]
struct Cli {
    /// TOML run configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides `pso.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plant inspection.
    Plant {
        #[command(subcommand)]
        action: PlantAction,
    },
    /// Simulate one controller arm.
    Simulate {
        #[arg(long, value_enum, default_value_t = Mode::Fuzzy)]
        mode: Mode,
        /// JSON tuning vector; defaults to `controller.baseline`.
        #[arg(long)]
        theta: Option<PathBuf>,
    },
    /// Tune the six fuzzy PID parameters with the particle swarm.
    Tune,
    /// Compare PID, fuzzy PID and tuned fuzzy PID under identical conditions.
    Compare {
        /// JSON tuning vector for the tuned arm; tunes inline when absent.
        #[arg(long)]
        theta: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum PlantAction {
    /// Print transfer-function coefficients as JSON.
    Show,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Pid,
    Fuzzy,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut spec = RunSpec::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        spec.pso.seed = seed;
    }
    if let Some(out) = cli.out {
        spec.output.dir = out;
    }
    // reject a bad configuration before any subcommand does work
    spec.experiment()?;
    if cli.dump_config {
        print!("{}", spec.to_toml()?);
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(CliError::Config(
            "no subcommand given (plant show | simulate | tune | compare)".into(),
        ));
    };
    let report = |files: &[PathBuf]| {
        for f in files {
            eprintln!("wrote {}", f.display());
        }
    };
    match command {
        Command::Plant {
            action: PlantAction::Show,
        } => println!("{}", cmd_plant_show(&spec)?),
        Command::Simulate { mode, theta } => {
            let theta = theta.as_deref().map(read_theta).transpose()?;
            let mode = match mode {
                Mode::Pid => SimMode::Pid,
                Mode::Fuzzy => SimMode::Fuzzy,
            };
            let (_, files) = cmd_simulate(&spec, mode, theta.as_ref())?;
            report(&files);
        }
        Command::Tune => {
            let (outcome, files) = cmd_tune(&spec)?;
            eprintln!(
                "baseline fitness {:.6}, best fitness {:.6} after {} evaluations",
                outcome.baseline.score, outcome.best_fitness, outcome.log.evaluations
            );
            if outcome.dominance_failures > 0 {
                eprintln!(
                    "note: {} energy-violating candidates scored at or below the baseline fitness",
                    outcome.dominance_failures
                );
            }
            report(&files);
        }
        Command::Compare { theta } => {
            let theta = theta.as_deref().map(read_theta).transpose()?;
            let (arms, files) = cmd_compare(&spec, theta.as_ref())?;
            for a in &arms {
                eprintln!(
                    "{:<10} itae {:.5}  ts {:.3}  os {:.4}  eu {:.1}  sr {:.4}",
                    a.name,
                    a.report.itae,
                    a.report.settling_time,
                    a.report.overshoot,
                    a.report.energy,
                    a.report.saturation_rate
                );
            }
            report(&files);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
