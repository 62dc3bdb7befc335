use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cli_experiments::{
    config_from_toml, default_config, preset_description, run_to_dir, RunConfig, PRESET_NAMES,
};

#[derive(Parser)]
#[command(name = "tasep-lab", about = "Experiment runner for the ring exclusion / last-passage laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Master seed; replica seeds derive from it deterministically.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent replicas.
    #[arg(long)]
    replicas: Option<u64>,
    /// Worker threads (0 = TASEP_LAB_THREADS env or all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for samples.csv / summary.json and auxiliary CSVs.
    #[arg(long)]
    out_dir: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// List the available presets with a one-line description each.
    Presets,
    /// Run from a TOML configuration file.
    Run {
        #[arg(long)]
        config: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run a named preset with its default parameters.
    Preset {
        name: String,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn apply(cfg: &mut RunConfig, common: &CommonOpts) {
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(replicas) = common.replicas {
        cfg.replicas = replicas;
    }
    if let Some(threads) = common.threads {
        cfg.threads = threads;
    }
    if let Some(out_dir) = &common.out_dir {
        cfg.out_dir = out_dir.clone();
    }
}

fn execute(cfg: &RunConfig) -> ExitCode {
    match run_to_dir(cfg) {
        Ok(outcome) => {
            for check in &outcome.checks {
                println!(
                    "[{}] {}: {:.6} {} {:.6}",
                    if check.pass { "pass" } else { "FAIL" },
                    check.name,
                    check.value,
                    check.direction,
                    check.threshold
                );
            }
            println!("{}: {} ({} samples, artifacts in {})", cfg.preset, outcome.status, outcome.samples.len(), cfg.out_dir);
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            for name in PRESET_NAMES {
                println!("{name}: {}", preset_description(name).unwrap());
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, common } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(err) => {
                    eprintln!("error: cannot read {config}: {err}");
                    return ExitCode::FAILURE;
                }
            };
            let mut cfg = match config_from_toml(&text) {
                Ok(c) => c,
                Err(err) => {
                    eprintln!("error: {err}");
                    return ExitCode::FAILURE;
                }
            };
            apply(&mut cfg, &common);
            execute(&cfg)
        }
        Command::Preset { name, common } => {
            let mut cfg = match default_config(&name) {
                Ok(c) => c,
                Err(err) => {
                    eprintln!("error: {err}");
                    return ExitCode::FAILURE;
                }
            };
            apply(&mut cfg, &common);
            execute(&cfg)
        }
    }
}
