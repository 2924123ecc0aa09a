use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::Parser;

use specinv_cli::{envelope, run_one, summary, write_artifacts, Command, ExperimentConfig};

/// Run spectral-invariance experiments from a TOML config.
#[derive(Parser, Debug)]
#[command(name = "specinv", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Experiment config (TOML). Defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Print the JSON report on stdout instead of the summary.
    #[arg(long)]
    json: bool,
    /// Also write CSV tables.
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    quiet: bool,
}

fn load(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::parse("")?,
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = o.clone();
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = load(cli)?;
    let commands: Vec<Command> = match cli.command {
        Command::All => Command::EACH.to_vec(),
        c => vec![c],
    };
    let mut all_pass = true;
    for cmd in commands {
        let start = Instant::now();
        let outcome = run_one(cmd, &cfg).with_context(|| format!("{} failed", cmd.name()))?;
        write_artifacts(&cfg.output.dir, &cfg, &outcome, start.elapsed().as_secs_f64(), cli.csv)?;
        if cli.json {
            println!("{}", serde_json::to_string_pretty(&envelope(&cfg, &outcome))?);
        } else if !cli.quiet {
            for line in summary(&outcome) {
                println!("{line}");
            }
        }
        all_pass &= outcome.pass;
    }
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
