use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bicutan::harness::commands::{self, Overrides, StatsCommand};
use bicutan::harness::{ExperimentReport, HarnessError};
use bicutan::schemes::SchemeId;

#[derive(Parser)]
#[command(name = "bicutan", version, about = "Roundabout traffic-scheme experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured scheme and write per-trip records.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        scheme: Option<SchemeId>,
        /// Base seed; replicate i uses seed + i.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare schemes with ANOVA and Duncan's test.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "t0,t1,t2,t3,t4,t5")]
        schemes: Vec<SchemeId>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit delay and speed against volume increases given in percent.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        scheme: Vec<SchemeId>,
        #[arg(long, value_delimiter = ',', default_value = "0,10,50,100")]
        volumes: Vec<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test simulated runs against an observation CSV.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        observed: PathBuf,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Statistics on external CSV data.
    Stats {
        #[arg(value_enum)]
        test: StatsKind,
        #[arg(long)]
        input: PathBuf,
        /// Treat the input as `block,treatment,value` rows.
        #[arg(long)]
        blocked: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StatsKind {
    Anova,
    Dmrt,
    Regress,
}

fn finish(report: ExperimentReport) -> Result<(), HarnessError> {
    print!("{}", report.render_text());
    Ok(())
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let load = |config: &Path, scheme, seed, reps| {
        commands::load(config, &Overrides { scheme, base_seed: seed, replications: reps })
    };
    match cli.command {
        Command::Simulate { config, scheme, seed, reps, out } => {
            finish(commands::simulate(&load(&config, scheme, seed, reps)?, out.as_deref())?)
        }
        Command::Compare { config, schemes, seed, reps, out } => {
            finish(commands::compare(&load(&config, None, seed, reps)?, &schemes, out.as_deref())?)
        }
        Command::Sweep { config, scheme, volumes, seed, reps, out } => {
            let sc = load(&config, None, seed, reps)?;
            let schemes = if scheme.is_empty() { vec![sc.config.scheme] } else { scheme };
            finish(commands::sweep(&sc, &schemes, &volumes, out.as_deref())?)
        }
        Command::Validate { config, observed, reps, out } => {
            finish(commands::validate(&load(&config, None, None, reps)?, &observed, out.as_deref())?)
        }
        Command::Stats { test, input, blocked, out } => {
            let cmd = match (test, blocked) {
                (StatsKind::Anova, false) => StatsCommand::Anova,
                (StatsKind::Anova, true) => StatsCommand::AnovaBlocked,
                (StatsKind::Dmrt, _) => StatsCommand::Dmrt,
                (StatsKind::Regress, _) => StatsCommand::Regress,
            };
            let io = |p: &Path, e: std::io::Error| HarnessError::Io { path: p.display().to_string(), msg: e.to_string() };
            let text = commands::stats(cmd, &std::fs::read(&input).map_err(|e| io(&input, e))?)?;
            print!("{text}");
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|e| io(&dir, e))?;
                let p = dir.join("stats.txt");
                std::fs::write(&p, &text).map_err(|e| io(&p, e))?;
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
