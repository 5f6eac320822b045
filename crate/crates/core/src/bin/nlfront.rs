use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nonlocal_front::cli::{self, Manifest, RunConfig};

/// Experiments for the one-sided nonlocal Fisher-KPP free-boundary problem.
#[derive(Parser)]
#[command(name = "nlfront", version)]
struct Args {
    /// JSON config file; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the convolution.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Config override `key.path=value`; repeatable.
    #[arg(long = "set", global = true)]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    SimulateFb,
    SimulateHalfline,
    SteadyState,
    Semiwave,
    Rates {
        /// Trajectory CSV to fit (overrides `fit.trajectory`).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    Verify {
        /// Flip the sign of the boundary flux; the comparison suite must fail.
        #[arg(long)]
        mutate: bool,
    },
    /// Runs a named preset.
    Scenario { name: String },
}

fn load(args: &Args) -> nonlocal_front::Result<RunConfig> {
    let mut config = match (&args.command, &args.config) {
        (_, Some(path)) => RunConfig::from_file(path)?,
        (Command::Scenario { name }, None) => cli::preset(name)?,
        _ => RunConfig::default(),
    };
    if let Command::Scenario { name } = &args.command {
        config.scenario = Some(name.clone());
    }
    for o in &args.overrides {
        config.set(o)?;
    }
    if let Some(out) = &args.out {
        config.out = out.clone();
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.threads.is_some() {
        config.threads = args.threads;
    }
    if let Command::Rates { input: Some(p) } = &args.command {
        config.fit.trajectory = Some(p.clone());
    }
    Ok(config)
}

fn dispatch(args: &Args) -> nonlocal_front::Result<Manifest> {
    let config = load(args)?;
    config.validate()?;
    cli::init_threads(config.threads);
    match &args.command {
        Command::SimulateFb => cli::simulate_fb(&config),
        Command::SimulateHalfline => cli::simulate_halfline(&config),
        Command::SteadyState => cli::steady_state(&config),
        Command::Semiwave => cli::semiwave(&config),
        Command::Rates { .. } => cli::rates(&config),
        Command::Verify { mutate } => {
            let (m, report) = cli::verify(&config, *mutate)?;
            print!("{}", report.render());
            Ok(m)
        }
        Command::Scenario { .. } => cli::run_scenario(&config),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match dispatch(&args) {
        Ok(m) => {
            println!("{}", serde_json::to_string_pretty(&m.results).unwrap_or_default());
            println!("wrote {} files to {}", m.files.len(), m.config.out.display());
            if m.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("nlfront: {} reported failures", m.command);
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("nlfront: {e}");
            ExitCode::from(2)
        }
    }
}
