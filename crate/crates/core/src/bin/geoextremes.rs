use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geoextremes::experiment::{exit_code, list_experiments, find, run_acceptance, run_experiment, ExperimentSpec, Scale};

#[derive(Parser)]
#[command(name = "geoextremes", version, about = "Exceedance processes of Poisson point processes and their Poisson limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config (or a catalog id) and write its result bundle.
    Run {
        /// Path to a TOML config, or the id of a catalog entry.
        spec: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replicates: Option<usize>,
        /// Output directory; defaults to `output_dir` of the config, then `out/<id>`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum, default_value_t = Scale::Full)]
        scale: Scale,
    },
    /// List the built-in experiments.
    List {
        /// Print the config of one entry instead.
        #[arg(long)]
        config: Option<String>,
    },
    /// Run the acceptance suite and print a pass/fail table.
    Check {
        #[arg(long, value_enum, default_value_t = Scale::Full)]
        scale: Scale,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn fail(err: geoextremes::Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code(&err) as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { spec, seed, replicates, out, workers, scale } => {
            let path = PathBuf::from(&spec);
            let loaded = if path.exists() {
                ExperimentSpec::load(&path)
            } else if let Some(entry) = find(&spec) {
                Ok(entry.spec())
            } else {
                Err(geoextremes::Error::Config(format!("{spec}: no such file or catalog id")))
            };
            let mut spec = match loaded {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            if seed.is_some() {
                spec.master_seed = seed;
            }
            if replicates.is_some() {
                spec.replicates = replicates;
            }
            let spec = spec.scaled(scale);
            let dir = out
                .or_else(|| spec.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("out").join(spec.label()));
            match run_experiment(&spec, &dir, workers) {
                Ok(bundle) => {
                    println!("{}: {} rows -> {}", spec.label(), bundle.rows, bundle.dir.display());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::List { config } => {
            if let Some(id) = config {
                return match find(&id) {
                    Some(e) => {
                        print!("{}", e.config);
                        ExitCode::SUCCESS
                    }
                    None => fail(geoextremes::Error::Config(format!("unknown catalog id {id}"))),
                };
            }
            for e in list_experiments() {
                println!("{:<26} {}", e.id, e.description);
            }
            ExitCode::SUCCESS
        }
        Command::Check { scale, workers } => {
            if let Some(w) = workers {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
                    return fail(geoextremes::Error::Resources(e.to_string()));
                }
            }
            let outcomes = run_acceptance(scale, |o| println!("{o}"));
            let passed = outcomes.iter().filter(|o| o.passed).count();
            println!("{passed}/{} criteria passed", outcomes.len());
            if passed == outcomes.len() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
