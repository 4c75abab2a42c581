use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stability_cli::{exit, run_experiment, CliError, ExperimentConfig, Pipeline};

#[derive(Parser)]
#[command(name = "stability-lab", version, about = "Replicability experiments on finite concept classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Root seed; required by every stochastic pipeline.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for `<pipeline>.csv` and `<pipeline>.json`; CSV goes to stdout otherwise.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// VC, Littlestone and hollow star numbers of a class.
    Dims {
        #[arg(long)]
        class: String,
    },
    /// Monte Carlo stability report of a learner.
    Estimate {
        #[arg(long)]
        learner: String,
        #[arg(long)]
        class: Option<String>,
        /// Distribution file or `random(count,seed)`.
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Boost a globally stable learner into a list replicable one.
    Boost {
        /// The inner learner.
        #[arg(long)]
        learner: String,
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        dist: String,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        n0: Option<usize>,
        #[arg(long)]
        trials: u64,
    },
    /// Search for a hard distribution with an instability witness.
    Adversary {
        #[arg(long)]
        class: String,
        #[arg(long)]
        learner: String,
        /// `cube`, `hollow-star` or a witness file.
        #[arg(long)]
        witness: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        damping: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        mc: Option<u64>,
        #[arg(long)]
        max_sweeps: Option<usize>,
        #[arg(long)]
        cert_trials: Option<u64>,
    },
    /// Exact output law by enumerating every sample.
    Oracle {
        #[arg(long)]
        learner: String,
        #[arg(long)]
        class: Option<String>,
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
    },
    /// Run a JSON experiment config.
    Experiment { config: PathBuf },
}

fn config_of(cli: Cli) -> Result<ExperimentConfig, CliError> {
    let mut c = match cli.command {
        Command::Dims { class } => ExperimentConfig {
            class: Some(class),
            ..ExperimentConfig::new(Pipeline::Dims)
        },
        Command::Estimate {
            learner,
            class,
            dist,
            n,
            trials,
            beta,
        } => ExperimentConfig {
            learner: Some(learner),
            class,
            dist: Some(dist),
            n,
            trials: Some(trials),
            beta,
            ..ExperimentConfig::new(Pipeline::Estimate)
        },
        Command::Boost {
            learner,
            class,
            dist,
            rho,
            eps,
            delta,
            n0,
            trials,
        } => ExperimentConfig {
            learner: Some(learner),
            class,
            dist: Some(dist),
            rho: Some(rho),
            eps: Some(eps),
            delta: Some(delta),
            n0,
            trials: Some(trials),
            ..ExperimentConfig::new(Pipeline::Boost)
        },
        Command::Adversary {
            class,
            learner,
            witness,
            tol,
            damping,
            n,
            mc,
            max_sweeps,
            cert_trials,
        } => ExperimentConfig {
            class: Some(class),
            learner: Some(learner),
            witness,
            tol,
            damping,
            n,
            mc,
            max_sweeps,
            cert_trials,
            ..ExperimentConfig::new(Pipeline::Adversary)
        },
        Command::Oracle { learner, class, dist, n } => ExperimentConfig {
            learner: Some(learner),
            class,
            dist: Some(dist),
            n: Some(n),
            ..ExperimentConfig::new(Pipeline::Oracle)
        },
        Command::Experiment { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| CliError::io(&config, e))?;
            ExperimentConfig::from_json(&text)?
        }
    };
    // Command-line flags override the file.
    c.seed = cli.common.seed.or(c.seed);
    c.threads = cli.common.threads.or(c.threads);
    c.out = cli.common.out.or(c.out);
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config_of(cli).and_then(|c| {
        let printed = c.out.is_none();
        run_experiment(&c).map(|r| (r, printed))
    });
    match result {
        Ok((report, printed)) => {
            if printed {
                print!("{}", report.csv);
            }
            if report.unconverged {
                eprintln!("adversary: search did not converge within the sweep budget");
                ExitCode::from(exit::UNCONVERGED as u8)
            } else {
                ExitCode::from(exit::OK as u8)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
