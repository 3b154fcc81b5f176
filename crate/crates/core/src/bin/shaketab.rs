use std::io::Write;
use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};
use log::{error, LevelFilter};

use shaketab::signals;
use shaketab::sim::{self, ScenarioConfig};
use shaketab::{Error, ExitCode};

#[derive(Parser)]
#[command(name = "shaketab", version, about = "Adaptive shake-table control simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its NRMSE summary.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_path` from the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// NRMSE of one column of a measured CSV against a reference CSV.
    Nrmse {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        meas: PathBuf,
        #[arg(long)]
        column: String,
    },
    /// Magnitude and phase of a built-in system on a log grid.
    Bode {
        #[arg(long)]
        system: String,
        #[arg(long, default_value_t = 0.1)]
        omega_min: f64,
        #[arg(long, default_value_t = 1000.0)]
        omega_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run every `*.cfg` scenario in a directory.
    Batch {
        #[arg(long)]
        config_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn init_logging() {
    let level = match std::env::var("SHAKETAB_LOG").as_deref() {
        Ok("quiet") => LevelFilter::Error,
        Ok("info") => LevelFilter::Info,
        Ok("debug") => LevelFilter::Debug,
        _ => LevelFilter::Warn,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn print_summary(label: &str, s: &sim::NrmseSummary) {
    println!(
        "{label}: nrmse displacement {:.6e} velocity {:.6e} acceleration {:.6e}",
        s.displacement, s.velocity, s.acceleration
    );
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Simulate { config, output } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if output.is_some() {
                cfg.output_path = output;
            }
            let (_, summary) = sim::run_and_write(&cfg)?;
            print_summary(&config.display().to_string(), &summary);
            Ok(ExitCode::Success)
        }
        Command::Nrmse { reference, meas, column } => {
            let value = sim::run_nrmse(&reference, &meas, &column)?;
            println!("{column}: {value:.17e}");
            Ok(ExitCode::Success)
        }
        Command::Bode { system, omega_min, omega_max, points, output } => {
            let cols = sim::run_bode(&system, omega_min, omega_max, points)?;
            if system == "vd" {
                eprintln!("note: the grid excludes omega = 0, where vd has a double pole");
            }
            match output {
                Some(path) => signals::write_csv(&cols, &path)?,
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    signals::write_csv_to(&cols, &mut lock)
                        .and_then(|_| lock.flush())
                        .map_err(|e| signals::SignalError::IoFailure { path: "<stdout>".into(), message: e.to_string() })?;
                }
            }
            Ok(ExitCode::Success)
        }
        Command::Batch { config_dir, jobs } => {
            let outcomes = sim::run_batch(&config_dir, jobs)?;
            let mut worst = ExitCode::Success;
            for o in &outcomes {
                match &o.result {
                    Ok(s) => print_summary(&o.config.display().to_string(), s),
                    Err(e) => {
                        error!("{}: {e}", o.config.display());
                        if worst == ExitCode::Success || e.exit_code().code() > worst.code() {
                            worst = e.exit_code();
                        }
                    }
                }
            }
            Ok(worst)
        }
    }
}

fn main() {
    init_logging();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    process::exit(code.code());
}
