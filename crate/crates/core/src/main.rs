use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mirdet::commands::{run_command, Command, CommandOptions};
use mirdet::config::{bundled_scenario, load_scenario, BUNDLED_SCENARIOS};
use mirdet::report::Format;
use mirdet::Error;

#[derive(Parser)]
#[command(name = "mirdet", version, about = "Mid-infrared up-conversion photon detector workbench")]
struct Cli {
    /// Scenario TOML file.
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "scenario")]
    config: Option<PathBuf>,

    /// Bundled scenario name (paper_25C, paper_93C). Default: paper_25C.
    #[arg(long, global = true, value_name = "NAME")]
    scenario: Option<String>,

    /// Master seed; overrides simulation.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Simulated time in seconds; overrides simulation.duration_s.
    #[arg(long, global = true, value_name = "SECONDS", allow_negative_numbers = true)]
    duration: Option<f64>,

    /// Output file; stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "text")]
    format: FormatArg,

    /// Reject unknown keys in the scenario file.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Conversion and overall efficiencies, and the gap to theory.
    Efficiency,
    /// Dark, thermal-background and total count rates.
    Noise,
    /// SNR0 and its background-limited floor.
    Sensitivity,
    /// Monte Carlo run and its start-stop histogram (CSV: the histogram).
    Simulate,
    /// Focusing, crystal-length and pump-power design optima.
    Optimize(OptimizeArgs),
    /// Rank the scenario against a detector catalog.
    Compare(CompareArgs),
    /// Evaluate the scenario along a grid of one parameter.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct OptimizeArgs {
    /// Pump powers for the trade-off curve, W.
    #[arg(long, value_delimiter = ',', value_name = "W,...")]
    powers: Vec<f64>,
    /// Upper bound of the crystal-length search.
    #[arg(long, value_name = "MM")]
    max_length_mm: Option<f64>,
}

#[derive(Args)]
struct CompareArgs {
    /// Catalog CSV (`name,timing_ns,snr0_pw,note`); bundled table otherwise.
    #[arg(long, value_name = "PATH")]
    catalog: Option<PathBuf>,
    /// Our SNR0 in pW; computed from the scenario otherwise.
    #[arg(long, value_name = "PW")]
    ours_snr0_pw: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Parameter path, e.g. `pump.power` (SI units).
    #[arg(long)]
    param: String,
    /// Grid values.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    values: Vec<f64>,
}

fn run(cli: Cli) -> Result<(), Error> {
    let setup = match (&cli.config, &cli.scenario) {
        (Some(path), _) => load_scenario(path, cli.strict)?,
        (None, Some(name)) => bundled_scenario(name)?,
        (None, None) => bundled_scenario(BUNDLED_SCENARIOS[0].0)?,
    };
    for w in &setup.warnings {
        eprintln!("warning: {w}");
    }
    let mut options = CommandOptions {
        seed: cli.seed,
        duration: cli.duration,
        ..Default::default()
    };
    let command = match cli.command {
        Cmd::Efficiency => Command::Efficiency,
        Cmd::Noise => Command::Noise,
        Cmd::Sensitivity => Command::Sensitivity,
        Cmd::Simulate => Command::Simulate,
        Cmd::Optimize(a) => {
            options.powers_w = a.powers;
            options.max_length_mm = a.max_length_mm;
            Command::Optimize
        }
        Cmd::Compare(a) => {
            options.catalog = a.catalog;
            options.ours_snr0_pw = a.ours_snr0_pw;
            Command::Compare
        }
        Cmd::Sweep(a) => {
            options.parameter = Some(a.param);
            options.values = a.values;
            Command::Sweep
        }
    };
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let report = run_command(command, &setup, &options)?;
    report.emit(format, cli.out.as_deref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mirdet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
