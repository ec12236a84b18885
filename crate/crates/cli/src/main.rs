//! `railbench`: sweep the handover-parameter grid into a KPI dataset,
//! evaluate the regressor families under nested or conventional
//! cross-validation, and render tables and charts.

mod baselines;
mod commands;
mod error;
mod svg;
mod tables;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser)]
#[command(
    name = "railbench",
    version,
    about = "High-speed-rail handover KPI simulator and regression benchmark",
    after_help = "Seeds resolve as: --seed flag, then the RAILBENCH_SEED environment \
                  variable, then the config file / built-in default.\n\
                  Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    /// 6-fold outer / 4-fold inner cross-validation.
    Nested,
    /// Conventional 10-fold cross-validation.
    NonNested,
    /// Run both schemes.
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Run the simulator over the HOM x TTT grid and write the KPI dataset CSV.
    Sweep {
        /// Scenario parameters as a key=value file (defaults built in).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV path (written atomically).
        #[arg(long, default_value = "dataset.csv")]
        out: PathBuf,
        /// Comma-separated HOM values overriding the default 0..16 dB grid.
        #[arg(long, value_delimiter = ',')]
        hom: Option<Vec<f64>>,
        /// Comma-separated TTT values overriding the default 16-value grid.
        #[arg(long, value_delimiter = ',')]
        ttt: Option<Vec<f64>>,
        /// Base seed for the sweep (per-cell seeds derive from it).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate the model families on a dataset CSV and write JSON reports.
    Evaluate {
        /// Dataset CSV (from `sweep` or any file with the same schema).
        dataset: PathBuf,
        /// Cross-validation scheme to run.
        #[arg(long, value_enum, default_value = "both")]
        scheme: SchemeArg,
        /// Comma-separated family filter (ABR,GBR,CBR,SVR,MLP,KNNR,KRR).
        #[arg(long, value_delimiter = ',')]
        families: Option<Vec<String>>,
        /// Fold-plan seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Report path; with --scheme both the scheme name is inserted
        /// before the extension.
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
    },
    /// Render tables and charts from saved JSON reports.
    Report {
        /// One or more report JSON files.
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        /// Also print the bundled reference baselines next to our numbers.
        #[arg(long)]
        baseline: bool,
        /// Write best-method-per-KPI bar charts; one SVG per metric is
        /// derived from this path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep {
            config,
            out,
            hom,
            ttt,
            seed,
        } => commands::cmd_sweep(config, out, hom, ttt, seed),
        Command::Evaluate {
            dataset,
            scheme,
            families,
            seed,
            out,
        } => commands::cmd_evaluate(dataset, scheme, families, seed, out),
        Command::Report {
            reports,
            baseline,
            svg,
        } => commands::cmd_report(reports, baseline, svg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            // malformed invocation
            eprint!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("railbench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
