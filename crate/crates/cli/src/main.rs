mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Format;

#[derive(Parser, Debug)]
#[command(name = "finmodel", version, about = "Checks, generic limits and amalgamation for finite structures")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "human")]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of function symbols kept.
    #[arg(long = "trunc-n", global = true)]
    pub trunc_n: Option<usize>,
    /// Size or search cap; its meaning depends on the command.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, global = true)]
    pub bound: Option<usize>,
    #[arg(long, global = true)]
    pub r: Option<usize>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckClass {
    K1,
    Kminus1,
    Kr0,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AmalgamClass {
    K1,
    Kr0,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a structure file against a class.
    Check {
        #[arg(long, value_enum)]
        class: CheckClass,
        file: PathBuf,
    },
    /// Build a generic approximation and check it.
    Generic {
        /// Write the last chain member here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Amalgamate a triple (k1) or a configuration (kr0).
    Amalgamate {
        #[arg(long, value_enum)]
        class: AmalgamClass,
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label a good sequence; without a file, a chain is generated from the seed.
    Label {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        surplus: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate frugal disjoint amalgamation over configurations.
    Survey,
    /// Boolean algebra utilities on an operation file.
    Ba { file: PathBuf },
    /// Re-verify fast paths with independent checks.
    Oracle,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match commands::run(&cli, argv) {
        Ok(out) => {
            match (cli.opts.format, &out.csv) {
                (Format::Csv, Some(table)) => print!("{table}"),
                (f, _) => print!("{}", out.report.render(f, out.human.as_deref())),
            }
            if out.report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
