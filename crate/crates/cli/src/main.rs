mod commands;
mod html;

use std::io::IsTerminal;
use std::net::IpAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use classilist_core::analytics::{HistogramSpec, OutcomeSet};

/// Inspect classifier prediction scores per class.
#[derive(Debug, Parser)]
#[command(name = "classilist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a bundle and list every problem with its line number.
    Validate {
        bundle: PathBuf,
        #[arg(long)]
        normalize: bool,
    },
    /// Print the confusion matrix and per-class TP/FP/FN/TN counts.
    Summary {
        bundle: PathBuf,
        #[arg(long)]
        normalize: bool,
    },
    /// Write report.json and report.html into a directory.
    Report {
        bundle: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
        /// Include sample ids per bin and per confusion cell.
        #[arg(long)]
        members: bool,
        #[arg(long)]
        normalize: bool,
    },
    /// Serve the HTTP API (and optional UI assets) for a bundle.
    Serve {
        bundle: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, env = "CLASSILIST_PORT", default_value_t = 8080)]
        port: u16,
        /// Directory of static UI files served at `/`.
        #[arg(long)]
        assets: Option<PathBuf>,
        #[arg(long)]
        normalize: bool,
    },
}

/// Histogram flags, named like the API query parameters.
#[derive(Debug, Clone, Args)]
struct SpecArgs {
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lo: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    hi: f64,
    /// Comma list of tp,fp,fn,tn.
    #[arg(long, default_value = "tp,fp,fn")]
    groups: OutcomeSet,
    #[arg(long, default_value_t = 0.01)]
    tn_min: f64,
    #[arg(long, default_value_t = 1.0)]
    tp_max: f64,
}

impl SpecArgs {
    fn spec(&self) -> HistogramSpec {
        HistogramSpec {
            bin_count: self.bins,
            axis_lo: self.lo,
            axis_hi: self.hi,
            groups: self.groups,
            tn_min: self.tn_min,
            tp_max: self.tp_max,
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("CLASSILIST_LOG")
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .init();

    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate { bundle, normalize } => commands::validate(&bundle, normalize),
        Command::Summary { bundle, normalize } => commands::summary(&bundle, normalize),
        Command::Report { bundle, out, spec, members, normalize } => {
            commands::report(&bundle, &out, &spec.spec(), members, normalize)
        }
        Command::Serve { bundle, host, port, assets, normalize } => {
            commands::serve(&bundle, (host, port).into(), assets, normalize)
        }
    };
    ExitCode::from(code)
}
