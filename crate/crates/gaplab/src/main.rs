use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gaplab::config::{parse_nodes, GridConfig, Mode, PotentialConfig, RunSection};
use gaplab::fields::emit_csv;
use gaplab::report::to_json_string;
use gaplab::{run_pipeline, GaplabError, Result, RunConfig};

#[derive(Parser)]
#[command(name = "gaplab", version, about = "Spectral-gap lab for -Δ+V on boxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline from a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config entry, e.g. `analysis.gamma=0.1`.
        #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
        set: Vec<String>,
        /// Report path; defaults to `output.report`, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two lowest eigenpairs only.
    Eigen {
        #[arg(long, allow_hyphen_values = true)]
        potential: String,
        /// `lo:hi` or `lo:hi,lo:hi`.
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
        /// `N` or `N,M`.
        #[arg(long)]
        nodes: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a retained field of a previous run as CSV.
    Field {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        field: String,
        #[arg(long)]
        csv: PathBuf,
    },
}

fn write_report(report: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = to_json_string(report);
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| GaplabError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, set, out } => {
            let cfg = RunConfig::load(&config, &set)?;
            let run = run_pipeline(&cfg)?;
            let out = out.or_else(|| (!cfg.output.report.is_empty()).then(|| PathBuf::from(&cfg.output.report)));
            write_report(&run.report, out.as_deref())
        }
        Command::Eigen {
            potential,
            domain,
            nodes,
            out,
        } => {
            let cfg = RunConfig {
                grid: GridConfig {
                    domain,
                    nodes: parse_nodes(&nodes)?,
                },
                potential: PotentialConfig { spec: potential },
                run: RunSection { mode: Mode::EigenOnly },
                solver: Default::default(),
                analysis: Default::default(),
                dictionary: Default::default(),
                output: Default::default(),
            };
            let run = run_pipeline(&cfg)?;
            write_report(&run.report, out.as_deref())
        }
        Command::Field { run, field, csv } => {
            let text = std::fs::read_to_string(&run).map_err(|e| GaplabError::io(&run, e))?;
            let report: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| GaplabError::Report(format!("{}: {e}", run.display())))?;
            if !gaplab::pipeline::FIELD_IDS.contains(&field.as_str()) {
                return Err(GaplabError::UnknownField(field));
            }
            let cfg = RunConfig::from_echo(&report["config"])?;
            let result = run_pipeline(&cfg)?;
            emit_csv(result.field(&field)?, &csv)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gaplab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
