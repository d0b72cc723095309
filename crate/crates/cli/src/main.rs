use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hermass_cli::{render_table, run, CliError, Command, RunConfig};

/// Exact-arithmetic calculator for curves over finite fields, local
/// orders, skew-series centralizers, and mass formulas.
#[derive(Parser)]
#[command(name = "hermass", version, about)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,

    /// Path to the JSON config, or '-' for standard input.
    #[arg(long, global = true, default_value = "-")]
    config: String,

    /// Seed echoed into the report for reproducibility bookkeeping.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Point counts, zeta numerator, class number and special values.
    Zeta,
    /// Standard-chain stabilizer basis and block-order verdicts.
    Order,
    /// Centralizer basis of the formal embedding, with the match certificate.
    Centralizer,
    /// The mass formula with class-number bounds.
    Mass,
    /// The singular-point count for level structures (d = 2, type (1,1)).
    Singular,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        CliCommand::Zeta => Command::Zeta,
        CliCommand::Order => Command::Order,
        CliCommand::Centralizer => Command::Centralizer,
        CliCommand::Mass => Command::Mass,
        CliCommand::Singular => Command::Singular,
    };

    let raw = if cli.config == "-" {
        let mut buf = String::new();
        if std::io::stdin().read_to_string(&mut buf).is_err() {
            eprintln!("{{\"errors\":[\"could not read standard input\"]}}");
            return ExitCode::from(2);
        }
        buf
    } else {
        match fs::read_to_string(&cli.config) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("{{\"errors\":[\"could not read {}: {}\"]}}", cli.config, e);
                return ExitCode::from(2);
            }
        }
    };

    let payload: serde_json::Value = match serde_json::from_str(&raw) {
        Ok(v) => v,
        Err(e) => {
            let err = CliError::Validation(vec![format!("config is not valid JSON: {}", e)]);
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };

    match run(&RunConfig {
        command,
        payload,
        seed: cli.seed,
    }) {
        Ok(report) => {
            let rendered = match cli.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
                    s.push('\n');
                    s
                }
                Format::Table => render_table(&report),
            };
            match cli.output {
                Some(path) => {
                    if let Err(e) = fs::write(&path, rendered) {
                        eprintln!(
                            "{{\"errors\":[\"could not write {}: {}\"]}}",
                            path.display(),
                            e
                        );
                        return ExitCode::from(1);
                    }
                }
                None => print!("{}", rendered),
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
