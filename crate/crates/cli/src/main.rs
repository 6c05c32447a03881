use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dispersive_cli::{run_scenario, Method, Overrides};

/// Run a dispersive atom-field scenario and write plot-ready outputs.
#[derive(Debug, Parser)]
#[command(name = "dispersive", version)]
struct Args {
    /// Scenario JSON file.
    #[arg(long, value_name = "PATH")]
    scenario: PathBuf,

    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "./out")]
    out: PathBuf,

    /// Fock truncation n_max; overrides the scenario file.
    #[arg(long, value_name = "N")]
    truncation: Option<usize>,

    /// Propagation method; overrides the scenario file.
    #[arg(long, value_enum)]
    method: Option<Method>,

    /// Only report errors.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = if args.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let overrides = Overrides { truncation: args.truncation, method: args.method };
    match run_scenario(&args.scenario, &args.out, overrides) {
        Ok(summary) => {
            if !args.quiet {
                println!("source: {:?}", summary.source);
                for f in &summary.files {
                    println!("wrote {}", f.display());
                }
                if let Some(v) = &summary.verification {
                    println!("verification: {}", if v.all_pass { "all pass" } else { "FAILED" });
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let report = serde_json::json!({ "error": e.report() });
            eprintln!("{report}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
