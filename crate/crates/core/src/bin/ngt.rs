use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use ngt::harness::config::{parse_flag, parse_pairs, resolve, schema_help, select_experiment};
use ngt::harness::{exit_code, run_to_dir, Experiment, HarnessError, EXIT_ERROR};

/// Verification experiments for nonlinear gauge transformations.
#[derive(Parser)]
#[command(name = "ngt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write report.json plus CSV artifacts.
    Run {
        /// Experiment name (see `ngt list`); may instead come from the config file.
        #[arg(long)]
        experiment: Option<String>,
        /// Config file of `key = value` lines.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override one key; repeatable. Flags win over the config file.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// List the experiments and the claim each one checks.
    List,
}

fn run(experiment: Option<String>, config: Option<PathBuf>, set: Vec<String>, out: PathBuf) -> i32 {
    let result = (|| -> Result<_, HarnessError> {
        let file = match &config {
            Some(path) => parse_pairs(&fs::read_to_string(path)?)?,
            None => Vec::new(),
        };
        let flags = set.iter().map(|s| parse_flag(s)).collect::<Result<Vec<_>, _>>()?;
        let exp = select_experiment(experiment.as_deref(), &file)?;
        let cfg = resolve(exp, &file, &flags)?;
        run_to_dir(&cfg, &out)
    })();
    match &result {
        Ok(report) => {
            for c in report.checks.iter().chain(&report.run.checks) {
                println!("{} {} = {:e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value);
            }
            println!("report: {}", out.join("report.json").display());
        }
        Err(e) => eprintln!("ngt: {e}"),
    }
    exit_code(&result)
}

fn main() -> ExitCode {
    let help = schema_help();
    let cmd = Cli::command().mut_subcommand("run", |c| c.after_long_help(help.clone()).after_help(help));
    let cli = match cmd.try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    let code = match cli.command {
        Command::List => {
            for e in Experiment::ALL {
                println!("{:<18} {}", e.as_str(), e.claim());
            }
            0
        }
        Command::Run {
            experiment,
            config,
            set,
            out,
        } => run(experiment, config, set, out),
    };
    ExitCode::from(code as u8)
}
