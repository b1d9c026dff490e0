//! `qdt` — quantum probabilities and decision-theory predictions over
//! scenario files.
//!
//! Commands: `predict` (utility + attraction factors → prospect
//! probabilities), `eval-quantum` (p/f/q decomposition of a lattice against
//! a density matrix), `pipeline` (five-channel measurement procedure audit),
//! `logic-demo` (non-distributivity witness), `verify` (full invariant
//! suite). Exit codes: 0 success, 2 validation failure, 3 numerical
//! invariant failure.

mod commands;
mod report;
mod scenario;

use clap::{Parser, Subcommand};
use qdt_core::matrix::Tolerance;
use report::Format;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qdt", version, about = "quantum probability and decision-theory toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    scenario: Option<std::path::PathBuf>,

    /// Built-in scenario name (see `--builtin help`).
    #[arg(long, global = true, value_name = "NAME")]
    builtin: Option<String>,

    /// Seed for all randomized draws; overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Information measure μ applied to attraction factors.
    #[arg(long, global = true)]
    mu: Option<f64>,

    /// Critical information μ_c of the decay law.
    #[arg(long = "mu-c", global = true)]
    mu_c: Option<f64>,

    /// Output blocks to print.
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    format: Format,

    /// Override the equality tolerance (eps_equality).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Prospect probabilities from utility factors and an attraction prior.
    Predict,
    /// Evaluate a prospect lattice against a density matrix (p = f + q).
    EvalQuantum,
    /// Run and audit the five-channel measurement pipeline.
    Pipeline,
    /// Print the quantum-logic non-distributivity witness.
    LogicDemo,
    /// Run the full invariant suite.
    Verify,
}

fn tolerance_from(cli: &Cli) -> Result<Tolerance, String> {
    let mut tol = Tolerance::default();
    if let Some(t) = cli.tolerance {
        if !(t > 0.0 && t <= 1e-3) {
            return Err(format!("--tolerance must lie in (0, 1e-3], got {t}"));
        }
        tol.eps_equality = t;
    }
    Ok(tol)
}

struct Loaded {
    file: Option<scenario::ScenarioFile>,
    source: String,
}

fn load_scenario(cli: &Cli) -> Result<Loaded, String> {
    match (&cli.scenario, &cli.builtin) {
        (Some(_), Some(_)) => Err("use either --scenario or --builtin, not both".into()),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            Ok(Loaded {
                file: Some(scenario::parse_scenario(&text)?),
                source: format!("file:{}", path.display()),
            })
        }
        (None, Some(name)) => {
            let text = scenario::builtin(name).ok_or_else(|| {
                format!(
                    "unknown builtin {:?}; available: {}",
                    name,
                    scenario::builtin_names().join(", ")
                )
            })?;
            Ok(Loaded {
                file: Some(scenario::parse_scenario(text)?),
                source: format!("builtin:{name}"),
            })
        }
        (None, None) => Ok(Loaded { file: None, source: "none".into() }),
    }
}

fn run(cli: &Cli) -> Result<commands::CommandOutput, String> {
    let tol = tolerance_from(cli)?;
    let loaded = load_scenario(cli)?;
    let seed = cli
        .seed
        .or(loaded.file.as_ref().and_then(|f| f.seed))
        .unwrap_or(0);

    match cli.command {
        Command::Predict => {
            let file = loaded
                .file
                .as_ref()
                .ok_or("predict needs --scenario or --builtin")?;
            let section = file
                .prediction
                .as_ref()
                .ok_or_else(|| format!("predict needs a prediction scenario, got kind {:?}", file.kind))?;
            let inputs = scenario::prediction_inputs(section, cli.mu, cli.mu_c)?;
            commands::predict_command(&inputs, &loaded.source, &tol)
        }
        Command::EvalQuantum => {
            let file = loaded
                .file
                .as_ref()
                .ok_or("eval-quantum needs --scenario or --builtin")?;
            let section = file
                .quantum
                .as_ref()
                .ok_or_else(|| format!("eval-quantum needs a quantum scenario, got kind {:?}", file.kind))?;
            let inputs = scenario::quantum_inputs(section, &tol)?;
            commands::eval_quantum_command(
                &inputs,
                &loaded.source,
                cli.mu.unwrap_or(0.0),
                cli.mu_c.unwrap_or(1.0),
                &tol,
            )
        }
        Command::Pipeline => {
            let inputs = match &loaded.file {
                Some(file) => {
                    let section = file.pipeline.as_ref().ok_or_else(|| {
                        format!("pipeline needs a pipeline scenario, got kind {:?}", file.kind)
                    })?;
                    scenario::pipeline_inputs(section, &tol)?
                }
                // no scenario: qubit × qubit × qubit with seeded unitaries
                None => scenario::pipeline_inputs(
                    &scenario::PipelineSection { dims: [2, 2, 2], initial: None, unitaries: None },
                    &tol,
                )?,
            };
            commands::pipeline_command(&inputs, &loaded.source, seed, &tol)
        }
        Command::LogicDemo => {
            if let Some(file) = &loaded.file {
                if file.kind != "logic_demo" {
                    return Err(format!(
                        "logic-demo takes no scenario data, got kind {:?}",
                        file.kind
                    ));
                }
            }
            commands::logic_demo_command(&loaded.source, &tol)
        }
        Command::Verify => {
            if loaded.file.is_some() {
                return Err("verify takes no scenario; use --seed and --tolerance".into());
            }
            commands::verify_command(&loaded.source, seed, &tol)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.report.emit(cli.format));
            if out.numerical_failure {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
