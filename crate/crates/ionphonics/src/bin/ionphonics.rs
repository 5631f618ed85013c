//! Batch front-end: run scenario configs, list the bundled reference
//! scenarios, compile target operations to schedules and verify schedules
//! against targets.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use ionphonics::compiler::{self, CompileOptions, TargetOp};
use ionphonics::error::{Error, Result};
use ionphonics::scenario::{self, OutputFormat};
use ionphonics::{Schedule, SymplecticMatrix};

#[derive(Parser)]
#[command(
    name = "ionphonics",
    version,
    about = "Gaussian dynamics and linear phononics for trapped-ion radial modes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for Monte-Carlo observables (jitter studies).
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output directory for generated files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Output format: csv or json.
    #[arg(long, global = true, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config (a bundled name or a TOML file path).
    Run { scenario: String },
    /// List the bundled scenarios.
    List,
    /// Compile a target operation into a frequency schedule.
    Compile {
        target: PathBuf,
        /// Path of the schedule file to write.
        #[arg(short, long)]
        output: PathBuf,
        /// Optional JSON verification report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Verify a schedule file against a target operation.
    Verify {
        schedule: PathBuf,
        #[arg(long)]
        target: PathBuf,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetFile {
    ions: usize,
    /// 1-based ion indices the operation acts on.
    modes: Vec<usize>,
    /// 2m x 2m symplectic matrix, xxpp ordering, row major.
    matrix: Vec<Vec<f64>>,
    ladder_step: Option<f64>,
    tolerance: Option<f64>,
}

fn load_target(path: &PathBuf) -> Result<(TargetOp, usize, CompileOptions)> {
    let text = std::fs::read_to_string(path)?;
    let raw: TargetFile = toml::from_str(&text).map_err(|e| Error::Config(format!("{e}")))?;
    if raw.modes.is_empty() {
        return Err(Error::Config("target needs at least one mode".into()));
    }
    let m = raw.modes.len();
    if raw.matrix.len() != 2 * m || raw.matrix.iter().any(|row| row.len() != 2 * m) {
        return Err(Error::Config(format!(
            "target matrix must be {} x {} for {m} modes",
            2 * m,
            2 * m
        )));
    }
    let mut modes = Vec::with_capacity(m);
    for &ion in &raw.modes {
        if ion == 0 || ion > raw.ions {
            return Err(Error::Config(format!("mode {ion} out of range for {} ions", raw.ions)));
        }
        modes.push(ion - 1);
    }
    let flat: Vec<f64> = raw.matrix.iter().flatten().copied().collect();
    let s = SymplecticMatrix::new(nalgebra::DMatrix::from_row_slice(2 * m, 2 * m, &flat))?;
    let target = TargetOp::new(modes, s)?;
    let opts = CompileOptions {
        ladder_step: raw.ladder_step.unwrap_or(20.0),
        tolerance: raw.tolerance.unwrap_or(1e-3),
    };
    Ok((target, raw.ions, opts))
}

fn print_report(report: &compiler::VerifyReport) {
    println!("deviation         {:.6e}", report.deviation);
    println!("spectator_leakage {:.6e}", report.spectator_leakage);
    println!("rwa_residual      {:.6e}", report.rwa_residual);
}

fn report_json(report: &compiler::VerifyReport) -> serde_json::Value {
    serde_json::json!({
        "deviation": report.deviation,
        "spectator_leakage": report.spectator_leakage,
        "rwa_residual": report.rwa_residual,
    })
}

fn run(cli: Cli) -> Result<()> {
    let format = match cli.format.as_str() {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => return Err(Error::Config(format!("unknown format '{other}'"))),
    };
    match cli.command {
        Command::Run { scenario } => {
            let (name, text) = scenario::resolve_scenario(&scenario)?;
            let loaded = scenario::parse_scenario(&name, &text)?;
            let report = scenario::run_scenario(&loaded, &cli.out_dir, format, cli.seed)?;
            for line in &report.summary {
                println!("{line}");
            }
            for file in &report.files {
                println!("wrote {}", file.display());
            }
            Ok(())
        }
        Command::List => {
            for (name, description) in scenario::list_bundled() {
                println!("{name:<12} {description}");
            }
            Ok(())
        }
        Command::Compile { target, output, report } => {
            let (target_op, ions, opts) = load_target(&target)?;
            let compiled = compiler::compile(&target_op, ions, &opts)?;
            std::fs::write(&output, compiled.schedule.print())?;
            println!(
                "compiled {} primitives into {} instructions",
                compiled.primitive_count,
                compiled.schedule.instructions.len()
            );
            print_report(&compiled.report);
            println!("wrote {}", output.display());
            if let Some(path) = report {
                std::fs::write(
                    &path,
                    serde_json::to_string_pretty(&report_json(&compiled.report))?,
                )?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Verify { schedule, target } => {
            let text = std::fs::read_to_string(&schedule)?;
            let sched = Schedule::parse(&text)?;
            let (target_op, ions, opts) = load_target(&target)?;
            if sched.base.n() != ions {
                return Err(Error::Config(format!(
                    "schedule has {} ions, target expects {ions}",
                    sched.base.n()
                )));
            }
            let report = compiler::verify_schedule(&sched, &target_op)?;
            print_report(&report);
            if report.deviation > opts.tolerance {
                return Err(Error::Verification {
                    deviation: report.deviation,
                    tolerance: opts.tolerance,
                    leakage: report.spectator_leakage,
                });
            }
            println!("schedule matches the target within {:.1e}", opts.tolerance);
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
