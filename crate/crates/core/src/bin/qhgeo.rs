use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qhgeo::scenario::{emit_report, run_scenario, ReportFormat, RunOptions, Scenario};
use qhgeo::Error;

#[derive(Parser)]
#[command(name = "qhgeo", version, about = "Run metric geometry check scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write a report.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Grid spacing used for every sampled domain.
        #[arg(long)]
        resolution_override: Option<f64>,
        /// Include wall-clock timings in the report.
        #[arg(long)]
        timings: bool,
    },
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("qhgeo: {e}");
    if e.is_config() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let Command::Run {
        scenario,
        report,
        format,
        jobs,
        seed,
        resolution_override,
        timings,
    } = Cli::parse().command;

    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
        eprintln!("qhgeo: thread pool: {e}");
        return ExitCode::from(2);
    }
    let s = match Scenario::load(&scenario) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("qhgeo: {}: {e}", scenario.display());
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        seed,
        resolution_override,
        timings,
    };
    let r = match run_scenario(&s, &opts) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    if let Err(e) = emit_report(&r, format, &report) {
        return fail(&e);
    }
    for c in &r.checks {
        let status = serde_json::to_value(c.status).unwrap_or_default();
        eprintln!("{:>3} {:<20} {:<28} {}", c.index, c.id, c.subject, status.as_str().unwrap_or("?"));
    }
    ExitCode::from(r.exit_code() as u8)
}
