//! Command-line front end: argument parsing, scenario wiring for each
//! exhibit, and report file output.

use std::fmt;
use std::path::PathBuf;

pub mod args;
pub mod exhibits;
pub mod output;

pub use args::{parse, Cli, Command, Params};
pub use exhibits::Exhibit;

use output::OutputSet;
use zapshift_core::analytics::switch_count_report;
use zapshift_core::engine::{run_scenario, Scenario};
use zapshift_core::grid::TwoStepLead;
use zapshift_core::policy::TraceStep;
use zapshift_core::report::{self, emit_cdf, emit_summary, SweepResult};
use zapshift_core::{ChannelGrid, OrderingKind, SwitchingKind};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e.0)
    }
}

impl From<zapshift_core::Error> for CliError {
    fn from(e: zapshift_core::Error) -> Self {
        match e {
            zapshift_core::Error::InvalidParameter(m) => CliError::Usage(m),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn buf<F>(f: F) -> Result<Vec<u8>, CliError>
where
    F: FnOnce(&mut Vec<u8>) -> zapshift_core::Result<()>,
{
    let mut out = Vec::new();
    f(&mut out)?;
    Ok(out)
}

/// Executes a parsed invocation and returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let params = &cli.params;
    if params.threads > 0 {
        // Fails harmlessly if a pool already exists (tests, repeated calls).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(params.threads)
            .build_global();
    }
    let outputs = match &cli.command {
        Command::Simulate { trace } => simulate(params, *trace)?,
        Command::Analyze => analyze(params)?,
        Command::Sweep => sweep(params)?,
        Command::Reproduce { id } => {
            let exhibit: Exhibit = id.parse()?;
            exhibits::reproduce(exhibit, &params.base_config()?)?
        }
    };
    outputs
        .commit(&params.out)
        .map_err(|e| CliError::Runtime(format!("writing to {}: {e}", params.out.display())))
}

fn simulate(params: &Params, trace: Option<u64>) -> Result<OutputSet, CliError> {
    let cfg = params.scenario()?;
    let stats = run_scenario(&cfg)?;
    let baseline = run_scenario(&cfg.baseline())?;
    let record = emit_summary(&cfg, &stats, &baseline)?;
    let cdf = emit_cdf(&stats, cfg.bin_ms)?;

    let mut out = OutputSet::new();
    out.add("summary.csv", buf(|w| report::write_summary_csv(w, std::slice::from_ref(&record)))?);
    out.add("summary.json", buf(|w| report::write_summary_json(w, std::slice::from_ref(&record)))?);
    out.add("cdf.csv", buf(|w| report::write_cdf_csv(w, &[("simulate".to_string(), cdf)]))?);
    if let Some(count) = trace {
        let scenario = Scenario::new(cfg)?;
        let mut text = format!("episode,{}\n", TraceStep::CSV_HEADER);
        for i in 0..count {
            for step in scenario.trace_episode(i).1 {
                text.push_str(&format!("{i},{}\n", step.csv_line()));
            }
        }
        out.add("trace.csv", text.into_bytes());
    }
    Ok(out)
}

fn analyze(params: &Params) -> Result<OutputSet, CliError> {
    let mut rows = Vec::new();
    for &n in &params.channels {
        for &ordering in &params.ordering {
            if ordering == OrderingKind::Randomized {
                return Err(CliError::Usage(
                    "analyze covers identity, one-step and two-step orderings".into(),
                ));
            }
            rows.push(switch_count_report(ordering, n, params.shape, SwitchingKind::default())?);
        }
    }
    println!("{:<28} {:>8} {:>14}", "ordering / switching", "channels", "E[switches]");
    for &n in &params.channels {
        let candidates = [
            (ChannelGrid::one_step(n)?, "one-step"),
            (ChannelGrid::two_step(n)?, "two-step"),
            (ChannelGrid::two_step_with(n, TwoStepLead::Solo)?, "two-step (solo lead)"),
            (ChannelGrid::identity(n)?, "identity"),
        ];
        for (grid, label) in &candidates {
            for kind in [SwitchingKind::DestinationProportional, SwitchingKind::Uniform] {
                let r = zapshift_core::analytics::report_for_grid(grid, label, params.shape, kind)?;
                println!(
                    "{:<28} {:>8} {:>14.4}",
                    format!("{label} / {}", kind.label()),
                    n,
                    r.expected_switches
                );
            }
        }
    }
    let mut out = OutputSet::new();
    out.add("table1.csv", buf(|w| report::write_table1_csv(w, &rows))?);
    Ok(out)
}

fn sweep(params: &Params) -> Result<OutputSet, CliError> {
    let base = params.base_config()?;
    if params.channels.len() != 1 || params.ordering.len() != 1 {
        return Err(CliError::Usage("sweep takes a single --channels and --ordering".into()));
    }
    let waits: Vec<usize> = params.wait.iter().map(|&w| w as usize).collect();
    let label = format!("{}-order/{}-shifts", base.client_ordering.label(), base.shifts.label());
    let result = SweepResult::run(label, &base, &params.sep, &waits)?;
    let mut out = OutputSet::new();
    out.add("sweep.csv", buf(|w| result.write_csv(w))?);
    Ok(out)
}
