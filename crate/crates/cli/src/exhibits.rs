//! Pre-wired scenario matrices for each exhibit.
//!
//! Three scenario families are used throughout:
//!
//! - synchronized: the client surfs the network grid, laddered shifts;
//! - randomized-order: each client surfs its own popularity-weighted random
//!   grid while shifts stay laddered on the network grid;
//! - randomized-shifts: network grid, every channel's shift drawn uniformly
//!   over one GOP.

use std::str::FromStr;

use zapshift_core::analytics::switch_count_report;
use zapshift_core::engine::run_scenario;
use zapshift_core::report::{self, emit_cdf, emit_summary, emit_table2, SweepResult};
use zapshift_core::{ClientOrdering, OrderingKind, ScenarioConfig, ShiftKind, SwitchingKind};

use crate::output::OutputSet;
use crate::{buf, CliError};

pub const TABLE1_CHANNELS: [usize; 5] = [100, 200, 300, 400, 500];
pub const SWEEP_SEPARATIONS: [u32; 4] = [3, 4, 5, 6];
pub const SWEEP_WAITS: [usize; 9] = [2, 3, 4, 5, 6, 7, 8, 9, 10];
/// Separations of the 3×3 degradation table; waits run `S-1..=S+1`.
pub const TABLE2_SEPARATIONS: [u32; 3] = [3, 4, 5];
pub const TABLE2_WAITS: [usize; 5] = [2, 3, 4, 5, 6];
/// `(S, ΔW)` pairs of the latency CDF comparison.
pub const CDF_SCENARIOS: [(u32, usize); 3] = [(3, 2), (4, 3), (6, 5)];
/// Random shifts ignore `S`; this value only labels the rows.
pub const RANDOM_SHIFT_LABEL_SEPARATION: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exhibit {
    Table1,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Table2,
}

pub const EXHIBIT_IDS: &str = "table1, fig4, fig5, fig6, fig7, fig8, fig9, fig10, table2";

impl FromStr for Exhibit {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "table1" => Exhibit::Table1,
            "fig4" => Exhibit::Fig4,
            "fig5" => Exhibit::Fig5,
            "fig6" => Exhibit::Fig6,
            "fig7" => Exhibit::Fig7,
            "fig8" => Exhibit::Fig8,
            "fig9" => Exhibit::Fig9,
            "fig10" => Exhibit::Fig10,
            "table2" => Exhibit::Table2,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown exhibit `{other}`; valid ids: {EXHIBIT_IDS}"
                )))
            }
        })
    }
}

pub fn synchronized(base: &ScenarioConfig) -> ScenarioConfig {
    ScenarioConfig {
        client_ordering: ClientOrdering::SameAsNetwork,
        shifts: ShiftKind::Laddered,
        ..base.clone()
    }
}

pub fn randomized_order(base: &ScenarioConfig) -> ScenarioConfig {
    ScenarioConfig {
        client_ordering: ClientOrdering::Randomized,
        shifts: ShiftKind::Laddered,
        ..base.clone()
    }
}

pub fn randomized_shifts(base: &ScenarioConfig) -> ScenarioConfig {
    ScenarioConfig {
        client_ordering: ClientOrdering::SameAsNetwork,
        shifts: ShiftKind::Randomized,
        separation: RANDOM_SHIFT_LABEL_SEPARATION,
        ..base.clone()
    }
}

pub fn table1_rows() -> zapshift_core::Result<Vec<zapshift_core::analytics::SwitchCountReport>> {
    let mut rows = Vec::new();
    for ordering in [OrderingKind::OneStep, OrderingKind::TwoStep] {
        for n in TABLE1_CHANNELS {
            rows.push(switch_count_report(ordering, n, 1.0, SwitchingKind::DestinationProportional)?);
        }
    }
    Ok(rows)
}

/// Latency and switch-count sweep of the synchronized scenario.
pub fn synchronized_sweep(base: &ScenarioConfig) -> zapshift_core::Result<SweepResult> {
    SweepResult::run("synchronized", &synchronized(base), &SWEEP_SEPARATIONS, &SWEEP_WAITS)
}

pub fn table2_sweeps(base: &ScenarioConfig) -> zapshift_core::Result<(SweepResult, SweepResult)> {
    let a = SweepResult::run("synchronized", &synchronized(base), &TABLE2_SEPARATIONS, &TABLE2_WAITS)?;
    let b = SweepResult::run(
        "randomized-order",
        &randomized_order(base),
        &TABLE2_SEPARATIONS,
        &TABLE2_WAITS,
    )?;
    Ok((a, b))
}

/// Runs the exhibit's scenario matrix and renders its data files.
pub fn reproduce(exhibit: Exhibit, base: &ScenarioConfig) -> Result<OutputSet, CliError> {
    let mut out = OutputSet::new();
    match exhibit {
        Exhibit::Table1 => {
            let rows = table1_rows()?;
            out.add("table1.csv", buf(|w| report::write_table1_csv(w, &rows))?);
        }
        Exhibit::Fig4 | Exhibit::Fig5 => {
            let sweep = synchronized_sweep(base)?;
            out.add("sweep.csv", buf(|w| sweep.write_csv(w))?);
        }
        Exhibit::Fig6 => {
            let mut cdfs = Vec::new();
            let mut records = Vec::new();
            for (sep, wait) in CDF_SCENARIOS {
                let cfg = ScenarioConfig {
                    separation: sep,
                    max_wait: wait,
                    ..synchronized(base)
                };
                let stats = run_scenario(&cfg)?;
                let baseline = run_scenario(&cfg.baseline())?;
                cdfs.push((format!("S{sep}-W{wait}"), emit_cdf(&stats, cfg.bin_ms)?));
                records.push(emit_summary(&cfg, &stats, &baseline)?);
            }
            out.add("cdf.csv", buf(|w| report::write_cdf_csv(w, &cdfs))?);
            out.add("summary.csv", buf(|w| report::write_summary_csv(w, &records))?);
        }
        Exhibit::Fig7 => {
            let sweep = SweepResult::run(
                "randomized-order",
                &randomized_order(base),
                &SWEEP_SEPARATIONS,
                &SWEEP_WAITS,
            )?;
            out.add("sweep.csv", buf(|w| sweep.write_csv(w))?);
        }
        Exhibit::Fig8 => {
            let sweep = SweepResult::run(
                "randomized-shifts",
                &randomized_shifts(base),
                &[RANDOM_SHIFT_LABEL_SEPARATION],
                &SWEEP_WAITS,
            )?;
            out.add("sweep.csv", buf(|w| sweep.write_csv(w))?);
        }
        Exhibit::Fig9 => {
            let a = synchronized_sweep(base)?;
            let c = SweepResult::run(
                "randomized-shifts",
                &randomized_shifts(base),
                &[RANDOM_SHIFT_LABEL_SEPARATION],
                &SWEEP_WAITS,
            )?;
            // The random-shift runs do not depend on S, so one set is
            // compared against every synchronized separation.
            let mut rows = Vec::new();
            for &sep in &SWEEP_SEPARATIONS {
                for &wait in &SWEEP_WAITS {
                    let ref_ms = a.cell(sep, wait)?.mean_wait_ms;
                    let pert_ms = c.cell(RANDOM_SHIFT_LABEL_SEPARATION, wait)?.mean_wait_ms;
                    rows.push(report::DegradationCell {
                        separation: sep,
                        max_wait: wait,
                        reference_ms: ref_ms,
                        perturbed_ms: pert_ms,
                        degradation_pct: 100.0 * (pert_ms - ref_ms) / ref_ms,
                    });
                }
            }
            out.add("sweep.csv", buf(|w| report::write_sweeps_csv(w, &[a, c]))?);
            out.add("degradation.csv", buf(|w| report::write_table2_csv(w, &rows))?);
        }
        Exhibit::Fig10 => {
            let (a, b) = table2_sweeps(base)?;
            let c = SweepResult::run(
                "randomized-shifts",
                &randomized_shifts(base),
                &[RANDOM_SHIFT_LABEL_SEPARATION],
                &TABLE2_WAITS,
            )?;
            out.add("sweep.csv", buf(|w| report::write_sweeps_csv(w, &[a, b, c]))?);
        }
        Exhibit::Table2 => {
            let (a, b) = table2_sweeps(base)?;
            let cells = emit_table2(&a, &b, &TABLE2_SEPARATIONS)?;
            out.add("table2.csv", buf(|w| report::write_table2_csv(w, &cells))?);
            out.add("sweep.csv", buf(|w| report::write_sweeps_csv(w, &[a, b]))?);
        }
    }
    Ok(out)
}
