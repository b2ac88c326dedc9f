//! CSV and JSON emitters.
//!
//! CSV is the canonical format: fixed column order, floats with six
//! decimals. JSON mirrors the same records for programmatic use.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::analytics::SwitchCountReport;
use crate::engine::{
    accumulative_improvement, improvement_vs_baseline, run_scenario, switch_overhead,
    AggregateStats, ScenarioConfig,
};
use crate::error::{invalid, Error, Result};

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfRow {
    pub upper_ms: f64,
    pub fraction: f64,
}

/// Cumulative fraction of switch events with wait `<=` each bin edge.
///
/// `bin_ms` must be a whole multiple of the histogram's own bin width; the
/// last edge is truncated at the GOP duration and always reads 1.
pub fn emit_cdf(stats: &AggregateStats, bin_ms: f64) -> Result<Vec<CdfRow>> {
    let hist = &stats.histogram;
    if !(bin_ms.is_finite() && bin_ms > 0.0) {
        return invalid(format!("CDF bin width must be positive, got {bin_ms}"));
    }
    let ratio = bin_ms / hist.bin_ms;
    let group = ratio.round() as usize;
    if group == 0 || (ratio - group as f64).abs() > 1e-9 {
        return invalid(format!(
            "CDF bin width {bin_ms} is not a multiple of the histogram bin {}",
            hist.bin_ms
        ));
    }
    let total = hist.total();
    let mut rows = Vec::new();
    let mut cum = 0u64;
    for (k, chunk) in hist.counts.chunks(group).enumerate() {
        cum += chunk.iter().sum::<u64>();
        let last_bin = (k * group + chunk.len()) - 1;
        rows.push(CdfRow {
            upper_ms: hist.upper_edge(last_bin),
            fraction: if total == 0 { 1.0 } else { cum as f64 / total as f64 },
        });
    }
    Ok(rows)
}

/// Writes `label,upper_ms,cum_fraction` rows for one or more CDFs.
pub fn write_cdf_csv<W: Write>(mut w: W, tables: &[(String, Vec<CdfRow>)]) -> Result<()> {
    writeln!(w, "scenario,upper_ms,cum_fraction")?;
    for (label, rows) in tables {
        for r in rows {
            writeln!(w, "{label},{},{}", fmt6(r.upper_ms), fmt6(r.fraction))?;
        }
    }
    Ok(())
}

pub fn write_table1_csv<W: Write>(mut w: W, rows: &[SwitchCountReport]) -> Result<()> {
    writeln!(w, "ordering,switching,channels,shape,expected_switches")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.ordering,
            r.switching.label(),
            r.session_count,
            fmt6(r.shape),
            fmt6(r.expected_switches)
        )?;
    }
    Ok(())
}

/// Grid of scenario runs over separation × maximum wait, with a paired
/// `ΔW = 1` baseline per separation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub label: String,
    pub base: ScenarioConfig,
    pub separations: Vec<u32>,
    pub waits: Vec<usize>,
    cells: BTreeMap<(u32, usize), AggregateStats>,
    baselines: BTreeMap<u32, AggregateStats>,
}

impl SweepResult {
    pub fn new(label: impl Into<String>, base: ScenarioConfig, separations: Vec<u32>, waits: Vec<usize>) -> Self {
        Self {
            label: label.into(),
            base,
            separations,
            waits,
            cells: BTreeMap::new(),
            baselines: BTreeMap::new(),
        }
    }

    /// Runs every declared cell plus the baselines.
    pub fn run(
        label: impl Into<String>,
        base: &ScenarioConfig,
        separations: &[u32],
        waits: &[usize],
    ) -> Result<Self> {
        let mut sweep = Self::new(label, base.clone(), separations.to_vec(), waits.to_vec());
        for &sep in separations {
            let cfg = ScenarioConfig {
                separation: sep,
                ..base.clone()
            };
            sweep.insert_baseline(sep, run_scenario(&cfg.baseline())?);
            for &w in waits {
                let stats = run_scenario(&ScenarioConfig {
                    max_wait: w,
                    ..cfg.clone()
                })?;
                sweep.insert(sep, w, stats);
            }
        }
        Ok(sweep)
    }

    pub fn insert(&mut self, separation: u32, max_wait: usize, stats: AggregateStats) {
        self.cells.insert((separation, max_wait), stats);
    }

    pub fn insert_baseline(&mut self, separation: u32, stats: AggregateStats) {
        self.baselines.insert(separation, stats);
    }

    pub fn cell(&self, separation: u32, max_wait: usize) -> Result<&AggregateStats> {
        self.cells.get(&(separation, max_wait)).ok_or_else(|| {
            Error::IncompleteSweep(format!(
                "{}: no cell for separation {separation}, wait {max_wait}",
                self.label
            ))
        })
    }

    pub fn baseline(&self, separation: u32) -> Result<&AggregateStats> {
        self.baselines.get(&separation).ok_or_else(|| {
            Error::IncompleteSweep(format!("{}: no baseline for separation {separation}", self.label))
        })
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_sweeps_csv(w, std::slice::from_ref(self))
    }
}

/// One header, then every cell of every sweep in declaration order.
pub fn write_sweeps_csv<W: Write>(mut w: W, sweeps: &[SweepResult]) -> Result<()> {
    writeln!(
        w,
        "scenario,channels,separation,max_wait,events,mean_wait_ms,median_wait_ms,p95_wait_ms,\
         frac_le_250ms,mean_switches,mean_accumulative_ms,baseline_mean_wait_ms,\
         improvement_pct,switch_overhead_pct,acc_improvement_pct"
    )?;
    for sweep in sweeps {
        for &sep in &sweep.separations {
            let base = sweep.baseline(sep)?;
            for &wait in &sweep.waits {
                let s = sweep.cell(sep, wait)?;
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    sweep.label,
                    sweep.base.session_count,
                    sep,
                    wait,
                    s.events,
                    fmt6(s.mean_wait_ms),
                    fmt6(s.median_wait_ms),
                    fmt6(s.p95_wait_ms),
                    fmt6(s.frac_le_250ms),
                    fmt6(s.mean_switches),
                    fmt6(s.mean_accumulative_ms),
                    fmt6(base.mean_wait_ms),
                    fmt6(improvement_vs_baseline(s, base)?),
                    fmt6(switch_overhead(s, base)?),
                    fmt6(accumulative_improvement(s, base)?),
                )?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegradationCell {
    pub separation: u32,
    pub max_wait: usize,
    pub reference_ms: f64,
    pub perturbed_ms: f64,
    pub degradation_pct: f64,
}

/// Percent latency increase of `perturbed` over `reference` for each
/// separation `S` and `ΔW ∈ {S-1, S, S+1}`.
pub fn emit_table2(
    reference: &SweepResult,
    perturbed: &SweepResult,
    separations: &[u32],
) -> Result<Vec<DegradationCell>> {
    let mut out = Vec::new();
    for &sep in separations {
        for max_wait in [sep as usize - 1, sep as usize, sep as usize + 1] {
            let a = reference.cell(sep, max_wait)?;
            let b = perturbed.cell(sep, max_wait)?;
            out.push(DegradationCell {
                separation: sep,
                max_wait,
                reference_ms: a.mean_wait_ms,
                perturbed_ms: b.mean_wait_ms,
                degradation_pct: -crate::engine::percent_improvement(b.mean_wait_ms, a.mean_wait_ms)?,
            });
        }
    }
    Ok(out)
}

pub fn write_table2_csv<W: Write>(mut w: W, cells: &[DegradationCell]) -> Result<()> {
    writeln!(w, "separation,max_wait,synchronized_mean_ms,randomized_mean_ms,degradation_pct")?;
    for c in cells {
        writeln!(
            w,
            "{},{},{},{},{}",
            c.separation,
            c.max_wait,
            fmt6(c.reference_ms),
            fmt6(c.perturbed_ms),
            fmt6(c.degradation_pct)
        )?;
    }
    Ok(())
}

/// Flat per-run record behind `summary.csv` and `summary.json`.
///
/// Floats are rounded to six decimals on construction so the CSV and JSON
/// forms carry identical values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub channels: usize,
    pub shape: f64,
    pub gop_ms: f64,
    pub separation: u32,
    pub max_wait: usize,
    pub ordering: String,
    pub client_ordering: String,
    pub shifts: String,
    pub dwell: String,
    pub switching: String,
    pub event_budget: u64,
    pub seed: u64,
    pub events: u64,
    pub episodes: u64,
    pub mean_wait_ms: f64,
    pub median_wait_ms: f64,
    pub p95_wait_ms: f64,
    pub frac_le_250ms: f64,
    pub mean_switches: f64,
    pub switches_std_err: f64,
    pub mean_accumulative_ms: f64,
    pub mean_final_wait_ms: f64,
    pub baseline_mean_wait_ms: f64,
    pub improvement_pct: f64,
    pub acc_improvement_pct: f64,
    pub switch_overhead_pct: f64,
}

pub const SUMMARY_COLUMNS: [&str; 26] = [
    "channels",
    "shape",
    "gop_ms",
    "separation",
    "max_wait",
    "ordering",
    "client_ordering",
    "shifts",
    "dwell",
    "switching",
    "event_budget",
    "seed",
    "events",
    "episodes",
    "mean_wait_ms",
    "median_wait_ms",
    "p95_wait_ms",
    "frac_le_250ms",
    "mean_switches",
    "switches_std_err",
    "mean_accumulative_ms",
    "mean_final_wait_ms",
    "baseline_mean_wait_ms",
    "improvement_pct",
    "acc_improvement_pct",
    "switch_overhead_pct",
];

pub fn emit_summary(
    config: &ScenarioConfig,
    stats: &AggregateStats,
    baseline: &AggregateStats,
) -> Result<SummaryRecord> {
    Ok(SummaryRecord {
        channels: config.session_count,
        shape: round6(config.shape),
        gop_ms: round6(config.gop_ms),
        separation: config.separation,
        max_wait: config.max_wait,
        ordering: config.ordering.label().to_string(),
        client_ordering: config.client_ordering.label().to_string(),
        shifts: config.shifts.label().to_string(),
        dwell: config.dwell.to_string(),
        switching: config.switching.label().to_string(),
        event_budget: config.event_budget,
        seed: config.master_seed,
        events: stats.events,
        episodes: stats.episodes,
        mean_wait_ms: round6(stats.mean_wait_ms),
        median_wait_ms: round6(stats.median_wait_ms),
        p95_wait_ms: round6(stats.p95_wait_ms),
        frac_le_250ms: round6(stats.frac_le_250ms),
        mean_switches: round6(stats.mean_switches),
        switches_std_err: round6(stats.switches_std_err),
        mean_accumulative_ms: round6(stats.mean_accumulative_ms),
        mean_final_wait_ms: round6(stats.mean_final_wait_ms),
        baseline_mean_wait_ms: round6(baseline.mean_wait_ms),
        improvement_pct: round6(improvement_vs_baseline(stats, baseline)?),
        acc_improvement_pct: round6(accumulative_improvement(stats, baseline)?),
        switch_overhead_pct: round6(switch_overhead(stats, baseline)?),
    })
}

pub fn write_summary_csv<W: Write>(mut w: W, records: &[SummaryRecord]) -> Result<()> {
    writeln!(w, "{}", SUMMARY_COLUMNS.join(","))?;
    for r in records {
        let fields = [
            r.channels.to_string(),
            fmt6(r.shape),
            fmt6(r.gop_ms),
            r.separation.to_string(),
            r.max_wait.to_string(),
            r.ordering.clone(),
            r.client_ordering.clone(),
            r.shifts.clone(),
            r.dwell.clone(),
            r.switching.clone(),
            r.event_budget.to_string(),
            r.seed.to_string(),
            r.events.to_string(),
            r.episodes.to_string(),
            fmt6(r.mean_wait_ms),
            fmt6(r.median_wait_ms),
            fmt6(r.p95_wait_ms),
            fmt6(r.frac_le_250ms),
            fmt6(r.mean_switches),
            fmt6(r.switches_std_err),
            fmt6(r.mean_accumulative_ms),
            fmt6(r.mean_final_wait_ms),
            fmt6(r.baseline_mean_wait_ms),
            fmt6(r.improvement_pct),
            fmt6(r.acc_improvement_pct),
            fmt6(r.switch_overhead_pct),
        ];
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn read_summary_csv<R: Read>(r: R) -> Result<Vec<SummaryRecord>> {
    let mut reader = csv::Reader::from_reader(r);
    let headers = reader.headers()?.clone();
    if headers.iter().ne(SUMMARY_COLUMNS.iter().copied()) {
        return invalid("summary header does not match the expected columns");
    }
    reader
        .deserialize()
        .map(|rec| rec.map_err(Error::from))
        .collect()
}

pub fn write_summary_json<W: Write>(w: W, records: &[SummaryRecord]) -> Result<()> {
    serde_json::to_writer_pretty(w, records)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{StatsAccumulator, WaitHistogram};
    use crate::grid::Direction;
    use crate::EpisodeResult;

    fn stats_from(waits: &[f64]) -> AggregateStats {
        let mut acc = StatsAccumulator::new(10.0, 1000.0);
        acc.push(&EpisodeResult {
            start: 1,
            target: 2,
            direction: Direction::Up,
            target_index: waits.len(),
            switch_count: waits.len(),
            selected: (1..=waits.len()).collect(),
            per_switch_wait_ms: waits.to_vec(),
            accumulative_wait_ms: waits.iter().sum(),
        });
        acc.finish()
    }

    #[test]
    fn cdf_all_zero() {
        let rows = emit_cdf(&stats_from(&[0.0; 10]), 10.0).unwrap();
        assert_eq!(rows[0].fraction, 1.0);
        assert_eq!(rows.last().unwrap().upper_ms, 1000.0);
    }

    #[test]
    fn cdf_uniform_quarters() {
        let waits: Vec<f64> = (0..100_000).map(|i| i as f64 * 0.01).collect();
        let rows = emit_cdf(&stats_from(&waits), 250.0).unwrap();
        let got: Vec<f64> = rows.iter().map(|r| r.fraction).collect();
        for (g, want) in got.iter().zip([0.25, 0.5, 0.75, 1.0]) {
            assert!((g - want).abs() < 1e-3);
        }
        assert!(rows.windows(2).all(|w| w[0].fraction <= w[1].fraction));
    }

    #[test]
    fn cdf_rejects_bad_bins() {
        let s = stats_from(&[1.0]);
        assert!(emit_cdf(&s, 0.0).is_err());
        assert!(emit_cdf(&s, -5.0).is_err());
        assert!(emit_cdf(&s, 15.0).is_err());
    }

    #[test]
    fn cdf_truncates_at_gop() {
        let mut s = stats_from(&[999.0]);
        s.histogram = WaitHistogram::new(10.0, 1000.0);
        s.histogram.record(999.0);
        let rows = emit_cdf(&s, 300.0).unwrap();
        assert_eq!(rows.iter().map(|r| r.upper_ms).collect::<Vec<_>>(), vec![300.0, 600.0, 900.0, 1000.0]);
        assert_eq!(rows[3].fraction, 1.0);
    }

    #[test]
    fn table2_identical_is_zero_and_missing_cell_errors() {
        let base = ScenarioConfig::default();
        let mut a = SweepResult::new("a", base.clone(), vec![3], vec![2, 3, 4]);
        for w in [2, 3, 4] {
            a.insert(3, w, stats_from(&[100.0 * w as f64]));
        }
        let cells = emit_table2(&a, &a, &[3]).unwrap();
        assert_eq!(cells.len(), 3);
        assert!(cells.iter().all(|c| c.degradation_pct == 0.0));

        let b = SweepResult::new("b", base, vec![3], vec![2, 3]);
        assert!(matches!(emit_table2(&a, &b, &[3]), Err(Error::IncompleteSweep(_))));
    }

    #[test]
    fn summary_round_trip_and_agreement() {
        let cfg = ScenarioConfig::default();
        let stats = stats_from(&[120.123_456_789, 480.0, 333.333_333_333]);
        let base = stats_from(&[500.0, 500.0, 500.0]);
        let rec = emit_summary(&cfg, &stats, &base).unwrap();
        assert_eq!(
            rec.improvement_pct,
            round6(improvement_vs_baseline(&stats, &base).unwrap())
        );

        let mut csv_buf = Vec::new();
        write_summary_csv(&mut csv_buf, std::slice::from_ref(&rec)).unwrap();
        let text = String::from_utf8(csv_buf.clone()).unwrap();
        assert!(text.starts_with("channels,shape,gop_ms,separation,max_wait,ordering,"));
        let back = read_summary_csv(csv_buf.as_slice()).unwrap();
        assert_eq!(back, vec![rec.clone()]);

        let mut json_buf = Vec::new();
        write_summary_json(&mut json_buf, std::slice::from_ref(&rec)).unwrap();
        let from_json: Vec<SummaryRecord> = serde_json::from_slice(&json_buf).unwrap();
        assert_eq!(from_json, back);
    }

    #[test]
    fn summary_rejects_wrong_header() {
        assert!(read_summary_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
