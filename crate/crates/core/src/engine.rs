//! Seeded Monte Carlo driver for surfing periods.
//!
//! Each episode draws a start channel from the watch distribution, a target
//! from the switching model, and a press instant uniform over one GOP. The
//! viewer then surfs along the shortest direction of their own grid while
//! the reordering policy decides which channel each press actually shows.
//! The episode ends when the target is shown.
//!
//! Episode `i` draws from three ChaCha8 streams derived from
//! `(master_seed, i)`: the episode setup (start, target, first press), the
//! per-episode inputs (a client grid or random shifts, when configured) and
//! the dwell between presses. Two configurations run with the same seed
//! therefore see the same viewers, which pairs their episodes.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::{ChannelGrid, Direction, OrderingKind};
use crate::phase::{PhaseSchedule, ShiftKind};
use crate::policy::{select_next, PolicyParams, SurfPlan, TraceStep};
use crate::popularity::{PopularityModel, SwitchingKind, SwitchingModel};

/// Waits at or below this are counted separately in every report.
pub const CRITICAL_WAIT_MS: f64 = 250.0;

const CHUNK_EPISODES: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClientOrdering {
    SameAsNetwork,
    Randomized,
}

impl ClientOrdering {
    pub fn label(self) -> &'static str {
        match self {
            ClientOrdering::SameAsNetwork => "same",
            ClientOrdering::Randomized => "randomized",
        }
    }
}

impl FromStr for ClientOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "same" | "same-as-network" => Ok(ClientOrdering::SameAsNetwork),
            "randomized" => Ok(ClientOrdering::Randomized),
            other => invalid(format!("unknown client ordering `{other}`")),
        }
    }
}

/// Time the viewer lingers on a channel after its key frame arrives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dwell {
    Zero,
    Fixed(f64),
    /// Uniform over one GOP, which makes every press phase uniform.
    UniformGop,
}

impl fmt::Display for Dwell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dwell::Zero => f.write_str("zero"),
            Dwell::Fixed(ms) => write!(f, "fixed:{ms}"),
            Dwell::UniformGop => f.write_str("uniform-gop"),
        }
    }
}

impl FromStr for Dwell {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Dwell::Zero),
            "uniform-gop" => Ok(Dwell::UniformGop),
            other => match other.strip_prefix("fixed:") {
                Some(ms) => match ms.parse::<f64>() {
                    Ok(v) if v.is_finite() && v >= 0.0 => Ok(Dwell::Fixed(v)),
                    _ => invalid(format!("bad fixed dwell `{ms}`")),
                },
                None => invalid(format!(
                    "unknown dwell `{other}` (expected zero, fixed:<ms> or uniform-gop)"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub session_count: usize,
    pub shape: f64,
    pub gop_ms: f64,
    pub separation: u32,
    pub max_wait: usize,
    pub ordering: OrderingKind,
    pub client_ordering: ClientOrdering,
    pub shifts: ShiftKind,
    pub dwell: Dwell,
    pub switching: SwitchingKind,
    pub event_budget: u64,
    pub master_seed: u64,
    pub bin_ms: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            session_count: 100,
            shape: 1.0,
            gop_ms: 1000.0,
            separation: 4,
            max_wait: 4,
            ordering: OrderingKind::OneStep,
            client_ordering: ClientOrdering::SameAsNetwork,
            shifts: ShiftKind::Laddered,
            dwell: Dwell::UniformGop,
            switching: SwitchingKind::DestinationProportional,
            event_budget: 1_000_000,
            master_seed: 1,
            bin_ms: 10.0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.session_count < 2 {
            return invalid("simulation needs at least two channels");
        }
        if !(self.shape.is_finite() && self.shape >= 0.0) {
            return invalid("zipf shape must be finite and nonnegative");
        }
        if !(self.gop_ms.is_finite() && self.gop_ms > 0.0) {
            return invalid("GOP duration must be positive");
        }
        if self.max_wait == 0 {
            return invalid("maximum wait window must be at least 1");
        }
        if self.shifts == ShiftKind::Laddered && self.separation < 2 {
            return invalid("laddered shifts need a separation of at least 2");
        }
        if self.ordering == OrderingKind::Randomized {
            return invalid("network ordering must be identity, one-step or two-step");
        }
        if self.event_budget == 0 {
            return invalid("event budget must be at least 1");
        }
        if !(self.bin_ms.is_finite() && self.bin_ms > 0.0) {
            return invalid("histogram bin width must be positive");
        }
        if let Dwell::Fixed(ms) = self.dwell {
            if !(ms.is_finite() && ms >= 0.0) {
                return invalid("fixed dwell must be nonnegative");
            }
        }
        Ok(())
    }

    /// Same viewers, no reordering.
    pub fn baseline(&self) -> Self {
        Self {
            max_wait: 1,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub start: usize,
    pub target: usize,
    pub direction: Direction,
    /// Original index of the target, i.e. its shortest distance.
    pub target_index: usize,
    pub switch_count: usize,
    /// Original index shown at each press.
    pub selected: Vec<usize>,
    pub per_switch_wait_ms: Vec<f64>,
    pub accumulative_wait_ms: f64,
}

/// The random streams of one episode.
pub struct EpisodeRng {
    pub setup: ChaCha8Rng,
    pub inputs: ChaCha8Rng,
    pub dwell: ChaCha8Rng,
}

impl EpisodeRng {
    pub fn new(master_seed: u64, episode: u64) -> Self {
        let stream = |k: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(episode.wrapping_mul(3).wrapping_add(k));
            rng
        };
        Self {
            setup: stream(0),
            inputs: stream(1),
            dwell: stream(2),
        }
    }
}

/// Runs one surfing period to completion.
///
/// `schedule` is indexed by position on the network grid; the viewer moves
/// along `client`. Draws start, target and the first press instant from
/// `rng.setup`, and one dwell per press from `rng.dwell`.
#[allow(clippy::too_many_arguments)]
pub fn run_episode(
    config: &ScenarioConfig,
    network: &ChannelGrid,
    client: &ChannelGrid,
    schedule: &PhaseSchedule,
    switching: &SwitchingModel<'_>,
    rng: &mut EpisodeRng,
    mut trace: Option<&mut Vec<TraceStep>>,
) -> EpisodeResult {
    let n = network.session_count();
    let start = switching.popularity().sample_watch(rng.setup.random());
    let target = switching.sample_dest(start, rng.setup.random());
    let mut now = rng.setup.random::<f64>() * config.gop_ms;

    let start_pos = client.position(start);
    let dist = client.position_distances(start_pos, client.position(target));
    let direction = dist.shortest_direction();
    let slots = (1..n)
        .map(|r| network.position(client.rank_at(client.step(start_pos, direction, r))))
        .collect();
    let mut plan = SurfPlan::new(direction, slots);
    let params = PolicyParams::new(config.max_wait, config.separation).expect("validated config");

    let mut selected = Vec::with_capacity(dist.min + config.max_wait);
    let mut waits = Vec::with_capacity(dist.min + config.max_wait);
    let mut accumulative = 0.0;
    loop {
        let sel = select_next(&mut plan, &params, schedule, now);
        selected.push(sel.index);
        waits.push(sel.wait_ms);
        accumulative += sel.wait_ms;
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceStep {
                request: selected.len(),
                original_index: sel.index,
                slot: sel.slot,
                wait_ms: sel.wait_ms,
            });
        }
        now += sel.wait_ms
            + match config.dwell {
                Dwell::Zero => 0.0,
                Dwell::Fixed(ms) => ms,
                Dwell::UniformGop => rng.dwell.random::<f64>() * config.gop_ms,
            };
        if sel.index == dist.min {
            break;
        }
    }

    EpisodeResult {
        start,
        target,
        direction,
        target_index: dist.min,
        switch_count: waits.len(),
        selected,
        per_switch_wait_ms: waits,
        accumulative_wait_ms: accumulative,
    }
}

/// A validated configuration with its shared, immutable inputs built.
#[derive(Debug, Clone)]
pub struct Scenario {
    config: ScenarioConfig,
    popularity: PopularityModel,
    network: ChannelGrid,
    laddered: Option<PhaseSchedule>,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let popularity = PopularityModel::zipf(config.session_count, config.shape)?;
        let network = ChannelGrid::build(config.ordering, config.session_count)?;
        let laddered = match config.shifts {
            ShiftKind::Laddered => Some(PhaseSchedule::laddered(
                config.gop_ms,
                config.separation,
                config.session_count,
            )?),
            ShiftKind::Randomized => None,
        };
        Ok(Self {
            config,
            popularity,
            network,
            laddered,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn popularity(&self) -> &PopularityModel {
        &self.popularity
    }

    pub fn network(&self) -> &ChannelGrid {
        &self.network
    }

    pub fn run_episode(&self, episode: u64) -> EpisodeResult {
        self.episode_inner(episode, None)
    }

    /// Runs an episode and also returns its press-by-press trace.
    pub fn trace_episode(&self, episode: u64) -> (EpisodeResult, Vec<TraceStep>) {
        let mut trace = Vec::new();
        let result = self.episode_inner(episode, Some(&mut trace));
        (result, trace)
    }

    fn episode_inner(&self, episode: u64, trace: Option<&mut Vec<TraceStep>>) -> EpisodeResult {
        let n = self.config.session_count;
        let mut rng = EpisodeRng::new(self.config.master_seed, episode);
        let client = match self.config.client_ordering {
            ClientOrdering::SameAsNetwork => None,
            ClientOrdering::Randomized => {
                let u: Vec<f64> = (0..n).map(|_| rng.inputs.random()).collect();
                Some(ChannelGrid::randomized(&self.popularity, &u).expect("sizes match"))
            }
        };
        let random_schedule = match self.config.shifts {
            ShiftKind::Laddered => None,
            ShiftKind::Randomized => {
                let u: Vec<f64> = (0..n).map(|_| rng.inputs.random()).collect();
                Some(PhaseSchedule::randomized(self.config.gop_ms, &u).expect("uniforms in range"))
            }
        };
        let schedule = self
            .laddered
            .as_ref()
            .or(random_schedule.as_ref())
            .expect("one schedule is always built");
        let switching = SwitchingModel::new(self.config.switching, &self.popularity);
        run_episode(
            &self.config,
            &self.network,
            client.as_ref().unwrap_or(&self.network),
            schedule,
            &switching,
            &mut rng,
            trace,
        )
    }
}

/// Equal-width histogram of per-switch waits over `[0, gop_ms)`.
///
/// Bin `k` holds waits in `(k·bin, (k+1)·bin]`, with zero waits in bin 0,
/// so cumulative counts at an edge are counts of waits `<=` that edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaitHistogram {
    pub bin_ms: f64,
    pub gop_ms: f64,
    pub counts: Vec<u64>,
}

impl WaitHistogram {
    pub fn new(bin_ms: f64, gop_ms: f64) -> Self {
        let bins = (gop_ms / bin_ms).ceil().max(1.0) as usize;
        Self {
            bin_ms,
            gop_ms,
            counts: vec![0; bins],
        }
    }

    pub fn record(&mut self, wait_ms: f64) {
        let k = ((wait_ms / self.bin_ms).ceil() as usize).saturating_sub(1);
        let last = self.counts.len() - 1;
        self.counts[k.min(last)] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Upper edge of bin `k`, truncated at the GOP duration.
    pub fn upper_edge(&self, k: usize) -> f64 {
        ((k + 1) as f64 * self.bin_ms).min(self.gop_ms)
    }

    fn merge(&mut self, other: &WaitHistogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub events: u64,
    pub episodes: u64,
    pub mean_wait_ms: f64,
    pub median_wait_ms: f64,
    pub p95_wait_ms: f64,
    pub frac_le_250ms: f64,
    pub mean_switches: f64,
    /// Standard error of `mean_switches`.
    pub switches_std_err: f64,
    pub mean_accumulative_ms: f64,
    /// Mean wait of the press that reached the target.
    pub mean_final_wait_ms: f64,
    pub histogram: WaitHistogram,
}

/// Running totals over episodes.
///
/// Merging is associative; the engine still folds episodes in index order
/// so that float sums come out bit-identical for any thread count.
#[derive(Debug, Clone)]
pub struct StatsAccumulator {
    waits: Vec<f64>,
    histogram: WaitHistogram,
    episodes: u64,
    sum_wait: f64,
    le_critical: u64,
    sum_switches: f64,
    sum_switches_sq: f64,
    sum_accumulative: f64,
    sum_final_wait: f64,
}

impl StatsAccumulator {
    pub fn new(bin_ms: f64, gop_ms: f64) -> Self {
        Self {
            waits: Vec::new(),
            histogram: WaitHistogram::new(bin_ms, gop_ms),
            episodes: 0,
            sum_wait: 0.0,
            le_critical: 0,
            sum_switches: 0.0,
            sum_switches_sq: 0.0,
            sum_accumulative: 0.0,
            sum_final_wait: 0.0,
        }
    }

    pub fn events(&self) -> u64 {
        self.waits.len() as u64
    }

    pub fn push(&mut self, ep: &EpisodeResult) {
        for &w in &ep.per_switch_wait_ms {
            self.waits.push(w);
            self.histogram.record(w);
            self.sum_wait += w;
            if w <= CRITICAL_WAIT_MS {
                self.le_critical += 1;
            }
        }
        let k = ep.switch_count as f64;
        self.episodes += 1;
        self.sum_switches += k;
        self.sum_switches_sq += k * k;
        self.sum_accumulative += ep.accumulative_wait_ms;
        self.sum_final_wait += ep.per_switch_wait_ms.last().copied().unwrap_or(0.0);
    }

    pub fn merge(&mut self, other: StatsAccumulator) {
        self.waits.extend(other.waits);
        self.histogram.merge(&other.histogram);
        self.episodes += other.episodes;
        self.sum_wait += other.sum_wait;
        self.le_critical += other.le_critical;
        self.sum_switches += other.sum_switches;
        self.sum_switches_sq += other.sum_switches_sq;
        self.sum_accumulative += other.sum_accumulative;
        self.sum_final_wait += other.sum_final_wait;
    }

    pub fn finish(mut self) -> AggregateStats {
        let events = self.waits.len() as u64;
        let ev = events.max(1) as f64;
        let eps = self.episodes.max(1) as f64;
        self.waits.sort_unstable_by(f64::total_cmp);
        let mean_switches = self.sum_switches / eps;
        let var = (self.sum_switches_sq / eps - mean_switches * mean_switches).max(0.0);
        let std_err = if self.episodes > 1 {
            (var * eps / (eps - 1.0)).sqrt() / eps.sqrt()
        } else {
            0.0
        };
        AggregateStats {
            events,
            episodes: self.episodes,
            mean_wait_ms: self.sum_wait / ev,
            median_wait_ms: nearest_rank(&self.waits, 0.5),
            p95_wait_ms: nearest_rank(&self.waits, 0.95),
            frac_le_250ms: self.le_critical as f64 / ev,
            mean_switches,
            switches_std_err: std_err,
            mean_accumulative_ms: self.sum_accumulative / eps,
            mean_final_wait_ms: self.sum_final_wait / eps,
            histogram: self.histogram,
        }
    }
}

fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Runs episodes until the switch-event budget is reached. The episode that
/// crosses the budget still runs to completion.
pub fn run_scenario(config: &ScenarioConfig) -> Result<AggregateStats> {
    let scenario = Scenario::new(config.clone())?;
    Ok(run_prepared(&scenario))
}

/// As [`run_scenario`] on a dedicated pool of `threads` workers.
pub fn run_scenario_with_threads(config: &ScenarioConfig, threads: usize) -> Result<AggregateStats> {
    let scenario = Scenario::new(config.clone())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(|| run_prepared(&scenario)))
}

pub fn run_prepared(scenario: &Scenario) -> AggregateStats {
    let config = scenario.config();
    let mut acc = StatsAccumulator::new(config.bin_ms, config.gop_ms);
    let mut next = 0u64;
    while acc.events() < config.event_budget {
        let chunk: Vec<EpisodeResult> = (next..next + CHUNK_EPISODES)
            .into_par_iter()
            .map(|i| scenario.run_episode(i))
            .collect();
        for ep in &chunk {
            if acc.events() >= config.event_budget {
                break;
            }
            acc.push(ep);
        }
        next += CHUNK_EPISODES;
    }
    acc.finish()
}

/// `100 · (reference - value) / reference`.
pub fn percent_improvement(value: f64, reference: f64) -> Result<f64> {
    if reference == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(100.0 * (reference - value) / reference)
}

/// Mean per-switch latency improvement over the baseline, in percent.
pub fn improvement_vs_baseline(stats: &AggregateStats, baseline: &AggregateStats) -> Result<f64> {
    percent_improvement(stats.mean_wait_ms, baseline.mean_wait_ms)
}

/// Same as [`improvement_vs_baseline`] for the per-episode accumulated wait.
pub fn accumulative_improvement(stats: &AggregateStats, baseline: &AggregateStats) -> Result<f64> {
    percent_improvement(stats.mean_accumulative_ms, baseline.mean_accumulative_ms)
}

/// Relative increase in switches per episode over the baseline, in percent.
pub fn switch_overhead(stats: &AggregateStats, baseline: &AggregateStats) -> Result<f64> {
    percent_improvement(stats.mean_switches, baseline.mean_switches).map(|v| -v)
}
