//! Channel popularity and switching-probability models.
//!
//! Sessions are identified by popularity rank, `1` being the most watched.
//! Ranks are 1-based throughout the public API; vectors are 0-based and
//! indexed by `rank - 1`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Zipf watch distribution over `N` ranked sessions.
#[derive(Debug, Clone, PartialEq)]
pub struct PopularityModel {
    session_count: usize,
    shape: f64,
    watch_prob: Vec<f64>,
    watch_cdf: Vec<f64>,
}

impl PopularityModel {
    /// `π(i) = i^-s / Σ n^-s`.
    pub fn zipf(session_count: usize, shape: f64) -> Result<Self> {
        if session_count == 0 {
            return invalid("session count must be at least 1");
        }
        if !(shape.is_finite() && shape >= 0.0) {
            return invalid(format!("zipf shape must be finite and nonnegative, got {shape}"));
        }
        let weights: Vec<f64> = (1..=session_count)
            .map(|i| 1.0 / (i as f64).powf(shape))
            .collect();
        let norm: f64 = weights.iter().sum();
        let watch_prob: Vec<f64> = weights.iter().map(|w| w / norm).collect();
        let watch_cdf = watch_prob
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Ok(Self {
            session_count,
            shape,
            watch_prob,
            watch_cdf,
        })
    }

    pub fn session_count(&self) -> usize {
        self.session_count
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    /// Watch probabilities indexed by `rank - 1`.
    pub fn watch_prob(&self) -> &[f64] {
        &self.watch_prob
    }

    pub fn watch_cdf(&self) -> &[f64] {
        &self.watch_cdf
    }

    /// Probability of watching the session with the given 1-based rank.
    pub fn prob(&self, rank: usize) -> f64 {
        self.watch_prob[rank - 1]
    }

    /// Inverse-CDF draw: the smallest rank whose cumulative probability
    /// exceeds `uniform`.
    pub fn sample_watch(&self, uniform: f64) -> usize {
        let idx = self.watch_cdf.partition_point(|&c| c <= uniform);
        // Rounding can leave the last CDF entry a hair below 1.
        idx.min(self.session_count - 1) + 1
    }
}

/// How a viewer picks the destination of a surfing period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchingKind {
    /// `p(i,j) = π(j) / (1 - π(i))`.
    #[default]
    DestinationProportional,
    /// `p(i,j) = 1 / (N - 1)`, popularity-blind.
    Uniform,
}

impl SwitchingKind {
    pub fn label(self) -> &'static str {
        match self {
            SwitchingKind::DestinationProportional => "destination-proportional",
            SwitchingKind::Uniform => "uniform",
        }
    }
}

/// Switching matrix `p(i,j)` derived from a popularity model.
#[derive(Debug, Clone, Copy)]
pub struct SwitchingModel<'a> {
    kind: SwitchingKind,
    underlying: &'a PopularityModel,
}

impl<'a> SwitchingModel<'a> {
    pub fn new(kind: SwitchingKind, underlying: &'a PopularityModel) -> Self {
        Self { kind, underlying }
    }

    pub fn destination_proportional(underlying: &'a PopularityModel) -> Self {
        Self::new(SwitchingKind::DestinationProportional, underlying)
    }

    pub fn kind(&self) -> SwitchingKind {
        self.kind
    }

    pub fn popularity(&self) -> &'a PopularityModel {
        self.underlying
    }

    /// Probability of switching from rank `source` to rank `dest`.
    pub fn switch_prob(&self, source: usize, dest: usize) -> Result<f64> {
        let n = self.underlying.session_count();
        if source == dest {
            return invalid("switch source and destination must differ");
        }
        if !(1..=n).contains(&source) || !(1..=n).contains(&dest) {
            return invalid(format!("ranks must lie in 1..={n}"));
        }
        Ok(self.prob_unchecked(source, dest))
    }

    fn prob_unchecked(&self, source: usize, dest: usize) -> f64 {
        match self.kind {
            SwitchingKind::DestinationProportional => {
                self.underlying.prob(dest) / (1.0 - self.underlying.prob(source))
            }
            SwitchingKind::Uniform => 1.0 / (self.underlying.session_count() - 1) as f64,
        }
    }

    /// Draws a destination for `source` by inverting the row CDF of
    /// `p(source, ·)`. Requires `N >= 2`.
    pub fn sample_dest(&self, source: usize, uniform: f64) -> usize {
        let n = self.underlying.session_count();
        debug_assert!(n >= 2);
        let dest = match self.kind {
            SwitchingKind::DestinationProportional => {
                // Walk the unconditioned CDF with the source's mass cut out.
                let cdf = self.underlying.watch_cdf();
                let p_src = self.underlying.prob(source);
                let before = if source == 1 { 0.0 } else { cdf[source - 2] };
                let mut target = uniform * (1.0 - p_src);
                if target >= before {
                    target += p_src;
                }
                let idx = cdf.partition_point(|&c| c <= target).min(n - 1) + 1;
                if idx == source {
                    // Only reachable through rounding at the boundary.
                    if source == n {
                        n - 1
                    } else {
                        source + 1
                    }
                } else {
                    idx
                }
            }
            SwitchingKind::Uniform => {
                let k = ((uniform * (n - 1) as f64) as usize).min(n - 2) + 1;
                if k >= source {
                    k + 1
                } else {
                    k
                }
            }
        };
        debug_assert_ne!(dest, source);
        dest
    }
}
