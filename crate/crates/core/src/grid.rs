//! Circular channel placements.
//!
//! A grid places every ranked session on one of `N` slots around a circle.
//! Position `0` always holds rank 1 for the deterministic layouts, and
//! "clockwise" (up) means increasing position index.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::popularity::PopularityModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingKind {
    Identity,
    OneStep,
    TwoStep,
    Randomized,
}

impl OrderingKind {
    pub fn label(self) -> &'static str {
        match self {
            OrderingKind::Identity => "identity",
            OrderingKind::OneStep => "one-step",
            OrderingKind::TwoStep => "two-step",
            OrderingKind::Randomized => "randomized",
        }
    }
}

impl fmt::Display for OrderingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for OrderingKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(OrderingKind::Identity),
            "one-step" => Ok(OrderingKind::OneStep),
            "two-step" => Ok(OrderingKind::TwoStep),
            "randomized" => Ok(OrderingKind::Randomized),
            other => invalid(format!("unknown ordering `{other}`")),
        }
    }
}

/// How the two-step layout opens before it starts alternating pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TwoStepLead {
    /// Ranks 1 and 2 go clockwise together, then 3,4 counterclockwise,
    /// 5,6 clockwise and so on. Matches the published two-step figures.
    #[default]
    Pair,
    /// Rank 1 sits alone, then 2,3 clockwise, 4,5 counterclockwise, ...
    Solo,
}

/// Direction of travel around the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Distances {
    pub up: usize,
    pub down: usize,
    pub min: usize,
}

impl Distances {
    /// Shortest direction, antipodal ties going up.
    pub fn shortest_direction(&self) -> Direction {
        if self.up <= self.down {
            Direction::Up
        } else {
            Direction::Down
        }
    }
}

/// A bijection between popularity ranks and circular positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelGrid {
    /// `place[rank - 1]` is the position of that rank.
    place: Vec<usize>,
    /// `place_inv[position]` is the rank at that position.
    place_inv: Vec<usize>,
    label: OrderingKind,
}

impl ChannelGrid {
    /// Builds a grid from the rank found at each position, in position order.
    pub fn from_position_ranks(ranks: Vec<usize>, label: OrderingKind) -> Result<Self> {
        let n = ranks.len();
        if n == 0 {
            return invalid("grid must hold at least one session");
        }
        let mut place = vec![usize::MAX; n];
        for (pos, &rank) in ranks.iter().enumerate() {
            if rank == 0 || rank > n {
                return invalid(format!("rank {rank} out of range 1..={n}"));
            }
            if place[rank - 1] != usize::MAX {
                return invalid(format!("rank {rank} placed twice"));
            }
            place[rank - 1] = pos;
        }
        Ok(Self {
            place,
            place_inv: ranks,
            label,
        })
    }

    fn from_place(place: Vec<usize>, label: OrderingKind) -> Self {
        let mut place_inv = vec![0; place.len()];
        for (r, &pos) in place.iter().enumerate() {
            place_inv[pos] = r + 1;
        }
        Self {
            place,
            place_inv,
            label,
        }
    }

    pub fn identity(session_count: usize) -> Result<Self> {
        check_count(session_count)?;
        Ok(Self::from_place(
            (0..session_count).collect(),
            OrderingKind::Identity,
        ))
    }

    /// Even ranks fan out clockwise from rank 1, odd ranks counterclockwise.
    pub fn one_step(session_count: usize) -> Result<Self> {
        check_count(session_count)?;
        let n = session_count;
        let mut place = vec![0; n];
        let (mut cw, mut ccw) = (1, n - 1);
        for rank in 2..=n {
            if rank % 2 == 0 {
                place[rank - 1] = cw;
                cw += 1;
            } else {
                place[rank - 1] = ccw;
                ccw -= 1;
            }
        }
        Ok(Self::from_place(place, OrderingKind::OneStep))
    }

    pub fn two_step(session_count: usize) -> Result<Self> {
        Self::two_step_with(session_count, TwoStepLead::Pair)
    }

    /// Ranks are laid down two at a time, alternating direction after every
    /// pair.
    pub fn two_step_with(session_count: usize, lead: TwoStepLead) -> Result<Self> {
        check_count(session_count)?;
        let n = session_count;
        let mut place = vec![0; n];
        let first_paired = match lead {
            TwoStepLead::Pair => 1,
            TwoStepLead::Solo => 2,
        };
        let (mut cw, mut ccw) = (first_paired - 1, n - 1);
        for rank in first_paired..=n {
            let clockwise = ((rank - first_paired) / 2) % 2 == 0;
            if clockwise {
                place[rank - 1] = cw;
                cw += 1;
            } else {
                place[rank - 1] = ccw;
                ccw -= 1;
            }
        }
        Ok(Self::from_place(place, OrderingKind::TwoStep))
    }

    /// Popularity-weighted random placement.
    ///
    /// Fills positions `0, 1, ...` in turn. At step `k` the still-unplaced
    /// sessions, in popularity order, are renormalized into a cumulative
    /// array `Π`, and the first session with `uniforms[k] <= Π(loc)` takes
    /// position `k`. Early positions therefore favour popular sessions.
    pub fn randomized(base: &PopularityModel, uniforms: &[f64]) -> Result<Self> {
        let n = base.session_count();
        if uniforms.len() != n {
            return invalid(format!(
                "randomized ordering needs {n} uniforms, got {}",
                uniforms.len()
            ));
        }
        let pi = base.watch_prob();
        let mut unassigned: Vec<usize> = (1..=n).collect();
        let mut place_inv = Vec::with_capacity(n);
        for &u in uniforms {
            let total: f64 = unassigned.iter().map(|&r| pi[r - 1]).sum();
            let mut cum = 0.0;
            let mut loc = unassigned.len() - 1;
            for (i, &r) in unassigned.iter().enumerate() {
                cum += pi[r - 1];
                if u <= cum / total {
                    loc = i;
                    break;
                }
            }
            place_inv.push(unassigned.remove(loc));
        }
        Self::from_position_ranks(place_inv, OrderingKind::Randomized)
    }

    pub fn build(kind: OrderingKind, session_count: usize) -> Result<Self> {
        match kind {
            OrderingKind::Identity => Self::identity(session_count),
            OrderingKind::OneStep => Self::one_step(session_count),
            OrderingKind::TwoStep => Self::two_step(session_count),
            OrderingKind::Randomized => {
                invalid("randomized grids need a popularity model and uniforms")
            }
        }
    }

    pub fn session_count(&self) -> usize {
        self.place.len()
    }

    pub fn label(&self) -> OrderingKind {
        self.label
    }

    /// Position of a 1-based rank.
    pub fn position(&self, rank: usize) -> usize {
        self.place[rank - 1]
    }

    /// Rank held at a position.
    pub fn rank_at(&self, position: usize) -> usize {
        self.place_inv[position]
    }

    /// Ranks in position order.
    pub fn position_ranks(&self) -> &[usize] {
        &self.place_inv
    }

    /// The position `steps` slots away from `from` in `direction`.
    pub fn step(&self, from: usize, direction: Direction, steps: usize) -> usize {
        let n = self.session_count();
        match direction {
            Direction::Up => (from + steps) % n,
            Direction::Down => (from + n - steps % n) % n,
        }
    }

    pub fn position_distances(&self, from_pos: usize, to_pos: usize) -> Distances {
        let n = self.session_count();
        let up = (to_pos + n - from_pos) % n;
        let down = (from_pos + n - to_pos) % n;
        Distances {
            up,
            down,
            min: up.min(down),
        }
    }

    /// Switching distances between two distinct ranks.
    pub fn distances(&self, from: usize, to: usize) -> Result<Distances> {
        let n = self.session_count();
        if from == to {
            return invalid("distance endpoints must differ");
        }
        if !(1..=n).contains(&from) || !(1..=n).contains(&to) {
            return invalid(format!("ranks must lie in 1..={n}"));
        }
        Ok(self.position_distances(self.position(from), self.position(to)))
    }

    /// Watch probability found at each position.
    pub fn position_probabilities(&self, base: &PopularityModel) -> Vec<f64> {
        self.place_inv.iter().map(|&r| base.prob(r)).collect()
    }

    /// Comma-separated ranks in position order.
    pub fn to_csv_line(&self) -> String {
        let parts: Vec<String> = self.place_inv.iter().map(|r| r.to_string()).collect();
        parts.join(",")
    }

    pub fn from_csv_line(line: &str, label: OrderingKind) -> Result<Self> {
        let ranks = line
            .trim()
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| crate::Error::InvalidParameter(format!("bad rank `{s}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_position_ranks(ranks, label)
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        invalid("session count must be at least 1")
    } else {
        Ok(())
    }
}

/// Watch probabilities of `randomized`, slot-aligned with `original` so the
/// two position vectors can be compared directly.
pub fn remap_probabilities(
    base: &PopularityModel,
    original: &ChannelGrid,
    randomized: &ChannelGrid,
) -> Result<Vec<f64>> {
    let n = base.session_count();
    if original.session_count() != n || randomized.session_count() != n {
        return invalid(format!(
            "grid sizes {} and {} do not match popularity model of {n}",
            original.session_count(),
            randomized.session_count()
        ));
    }
    Ok(randomized.position_probabilities(base))
}
