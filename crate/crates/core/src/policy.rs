//! Wait-bounded dynamic reordering.
//!
//! A surfing viewer presses up (or down) repeatedly. Without reordering the
//! `n`-th press shows the channel `n` slots away, its *original index*. The
//! policy may instead show any unvisited channel from a window of `ΔW`
//! original indices starting at the smallest unvisited one, `r_min`, picking
//! whichever key frame arrives first. Because the window is anchored at
//! `r_min`, a channel can be deferred or advanced by at most `ΔW - 1` presses.

use crate::error::{invalid, Result};
use crate::grid::Direction;
use crate::phase::PhaseSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicyParams {
    max_wait: usize,
    separation: u32,
}

impl PolicyParams {
    pub fn new(max_wait: usize, separation: u32) -> Result<Self> {
        if max_wait == 0 {
            return invalid("maximum wait window must be at least 1 request");
        }
        Ok(Self {
            max_wait,
            separation,
        })
    }

    /// `ΔW`, in requests.
    pub fn max_wait(&self) -> usize {
        self.max_wait
    }

    pub fn separation(&self) -> u32 {
        self.separation
    }
}

/// Per-episode reordering state.
#[derive(Debug, Clone)]
pub struct SurfPlan {
    direction: Direction,
    /// Schedule slot of original index `r` lives at `slots[r - 1]`.
    slots: Vec<usize>,
    /// Indexed by original index; slot 0 is unused.
    visited: Vec<bool>,
    r_min: usize,
    selections: usize,
}

impl SurfPlan {
    /// `slots` lists, in original switching order, the phase-schedule
    /// position of each channel along the direction of travel.
    pub fn new(direction: Direction, slots: Vec<usize>) -> Self {
        let len = slots.len();
        Self {
            direction,
            slots,
            visited: vec![false; len + 1],
            r_min: 1,
            selections: 0,
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Smallest unvisited original index; `len() + 1` once exhausted.
    pub fn r_min(&self) -> usize {
        self.r_min
    }

    pub fn selections(&self) -> usize {
        self.selections
    }

    pub fn is_visited(&self, index: usize) -> bool {
        self.visited[index]
    }

    pub fn has_unvisited(&self) -> bool {
        self.r_min <= self.len()
    }

    pub fn slot(&self, index: usize) -> usize {
        self.slots[index - 1]
    }

    /// Marks an original index as shown and advances `r_min` past the
    /// visited prefix.
    pub fn mark(&mut self, index: usize) {
        debug_assert!(!self.visited[index]);
        self.visited[index] = true;
        self.selections += 1;
        while self.r_min <= self.len() && self.visited[self.r_min] {
            self.r_min += 1;
        }
    }

    fn window_end(&self, params: &PolicyParams) -> usize {
        (self.r_min + params.max_wait - 1).min(self.len())
    }
}

/// Unvisited original indices in `[r_min, r_min + ΔW - 1]`.
pub fn candidate_window(plan: &SurfPlan, params: &PolicyParams) -> Vec<usize> {
    if !plan.has_unvisited() {
        return Vec::new();
    }
    (plan.r_min..=plan.window_end(params))
        .filter(|&r| !plan.visited[r])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub slot: usize,
    pub wait_ms: f64,
}

/// Shows the window member whose key frame arrives soonest after `now_ms`,
/// the lower original index winning ties, and records it as visited.
///
/// Panics if the plan is exhausted.
pub fn select_next(
    plan: &mut SurfPlan,
    params: &PolicyParams,
    schedule: &PhaseSchedule,
    now_ms: f64,
) -> Selection {
    assert!(plan.has_unvisited(), "surf plan exhausted");
    let mut best: Option<Selection> = None;
    for r in plan.r_min..=plan.window_end(params) {
        if plan.visited[r] {
            continue;
        }
        let slot = plan.slots[r - 1];
        let wait_ms = schedule.wait_until_keyframe(slot, now_ms);
        if best.is_none_or(|b| wait_ms < b.wait_ms) {
            best = Some(Selection {
                index: r,
                slot,
                wait_ms,
            });
        }
    }
    let chosen = best.expect("window is never empty while indices remain");
    plan.mark(chosen.index);
    chosen
}

/// True iff every `(request, original index)` pair is within `ΔW - 1` of
/// each other.
pub fn deferral_bound_check(trace: &[(usize, usize)], max_wait: usize) -> bool {
    let limit = max_wait.saturating_sub(1);
    trace.iter().all(|&(n, r)| n.abs_diff(r) <= limit)
}

/// One press of a surfing period, for trace dumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub request: usize,
    pub original_index: usize,
    pub slot: usize,
    pub wait_ms: f64,
}

impl TraceStep {
    pub const CSV_HEADER: &'static str = "request,original_index,slot,wait_ms";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{:.6}",
            self.request, self.original_index, self.slot, self.wait_ms
        )
    }
}
