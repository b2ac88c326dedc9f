//! Key-frame phase schedules.
//!
//! Every circular position of the network grid carries a key-frame start
//! phase in `[0, gop_ms)`. A request for a channel at time `now` waits until
//! the next instant whose phase matches the channel's shift.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftKind {
    Laddered,
    Randomized,
}

impl ShiftKind {
    pub fn label(self) -> &'static str {
        match self {
            ShiftKind::Laddered => "laddered",
            ShiftKind::Randomized => "randomized",
        }
    }
}

impl std::str::FromStr for ShiftKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "laddered" => Ok(ShiftKind::Laddered),
            "randomized" => Ok(ShiftKind::Randomized),
            other => invalid(format!("unknown shift kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSchedule {
    gop_ms: f64,
    /// `S`; zero for randomized schedules.
    separation: u32,
    shift_ms: Vec<f64>,
    kind: ShiftKind,
}

impl PhaseSchedule {
    /// Adjacent positions are `gop_ms / S` apart, so positions `k` and
    /// `k + S` share a phase.
    pub fn laddered(gop_ms: f64, separation: u32, session_count: usize) -> Result<Self> {
        check_gop(gop_ms)?;
        if separation < 2 {
            return invalid(format!("separation must be at least 2, got {separation}"));
        }
        let step = gop_ms / f64::from(separation);
        let s = separation as usize;
        let shift_ms = (0..session_count).map(|k| (k % s) as f64 * step).collect();
        Ok(Self {
            gop_ms,
            separation,
            shift_ms,
            kind: ShiftKind::Laddered,
        })
    }

    /// One shift per position, `uniforms[k] * gop_ms`.
    pub fn randomized(gop_ms: f64, uniforms: &[f64]) -> Result<Self> {
        check_gop(gop_ms)?;
        if let Some(u) = uniforms.iter().find(|u| !(0.0..1.0).contains(*u)) {
            return invalid(format!("shift uniforms must lie in [0, 1), got {u}"));
        }
        Ok(Self {
            gop_ms,
            separation: 0,
            shift_ms: uniforms.iter().map(|u| u * gop_ms).collect(),
            kind: ShiftKind::Randomized,
        })
    }

    pub fn gop_ms(&self) -> f64 {
        self.gop_ms
    }

    pub fn separation(&self) -> u32 {
        self.separation
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shift_ms
    }

    pub fn shift(&self, position: usize) -> f64 {
        self.shift_ms[position]
    }

    /// Time from `now_ms` until the next key frame at `position` starts.
    pub fn wait_until_keyframe(&self, position: usize, now_ms: f64) -> f64 {
        wait_for_phase(self.shift_ms[position], now_ms, self.gop_ms)
    }
}

/// `(shift - now mod gop) mod gop`, always in `[0, gop)`.
pub fn wait_for_phase(shift_ms: f64, now_ms: f64, gop_ms: f64) -> f64 {
    let w = (shift_ms - now_ms.rem_euclid(gop_ms)).rem_euclid(gop_ms);
    // rem_euclid can round up to exactly `gop` for tiny negative inputs.
    if w >= gop_ms {
        0.0
    } else {
        w
    }
}

fn check_gop(gop_ms: f64) -> Result<()> {
    if gop_ms.is_finite() && gop_ms > 0.0 {
        Ok(())
    } else {
        invalid(format!("GOP duration must be positive, got {gop_ms}"))
    }
}
