//! Channel-change latency modelling for IPTV with time-shifted key frames.
//!
//! Adjacent channels on the circular channel list start their key frames
//! `T_GOP / S` apart. While a viewer surfs, the client may show channels
//! slightly out of list order, picking whichever key frame is due soonest,
//! as long as no channel moves more than `ΔW - 1` presses from its place.
//!
//! Modules, bottom-up:
//!
//! - [`popularity`]: Zipf watch distribution and the switching model.
//! - [`grid`]: circular placements and distances.
//! - [`phase`]: key-frame phase schedules.
//! - [`policy`]: the wait-bounded reordering window.
//! - [`analytics`]: exact expected switch counts.
//! - [`engine`]: the seeded Monte Carlo driver.
//! - [`report`]: CSV and JSON emitters.

pub mod analytics;
pub mod engine;
mod error;
pub mod grid;
pub mod phase;
pub mod policy;
pub mod popularity;
pub mod report;

pub use engine::{AggregateStats, ClientOrdering, Dwell, EpisodeResult, Scenario, ScenarioConfig};
pub use error::{Error, Result};
pub use grid::{ChannelGrid, Direction, OrderingKind};
pub use phase::{PhaseSchedule, ShiftKind};
pub use policy::{PolicyParams, SurfPlan};
pub use popularity::{PopularityModel, SwitchingKind, SwitchingModel};
