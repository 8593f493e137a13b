//! Baseband → cursor: static-vector removal by local extreme value detection,
//! phase unwrapping, phase-to-displacement conversion and One-Euro smoothing.

mod levd;
mod one_euro;
mod phase;
mod tracker;

pub use levd::{LevdConfig, LevdSample, LevdState};
pub use one_euro::{OneEuroConfig, OneEuroState};
pub use phase::PhaseTrack;
pub use tracker::{CursorState, Tracker, TrackerConfig};
