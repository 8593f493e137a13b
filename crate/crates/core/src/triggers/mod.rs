//! Selection triggers as deterministic state machines.
//!
//! Each machine consumes one time-ordered stream of cursor states (25 Hz)
//! and, for pinch, IMU samples (100 Hz). Merging the two is the caller's job;
//! [`merge_streams`] does it with IMU samples ahead of cursor states at equal
//! timestamps.

mod crossing;
mod dwell;
mod events;
mod haptics;
mod offset;
mod pinch;
mod targets;

use alloc::vec::Vec;

pub use crossing::DoubleCrossing;
pub use dwell::{Dwell, DWELL_S};
pub use events::{reentries_per_selection, EventKind, Haptic, Method, ReentryCounter, TriggerEvent};
pub use haptics::{apply_haptics, ENTER_PULSE, SELECT_PULSE};
pub use offset::{offset_sweep, OffsetRow, OffsetSweep, PinchCase, OFFSETS_MS};
pub use pinch::{PinchDetector, PinchDetectorConfig, PinchTrigger};
pub use targets::{Edge, Target, TargetSet};

use crate::simulate::ImuSample;
use crate::tracking::CursorState;
use crate::Result;

/// A selection mechanism driven by cursor and IMU samples.
///
/// `highlighted` is the study's current goal target, used to tell a correct
/// selection from an erroneous one.
pub trait SelectionMachine {
    fn method(&self) -> Method;

    fn targets(&self) -> &TargetSet;

    fn on_cursor(&mut self, cursor: &CursorState, highlighted: Option<u32>) -> Result<Vec<TriggerEvent>>;

    fn on_imu(&mut self, _sample: &ImuSample, _highlighted: Option<u32>) -> Result<Vec<TriggerEvent>> {
        Ok(Vec::new())
    }
}

/// One item of a merged input stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Input<'a> {
    Cursor(&'a CursorState),
    Imu(&'a ImuSample),
}

impl Input<'_> {
    pub fn time(&self) -> f64 {
        match self {
            Input::Cursor(c) => c.time,
            Input::Imu(s) => s.time,
        }
    }
}

/// Merges two time-sorted streams; IMU first on ties.
pub fn merge_streams<'a>(cursor: &'a [CursorState], imu: &'a [ImuSample]) -> Vec<Input<'a>> {
    let mut out = Vec::with_capacity(cursor.len() + imu.len());
    let (mut i, mut j) = (0, 0);
    while i < cursor.len() || j < imu.len() {
        let take_imu = match (cursor.get(i), imu.get(j)) {
            (Some(c), Some(s)) => s.time <= c.time,
            (None, Some(_)) => true,
            _ => false,
        };
        if take_imu {
            out.push(Input::Imu(&imu[j]));
            j += 1;
        } else {
            out.push(Input::Cursor(&cursor[i]));
            i += 1;
        }
    }
    out
}

/// Runs a machine over a merged stream with a fixed highlighted target.
pub fn run_machine<M: SelectionMachine + ?Sized>(
    machine: &mut M,
    inputs: &[Input<'_>],
    highlighted: Option<u32>,
) -> Result<Vec<TriggerEvent>> {
    let mut out = Vec::new();
    for input in inputs {
        let ev = match input {
            Input::Cursor(c) => machine.on_cursor(c, highlighted)?,
            Input::Imu(s) => machine.on_imu(s, highlighted)?,
        };
        out.extend(ev);
    }
    Ok(out)
}
