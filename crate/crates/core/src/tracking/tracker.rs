use alloc::vec::Vec;

use super::{LevdConfig, LevdSample, LevdState, OneEuroConfig, OneEuroState, PhaseTrack};
use crate::signals::{AudioFrame, BasebandFrame, Demodulator, SonarConfig};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct TrackerConfig {
    pub sonar: SonarConfig,
    pub levd: LevdConfig,
    pub one_euro: OneEuroConfig,
    /// Reference phase of the transmitted carrier, radians.
    pub carrier_phase: f64,
}

/// Filtered one-dimensional cursor, one per audio frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CursorState {
    /// mm along the input axis, relative to where tracking started.
    pub position: f64,
    /// mm/s.
    pub velocity: f64,
    /// s, stamp of the newest baseband sample that contributed.
    pub time: f64,
    /// Dynamic-vector strength relative to the LEVD threshold, in `[0, 1]`.
    pub quality: f64,
    /// Unfiltered displacement, mm.
    pub raw_displacement: f64,
}

/// The full 25 Hz chain: demodulation, static removal, unwrapping, smoothing.
///
/// Cursor mapping is identity: 1 mm of finger displacement moves the cursor
/// 1 mm.
#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    demod: Demodulator,
    levd: LevdState,
    phase: PhaseTrack,
    filter: OneEuroState,
    warmup_left: usize,
    last: Option<CursorState>,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Result<Self> {
        let demod = Demodulator::new(config.sonar, config.carrier_phase)?;
        let levd = LevdState::new(config.levd)?;
        let capacity = (config.levd.max_hold * config.sonar.baseband_rate as f64) as usize;
        let phase = PhaseTrack::new(config.sonar.wavelength_mm(), config.levd.gate(), capacity);
        let filter = OneEuroState::new(config.one_euro)?;
        let warmup_left = demod.warmup_samples();
        Ok(Tracker { config, demod, levd, phase, filter, warmup_left, last: None })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    pub fn demodulator(&self) -> &Demodulator {
        &self.demod
    }

    pub fn last(&self) -> Option<&CursorState> {
        self.last.as_ref()
    }

    /// Processes one audio frame and returns the resulting cursor.
    pub fn track_frame(&mut self, frame: &AudioFrame) -> Result<CursorState> {
        let bb = self.demod.demodulate(frame)?;
        let frame_end = bb.time_of(bb.len().saturating_sub(1));
        let skip = self.warmup_left.min(bb.len());
        self.warmup_left -= skip;
        let samples: Vec<LevdSample> = if skip == 0 {
            self.levd.update(&bb)
        } else {
            // filter warm-up transients never reach the static estimator
            self.levd.update(&BasebandFrame {
                samples: bb.samples[skip..].to_vec(),
                rate: bb.rate,
                start_time: bb.time_of(skip),
            })
        };
        self.phase.update(&samples);
        let raw = self.phase.displacement();
        let position = self.filter.filter(raw, frame_end)?;
        let quality = match samples.last() {
            Some(s) => {
                let strength = (2.0 * s.dynamic().norm() / self.config.levd.pp_threshold).min(1.0);
                if self.levd.is_fresh(frame_end) {
                    strength
                } else {
                    0.5 * strength
                }
            }
            None => 0.0,
        };
        let cursor =
            CursorState { position, velocity: self.filter.velocity(), time: frame_end, quality, raw_displacement: raw };
        self.last = Some(cursor);
        Ok(cursor)
    }
}
