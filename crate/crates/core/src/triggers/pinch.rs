use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::dwell::Presence;
use super::targets::TargetSet;
use super::{EventKind, Method, SelectionMachine, TriggerEvent};
use crate::simulate::{ImuSample, IMU_RATE_HZ};
use crate::tracking::CursorState;
use crate::{Error, Result};

/// Pinch detector settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct PinchDetectorConfig {
    pub sample_rate: f64,
    pub cutoff_hz: f64,
    /// On the high-passed acceleration magnitude, m/s².
    pub threshold: f64,
    pub refractory_s: f64,
}

impl Default for PinchDetectorConfig {
    fn default() -> Self {
        PinchDetectorConfig { sample_rate: IMU_RATE_HZ, cutoff_hz: 15.0, threshold: 2.5, refractory_s: 0.2 }
    }
}

impl PinchDetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::config("pinch threshold must be positive"));
        }
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return Err(Error::config("IMU sample rate must be positive"));
        }
        if !(self.cutoff_hz > 0.0 && self.cutoff_hz < 0.5 * self.sample_rate) {
            return Err(Error::config("high-pass cutoff must lie below Nyquist"));
        }
        if !(self.refractory_s.is_finite() && self.refractory_s >= 0.0) {
            return Err(Error::config("refractory period must be non-negative"));
        }
        Ok(())
    }
}

// Second-order Butterworth high-pass, direct form I.
#[derive(Debug, Clone, Copy)]
struct HighPass {
    b: [f64; 3],
    a: [f64; 2],
    x: [f64; 2],
    y: [f64; 2],
    primed: bool,
}

impl HighPass {
    fn new(cutoff: f64, fs: f64) -> Self {
        let w0 = 2.0 * PI * cutoff / fs;
        let alpha = w0.sin() / (2.0 * core::f64::consts::FRAC_1_SQRT_2);
        let cw = w0.cos();
        let a0 = 1.0 + alpha;
        HighPass {
            b: [(1.0 + cw) / 2.0 / a0, -(1.0 + cw) / a0, (1.0 + cw) / 2.0 / a0],
            a: [-2.0 * cw / a0, (1.0 - alpha) / a0],
            x: [0.0; 2],
            y: [0.0; 2],
            primed: false,
        }
    }

    fn push(&mut self, x: f64) -> f64 {
        if !self.primed {
            // steady state for a constant input (gravity) is zero output
            self.x = [x, x];
            self.primed = true;
        }
        let y = self.b[0] * x + self.b[1] * self.x[0] + self.b[2] * self.x[1]
            - self.a[0] * self.y[0]
            - self.a[1] * self.y[1];
        self.x = [x, self.x[0]];
        self.y = [y, self.y[0]];
        y
    }
}

/// Threshold detector on high-passed 3-axis acceleration.
#[derive(Debug, Clone)]
pub struct PinchDetector {
    config: PinchDetectorConfig,
    filters: [HighPass; 3],
    last_detection: Option<f64>,
    last_time: Option<f64>,
}

impl PinchDetector {
    pub fn new(config: PinchDetectorConfig) -> Result<Self> {
        config.validate()?;
        let hp = HighPass::new(config.cutoff_hz, config.sample_rate);
        Ok(PinchDetector { config, filters: [hp; 3], last_detection: None, last_time: None })
    }

    pub fn config(&self) -> &PinchDetectorConfig {
        &self.config
    }

    /// Feeds one sample; returns the detection time when the magnitude first
    /// crosses the threshold outside the refractory window.
    pub fn push(&mut self, sample: &ImuSample) -> Result<Option<f64>> {
        if self.last_time.is_some_and(|p| sample.time < p) {
            return Err(Error::contract("IMU time went backwards"));
        }
        self.last_time = Some(sample.time);
        let mut energy = 0.0;
        for (f, &a) in self.filters.iter_mut().zip(sample.accel.iter()) {
            let y = f.push(a);
            energy += y * y;
        }
        let over = energy.sqrt() > self.config.threshold;
        let ready = self.last_detection.is_none_or(|t| sample.time - t >= self.config.refractory_s);
        if over && ready {
            self.last_detection = Some(sample.time);
            return Ok(Some(sample.time));
        }
        Ok(None)
    }

    /// Runs the detector over a whole stream.
    pub fn detect_all(&mut self, samples: &[ImuSample]) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for s in samples {
            if let Some(t) = self.push(s)? {
                out.push(t);
            }
        }
        Ok(out)
    }
}

/// Cursor position at `t` from a time-sorted `(time, position)` history.
///
/// Linear between samples; after the newest sample the newest position holds.
/// Times before the oldest sample are a contract violation.
pub(crate) fn position_at(history: &[(f64, f64)], t: f64) -> Result<f64> {
    let (Some(first), Some(last)) = (history.first(), history.last()) else {
        return Err(Error::contract("pinch detection with no cursor history"));
    };
    if t < first.0 - 1e-9 {
        return Err(Error::contract("pinch offset reaches past the cursor history"));
    }
    if t >= last.0 {
        return Ok(last.1);
    }
    let i = history.partition_point(|&(ts, _)| ts <= t);
    if i == 0 {
        return Ok(first.1);
    }
    let (t0, x0) = history[i - 1];
    let (t1, x1) = history[i];
    if t1 <= t0 {
        return Ok(x1);
    }
    Ok(x0 + (x1 - x0) * (t - t0) / (t1 - t0))
}

/// Classifies a pinch at `detection_time` whose coordinate is read `offset_s`
/// earlier: `(kind, target under the coordinate, coordinate)`.
pub(crate) fn pinch_outcome(
    history: &[(f64, f64)],
    targets: &TargetSet,
    highlighted: Option<u32>,
    detection_time: f64,
    offset_s: f64,
) -> Result<(EventKind, Option<u32>, f64)> {
    let x = position_at(history, detection_time - offset_s)?;
    let under = targets.at(x).map(|t| t.id);
    let kind = match (under, highlighted) {
        (Some(u), Some(h)) if u == h => EventKind::Select,
        (Some(_), None) => EventKind::Select,
        _ => EventKind::ErrorSelect,
    };
    Ok((kind, under, x))
}

/// Pinch trigger: the IMU detector confirms whatever target lies under the
/// cursor, optionally read `offset_s` before the detection to undo the slip
/// the pinch itself causes.
#[derive(Debug, Clone)]
pub struct PinchTrigger {
    targets: TargetSet,
    detector: PinchDetector,
    offset_s: f64,
    history_s: f64,
    history: VecDeque<(f64, f64)>,
    presence: Presence,
}

impl PinchTrigger {
    /// Cursor history kept for offset look-back, s.
    pub const HISTORY_S: f64 = 0.5;

    pub fn new(targets: TargetSet, detector: PinchDetectorConfig, offset_s: f64) -> Result<Self> {
        if !(offset_s.is_finite() && (0.0..=Self::HISTORY_S).contains(&offset_s)) {
            return Err(Error::config("pinch offset must lie in [0, 0.5] s"));
        }
        Ok(PinchTrigger {
            targets,
            detector: PinchDetector::new(detector)?,
            offset_s,
            history_s: Self::HISTORY_S,
            history: VecDeque::new(),
            presence: Presence::default(),
        })
    }

    pub fn offset_s(&self) -> f64 {
        self.offset_s
    }

    /// Confirms at `detection_time` as if the detector had fired.
    pub fn on_detection(&mut self, detection_time: f64, highlighted: Option<u32>) -> Result<TriggerEvent> {
        let hist = self.history.make_contiguous();
        let (kind, under, x) = pinch_outcome(hist, &self.targets, highlighted, detection_time, self.offset_s)?;
        Ok(TriggerEvent::new(kind, Method::Pinch, under, x, detection_time))
    }
}

impl SelectionMachine for PinchTrigger {
    fn method(&self) -> Method {
        Method::Pinch
    }

    fn targets(&self) -> &TargetSet {
        &self.targets
    }

    fn on_cursor(&mut self, cursor: &CursorState, _highlighted: Option<u32>) -> Result<Vec<TriggerEvent>> {
        let (t, x) = (cursor.time, cursor.position);
        if self.history.back().is_some_and(|&(p, _)| t < p) {
            return Err(Error::contract("pinch cursor time went backwards"));
        }
        self.history.push_back((t, x));
        // keep one sample older than the window so interpolation stays defined
        while self.history.len() > 2 && self.history[1].0 <= t - self.history_s {
            self.history.pop_front();
        }
        let mut out = Vec::new();
        self.presence.update(&self.targets, t, x, Method::Pinch, &mut out);
        Ok(out)
    }

    fn on_imu(&mut self, sample: &ImuSample, highlighted: Option<u32>) -> Result<Vec<TriggerEvent>> {
        match self.detector.push(sample)? {
            Some(td) => Ok(alloc::vec![self.on_detection(td, highlighted)?]),
            None => Ok(Vec::new()),
        }
    }
}
