use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::math::min_jerk;
use crate::{Error, Result};

/// Range below which echo strength stops growing, mm.
pub const REFERENCE_RANGE_MM: f64 = 30.0;

/// Inverse-square echo gain with a floor at [`REFERENCE_RANGE_MM`].
pub fn echo_gain(gain: f64, range_mm: f64) -> f64 {
    let r = range_mm.max(REFERENCE_RANGE_MM);
    let q = REFERENCE_RANGE_MM / r;
    gain * q * q
}

/// A stationary reflector. The gain is applied as-is, without range falloff.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Reflector {
    pub range_mm: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SegmentKind {
    Hold,
    ConstantVelocity,
    MinJerk,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Segment {
    pub kind: SegmentKind,
    pub duration_s: f64,
    /// Range change over the segment, mm. Positive moves away from the device.
    #[cfg_attr(feature = "serde", serde(default))]
    pub delta_mm: f64,
}

impl Segment {
    pub fn hold(duration_s: f64) -> Self {
        Segment { kind: SegmentKind::Hold, duration_s, delta_mm: 0.0 }
    }

    pub fn constant_velocity(duration_s: f64, delta_mm: f64) -> Self {
        Segment { kind: SegmentKind::ConstantVelocity, duration_s, delta_mm }
    }

    pub fn min_jerk(duration_s: f64, delta_mm: f64) -> Self {
        Segment { kind: SegmentKind::MinJerk, duration_s, delta_mm }
    }

    fn offset_at(&self, t: f64) -> f64 {
        let tau = (t / self.duration_s).clamp(0.0, 1.0);
        match self.kind {
            SegmentKind::Hold => 0.0,
            SegmentKind::ConstantVelocity => self.delta_mm * tau,
            SegmentKind::MinJerk => self.delta_mm * min_jerk(tau),
        }
    }
}

/// Piecewise finger motion. Every segment starts where the previous one
/// ended, so the path is continuous by construction; a hold that claims a
/// non-zero delta would be a jump and is rejected.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Trajectory {
    pub segments: Vec<Segment>,
}

impl Trajectory {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let t = Trajectory { segments };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.duration_s.is_finite() && s.duration_s > 0.0) {
                return Err(Error::config(alloc::format!("trajectory segment {i}: duration must be positive")));
            }
            if !s.delta_mm.is_finite() {
                return Err(Error::config(alloc::format!("trajectory segment {i}: delta must be finite")));
            }
            if s.kind == SegmentKind::Hold && s.delta_mm != 0.0 {
                return Err(Error::config(alloc::format!(
                    "trajectory discontinuity: hold segment {i} has delta {} mm",
                    s.delta_mm
                )));
            }
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration_s).sum()
    }

    pub fn net_displacement(&self) -> f64 {
        self.segments.iter().map(|s| s.delta_mm).sum()
    }

    /// Offset from the starting range at time `t`. Constant before 0 and
    /// after the last segment.
    pub fn offset_at(&self, t: f64) -> f64 {
        let mut start = 0.0;
        let mut base = 0.0;
        for s in &self.segments {
            if t < start + s.duration_s {
                return base + s.offset_at(t - start);
            }
            start += s.duration_s;
            base += s.delta_mm;
        }
        base
    }

    /// Smallest and largest offset reached. Segments are monotone, so the
    /// boundaries suffice.
    pub fn offset_bounds(&self) -> (f64, f64) {
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        let mut x = 0.0;
        for s in &self.segments {
            x += s.delta_mm;
            lo = lo.min(x);
            hi = hi.max(x);
        }
        (lo, hi)
    }
}

/// Anything that can report the finger's range at a given stream time.
pub trait FingerPath {
    fn range_mm(&self, t: f64) -> f64;
}

impl<F: Fn(f64) -> f64> FingerPath for F {
    fn range_mm(&self, t: f64) -> f64 {
        self(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct FingerConfig {
    pub start_range_mm: f64,
    /// Gain at or inside the reference range.
    pub gain: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub trajectory: Trajectory,
}

impl FingerPath for FingerConfig {
    fn range_mm(&self, t: f64) -> f64 {
        self.start_range_mm + self.trajectory.offset_at(t)
    }
}

/// Someone moving about a metre away: a far reflector whose range sways
/// and whose strength breathes with the same period.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Walker {
    pub period_s: f64,
    pub gain: f64,
    pub range_mm: f64,
    pub sway_mm: f64,
}

impl Default for Walker {
    fn default() -> Self {
        Walker { period_s: 2.0, gain: 0.004, range_mm: 1000.0, sway_mm: 80.0 }
    }
}

impl Walker {
    /// (range mm, gain) at time `t`.
    pub fn state_at(&self, t: f64) -> (f64, f64) {
        let w = core::f64::consts::TAU / self.period_s;
        let range = self.range_mm + self.sway_mm * (w * t).sin();
        let gain = self.gain * (1.0 + 0.5 * (w * t + 1.0).sin());
        (range, gain)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SceneConfig {
    pub static_reflectors: Vec<Reflector>,
    pub finger: Option<FingerConfig>,
    /// Noise relative to the finger echo at the reference range. `None`
    /// disables noise.
    pub noise_snr_db: Option<f64>,
    pub walker: Option<Walker>,
    /// Speed of sound in the simulated room, m/s. `None` uses the sonar
    /// configuration's value, i.e. a tracker calibrated for the room.
    pub speed_of_sound: Option<f64>,
    pub seed: u64,
}

impl SceneConfig {
    pub fn validate(&self) -> Result<()> {
        for (i, r) in self.static_reflectors.iter().enumerate() {
            if !(r.range_mm.is_finite() && r.range_mm >= 0.0) {
                return Err(Error::config(alloc::format!("reflector {i}: range must be >= 0")));
            }
            if !(r.gain.is_finite() && r.gain >= 0.0) {
                return Err(Error::config(alloc::format!("reflector {i}: gain must be >= 0")));
            }
        }
        if let Some(f) = &self.finger {
            f.trajectory.validate()?;
            if !(f.gain.is_finite() && f.gain >= 0.0) {
                return Err(Error::config("finger gain must be >= 0"));
            }
            let (lo, _) = f.trajectory.offset_bounds();
            if !(f.start_range_mm.is_finite() && f.start_range_mm + lo >= 0.0) {
                return Err(Error::config("finger range must stay >= 0"));
            }
        }
        if let Some(snr) = self.noise_snr_db {
            if !snr.is_finite() {
                return Err(Error::config("noise_snr_db must be finite"));
            }
        }
        if let Some(c) = self.speed_of_sound {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::config("speed_of_sound must be positive"));
            }
        }
        if let Some(w) = &self.walker {
            if !(w.period_s.is_finite() && w.period_s > 0.0) {
                return Err(Error::config("walker period must be positive"));
            }
            if !(w.gain.is_finite() && w.gain >= 0.0) {
                return Err(Error::config("walker gain must be >= 0"));
            }
            if !(w.range_mm.is_finite() && w.sway_mm.is_finite() && w.range_mm - w.sway_mm.abs() >= 0.0) {
                return Err(Error::config("walker range must stay >= 0"));
            }
        }
        Ok(())
    }
}
