use alloc::vec::Vec;

use num_complex::Complex64;

use crate::signals::BasebandFrame;
use crate::{Error, Result};

/// Hyper-parameters of the static-vector estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct LevdConfig {
    /// Minimum peak-to-peak swing (baseband amplitude units, full scale = 1)
    /// of a max/min pair before it is trusted to re-estimate the static
    /// component. Also sets the low-quality gate at a quarter of this value.
    pub pp_threshold: f64,
    /// Extrema older than this (seconds) are not paired.
    pub max_hold: f64,
    /// Drop from a running extreme needed to confirm it.
    pub hysteresis: f64,
    /// Estimate from three alternating extremes, `(e1 + e3)/4 + e2/2`,
    /// instead of the midpoint of the last two. A finger moving along the
    /// range axis changes echo strength every cycle, which biases a plain
    /// midpoint; the three-point form cancels a linear amplitude trend.
    pub trend_correction: bool,
    /// A max/min pair is only used when the other channel differs between
    /// the two extremes by less than this fraction of the swing. On a clean
    /// circle both extremes sit at the other channel's centre; extremes
    /// caused by the finger reversing direction generally do not.
    pub cross_tolerance: f64,
}

impl Default for LevdConfig {
    fn default() -> Self {
        LevdConfig {
            pp_threshold: 0.05,
            max_hold: 2.0,
            hysteresis: 0.025,
            trend_correction: true,
            cross_tolerance: 0.3,
        }
    }
}

impl LevdConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pp_threshold > 0.0 && self.pp_threshold.is_finite()) {
            return Err(Error::config("pp_threshold must be positive"));
        }
        if !(self.cross_tolerance.is_finite() && self.cross_tolerance > 0.0) {
            return Err(Error::config("cross_tolerance must be positive"));
        }
        if !(self.max_hold.is_finite() && self.max_hold > 0.0 && self.hysteresis.is_finite() && self.hysteresis > 0.0) {
            return Err(Error::config("max_hold and hysteresis must be positive"));
        }
        Ok(())
    }

    /// Dynamic-vector magnitude below which phase is held.
    pub fn gate(&self) -> f64 {
        0.25 * self.pp_threshold
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Extreme {
    kind: Kind,
    value: f64,
    time: f64,
    // the other channel at the same instant
    other: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Trend {
    Unknown,
    Rising,
    Falling,
}

/// Hysteresis extreme detector for one real-valued channel.
#[derive(Debug, Clone, PartialEq)]
struct Channel {
    trend: Trend,
    // (value, time, other channel)
    run_max: (f64, f64, f64),
    run_min: (f64, f64, f64),
    last: Option<Extreme>,
    // the extreme before `last`, kept only while it pairs with `last`
    before: Option<Extreme>,
    started: bool,
}

impl Channel {
    fn new() -> Self {
        Channel {
            trend: Trend::Unknown,
            run_max: (f64::NEG_INFINITY, 0.0, 0.0),
            run_min: (f64::INFINITY, 0.0, 0.0),
            last: None,
            before: None,
            started: false,
        }
    }

    /// Feeds one value; returns a confirmed extreme, if any.
    fn push(&mut self, v: f64, other: f64, t: f64, h: f64) -> Option<Extreme> {
        if !self.started {
            self.started = true;
            self.run_max = (v, t, other);
            self.run_min = (v, t, other);
            return None;
        }
        if v > self.run_max.0 {
            self.run_max = (v, t, other);
        }
        if v < self.run_min.0 {
            self.run_min = (v, t, other);
        }
        match self.trend {
            // The starting value is not an extreme; just learn the direction.
            Trend::Unknown => {
                if v > self.run_min.0 + h {
                    self.trend = Trend::Rising;
                    self.run_max = (v, t, other);
                } else if v < self.run_max.0 - h {
                    self.trend = Trend::Falling;
                    self.run_min = (v, t, other);
                }
                None
            }
            Trend::Rising if v < self.run_max.0 - h => {
                let e = Extreme { kind: Kind::Max, value: self.run_max.0, time: self.run_max.1, other: self.run_max.2 };
                self.trend = Trend::Falling;
                self.run_min = (v, t, other);
                Some(e)
            }
            Trend::Falling if v > self.run_min.0 + h => {
                let e = Extreme { kind: Kind::Min, value: self.run_min.0, time: self.run_min.1, other: self.run_min.2 };
                self.trend = Trend::Rising;
                self.run_max = (v, t, other);
                Some(e)
            }
            _ => None,
        }
    }
}

/// One baseband sample annotated with the static estimate in force for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevdSample {
    pub time: f64,
    pub baseband: Complex64,
    pub static_estimate: Complex64,
    /// Bit 0: real channel re-estimated at this sample; bit 1: imaginary.
    pub refreshed: u8,
}

impl LevdSample {
    pub fn dynamic(&self) -> Complex64 {
        self.baseband - self.static_estimate
    }
}

/// Local extreme value detection of the static (non-moving clutter) vector.
///
/// A moving reflector traces circles in the complex baseband plane around the
/// static vector. Each channel's consecutive maximum/minimum pair therefore
/// brackets the static component; when the pair's swing clears
/// `pp_threshold` that channel is re-estimated as the midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct LevdState {
    config: LevdConfig,
    static_estimate: Option<Complex64>,
    channels: [Channel; 2],
    last_refresh: Option<f64>,
}

impl LevdState {
    pub fn new(config: LevdConfig) -> Result<Self> {
        config.validate()?;
        Ok(LevdState { config, static_estimate: None, channels: [Channel::new(), Channel::new()], last_refresh: None })
    }

    pub fn config(&self) -> &LevdConfig {
        &self.config
    }

    /// Current static estimate; the first sample seen until a pair arrives.
    pub fn static_estimate(&self) -> Option<Complex64> {
        self.static_estimate
    }

    /// Whether the estimate has been refreshed within `max_hold` of `now`.
    pub fn is_fresh(&self, now: f64) -> bool {
        self.last_refresh.is_some_and(|t| now - t <= self.config.max_hold)
    }

    fn push_sample(&mut self, t: f64, z: Complex64) -> LevdSample {
        let est = self.static_estimate.get_or_insert(z);
        let mut refreshed = 0u8;
        for (c, (v, other)) in [(z.re, z.im), (z.im, z.re)].into_iter().enumerate() {
            let ch = &mut self.channels[c];
            let Some(e) = ch.push(v, other, t, self.config.hysteresis) else {
                continue;
            };
            let cfg = &self.config;
            let pairs = |a: &Extreme, b: &Extreme| {
                a.kind != b.kind
                    && b.time - a.time <= cfg.max_hold
                    && (b.value - a.value).abs() >= cfg.pp_threshold
                    && (b.other - a.other).abs() < cfg.cross_tolerance * (b.value - a.value).abs()
            };
            match ch.last {
                Some(prev) if pairs(&prev, &e) => {
                    let mid = match ch.before {
                        Some(first) if cfg.trend_correction => 0.25 * (first.value + e.value) + 0.5 * prev.value,
                        _ => 0.5 * (e.value + prev.value),
                    };
                    if c == 0 {
                        est.re = mid;
                    } else {
                        est.im = mid;
                    }
                    refreshed |= 1 << c;
                    ch.before = Some(prev);
                }
                _ => ch.before = None,
            }
            ch.last = Some(e);
        }
        if refreshed != 0 {
            self.last_refresh = Some(t);
        }
        LevdSample { time: t, baseband: z, static_estimate: *est, refreshed }
    }

    /// Processes a baseband frame, returning each sample with the static
    /// estimate in force after it (the dynamic vector is `baseband − static`).
    pub fn update(&mut self, baseband: &BasebandFrame) -> Vec<LevdSample> {
        baseband.samples.iter().enumerate().map(|(k, &z)| self.push_sample(baseband.time_of(k), z)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::TAU;
    #[cfg(not(feature = "std"))]
    use num_traits::Float;

    fn frame(samples: Vec<Complex64>, start: f64) -> BasebandFrame {
        BasebandFrame { samples, rate: 500.0, start_time: start }
    }

    #[test]
    fn stationary_scene_has_no_dynamic_vector() {
        let c = Complex64::new(0.3, -0.2);
        let mut levd = LevdState::new(LevdConfig::default()).unwrap();
        let out = levd.update(&frame(vec![c; 500], 0.0));
        for s in &out[10..] {
            assert!(s.dynamic().norm() < 1e-3 * c.norm());
        }
        assert!(!levd.is_fresh(1.0));
    }

    #[test]
    fn moving_echo_over_strong_clutter() {
        // static clutter 10× the moving echo; echo rotates at 5 Hz
        let a = 0.08;
        let clutter = Complex64::new(0.6, 0.5);
        let n = 1000;
        let samples: Vec<Complex64> = (0..n)
            .map(|k| {
                let th = TAU * 5.0 * k as f64 / 500.0 + 0.4;
                clutter + Complex64::from_polar(a, th)
            })
            .collect();
        let mut levd = LevdState::new(LevdConfig::default()).unwrap();
        let out = levd.update(&frame(samples, 0.0));
        // after one full rotation (100 samples) plus detection lag
        for s in &out[200..] {
            let m = s.dynamic().norm();
            assert!(m > 0.8 * a && m < 1.2 * a, "{m}");
        }
        assert!(levd.is_fresh(2.0));
        let est = levd.static_estimate().unwrap();
        assert!((est - clutter).norm() < 0.01 * a * 10.0);
    }

    #[test]
    fn small_swings_do_not_refresh() {
        let a = 0.02; // pp 0.04 < threshold 0.05
        let samples: Vec<Complex64> =
            (0..1000).map(|k| Complex64::from_polar(a, TAU * 4.0 * k as f64 / 500.0)).collect();
        let mut levd = LevdState::new(LevdConfig::default()).unwrap();
        let out = levd.update(&frame(samples, 0.0));
        assert!(out.iter().all(|s| s.refreshed == 0));
        assert_eq!(levd.static_estimate(), Some(Complex64::new(a, 0.0)));
    }

    #[test]
    fn reversals_do_not_refresh() {
        // the finger sweeps back and forth over part of a cycle; the turning
        // points are channel extremes but not circle extremes
        let clutter = Complex64::new(0.4, 0.1);
        let samples: Vec<Complex64> = (0..2000)
            .map(|k| {
                let s = (TAU * k as f64 / 400.0).sin();
                clutter + Complex64::from_polar(0.1, 1.15 + 0.85 * s)
            })
            .collect();
        let mut levd = LevdState::new(LevdConfig::default()).unwrap();
        let out = levd.update(&frame(samples, 0.0));
        assert!(out.iter().all(|s| s.refreshed == 0));
        let loose = LevdConfig { cross_tolerance: 10.0, ..LevdConfig::default() };
        let mut levd = LevdState::new(loose).unwrap();
        let samples: Vec<Complex64> = out.iter().map(|s| s.baseband).collect();
        assert!(levd.update(&frame(samples, 0.0)).iter().any(|s| s.refreshed != 0));
    }

    #[test]
    fn rejects_bad_threshold() {
        let cfg = LevdConfig { pp_threshold: 0.0, ..LevdConfig::default() };
        assert!(LevdState::new(cfg).is_err());
    }
}
