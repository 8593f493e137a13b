use alloc::vec::Vec;
use core::f64::consts::TAU;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use crate::math::mix_seed;
use crate::{Error, Result};

/// Sample rate of the watch accelerometer, Hz.
pub const IMU_RATE_HZ: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImuSample {
    pub time: f64,
    /// m/s², gravity removed.
    pub accel: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImuStream {
    pub rate: f64,
    pub samples: Vec<ImuSample>,
}

/// Pinch transient model: a damped oscillation on one random axis.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ImuSynthConfig {
    pub noise_rms: f64,
    /// Median peak acceleration, m/s².
    pub burst_peak: f64,
    /// Standard deviation of ln(peak). Pinches vary in strength; the weak
    /// tail is what the detector misses.
    pub burst_peak_log_sd: f64,
    /// Oscillation frequency range, Hz.
    pub freq_min_hz: f64,
    pub freq_max_hz: f64,
    /// Envelope time constant, s.
    pub decay_s: f64,
    /// Minimum spacing between bursts, s.
    pub min_gap_s: f64,
}

impl Default for ImuSynthConfig {
    fn default() -> Self {
        ImuSynthConfig {
            noise_rms: 0.3,
            burst_peak: 8.0,
            burst_peak_log_sd: 0.45,
            freq_min_hz: 30.0,
            freq_max_hz: 45.0,
            decay_s: 0.05,
            min_gap_s: 0.2,
        }
    }
}

impl ImuSynthConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.noise_rms.is_finite()
            && self.noise_rms >= 0.0
            && self.burst_peak.is_finite()
            && self.burst_peak >= 0.0
            && self.burst_peak_log_sd.is_finite()
            && self.burst_peak_log_sd >= 0.0
            && self.freq_min_hz > 0.0
            && self.freq_max_hz >= self.freq_min_hz
            && self.freq_max_hz < IMU_RATE_HZ / 2.0
            && self.decay_s > 0.0
            && self.min_gap_s >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::config("invalid IMU synthesis parameters"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Burst {
    onset: f64,
    axis: usize,
    freq: f64,
    peak: f64,
}

impl Burst {
    // envelope is negligible (e^-8) after this many time constants
    const SPAN: f64 = 8.0;

    fn value(&self, t: f64, decay: f64) -> f64 {
        let dt = t - self.onset;
        if dt < 0.0 || dt > Self::SPAN * decay {
            return 0.0;
        }
        let w = TAU * self.freq;
        self.peak / Self::envelope_peak(w, decay) * (-dt / decay).exp() * (w * dt).sin()
    }

    // max over t of exp(-t/decay)·sin(w·t), so that `peak` is the true peak
    fn envelope_peak(w: f64, decay: f64) -> f64 {
        let t = (w * decay).atan() / w;
        (-t / decay).exp() * (w * t).sin()
    }
}

/// Streaming 100 Hz accelerometer synthesiser. Pinches are scheduled ahead
/// of the samples that contain them.
#[derive(Debug, Clone)]
pub struct ImuSynth {
    config: ImuSynthConfig,
    burst_rng: ChaCha8Rng,
    noise_rng: ChaCha8Rng,
    noise: Normal<f64>,
    peak: LogNormal<f64>,
    bursts: Vec<Burst>,
    last_onset: Option<f64>,
    index: u64,
}

impl ImuSynth {
    pub fn new(config: ImuSynthConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let noise = Normal::new(0.0, config.noise_rms).map_err(|_| Error::config("invalid IMU noise level"))?;
        let peak = LogNormal::new(config.burst_peak.max(f64::MIN_POSITIVE).ln(), config.burst_peak_log_sd)
            .map_err(|_| Error::config("invalid burst amplitude spread"))?;
        Ok(ImuSynth {
            config,
            burst_rng: ChaCha8Rng::seed_from_u64(mix_seed(seed, 0xB0_0057)),
            noise_rng: ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x1A0_15E)),
            noise,
            peak,
            bursts: Vec::new(),
            last_onset: None,
            index: 0,
        })
    }

    /// Time of the next sample to be produced.
    pub fn time(&self) -> f64 {
        self.index as f64 / IMU_RATE_HZ
    }

    /// Adds a pinch starting at `time`. Pinches must be scheduled in order
    /// and more than `min_gap_s` apart.
    pub fn schedule_pinch(&mut self, time: f64) -> Result<()> {
        if !time.is_finite() || time < 0.0 {
            return Err(Error::config("pinch time must be finite and >= 0"));
        }
        if let Some(prev) = self.last_onset {
            if time - prev <= self.config.min_gap_s {
                return Err(Error::config(alloc::format!(
                    "pinches at {prev:.3} s and {time:.3} s overlap (gap must exceed {} s)",
                    self.config.min_gap_s
                )));
            }
        }
        let axis = self.burst_rng.random_range(0..3);
        let freq = self.burst_rng.random_range(self.config.freq_min_hz..=self.config.freq_max_hz);
        let peak = if self.config.burst_peak_log_sd > 0.0 {
            self.peak.sample(&mut self.burst_rng)
        } else {
            self.config.burst_peak
        };
        self.bursts.push(Burst { onset: time, axis, freq, peak });
        self.last_onset = Some(time);
        Ok(())
    }

    /// Produces every sample with time strictly before `t_end`.
    pub fn samples_until(&mut self, t_end: f64) -> Vec<ImuSample> {
        let mut out = Vec::new();
        while self.time() < t_end {
            let t = self.time();
            let mut accel = [0.0; 3];
            for a in accel.iter_mut() {
                *a = self.noise.sample(&mut self.noise_rng);
            }
            let horizon = Burst::SPAN * self.config.decay_s;
            self.bursts.retain(|b| t - b.onset <= horizon);
            for b in &self.bursts {
                accel[b.axis] += b.value(t, self.config.decay_s);
            }
            out.push(ImuSample { time: t, accel });
            self.index += 1;
        }
        out
    }
}

/// Batch form: `duration` seconds of 100 Hz samples with a pinch at each
/// time in `pinch_times`.
pub fn synthesize_imu(pinch_times: &[f64], config: &ImuSynthConfig, duration: f64, seed: u64) -> Result<ImuStream> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::config("duration must be positive"));
    }
    let mut times = pinch_times.to_vec();
    times.sort_by(f64::total_cmp);
    if let Some(&t) = times.iter().find(|&&t| !(0.0..duration).contains(&t)) {
        return Err(Error::config(alloc::format!("pinch at {t} s lies outside the stream")));
    }
    let mut synth = ImuSynth::new(*config, seed)?;
    for t in times {
        synth.schedule_pinch(t)?;
    }
    Ok(ImuStream { rate: IMU_RATE_HZ, samples: synth.samples_until(duration) })
}
