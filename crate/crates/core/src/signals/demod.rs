use alloc::vec;
use alloc::vec::Vec;

use super::{kaiser_lowpass, AudioFrame, LocalOscillator, LowpassSpec, SonarConfig};
use crate::{Error, Result};
use num_complex::Complex64;

/// Decimated complex baseband. Sample `k` is stamped at
/// `start_time + k / rate`, already corrected for the anti-alias filter delay.
#[derive(Debug, Clone, PartialEq)]
pub struct BasebandFrame {
    pub samples: Vec<Complex64>,
    pub rate: f64,
    pub start_time: f64,
}

impl BasebandFrame {
    pub fn time_of(&self, k: usize) -> f64 {
        self.start_time + k as f64 / self.rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Streaming I/Q demodulator: mixes with `cos` / `-sin` of the carrier,
/// low-pass filters with a linear-phase FIR and keeps every
/// `decimation`-th output.
///
/// The output is scaled by two, so an echo `g·A·cos(ωt + φ0 - ωτ)` demodulates
/// to the constant `g·A·e^{-iωτ}` when the demodulator reference phase is `φ0`.
/// The first `taps/decimation` outputs of a fresh stream are filter warm-up.
#[derive(Debug, Clone)]
pub struct Demodulator {
    config: SonarConfig,
    taps: Vec<f64>,
    // mirrored rings: sample j lives at j and j + taps.len()
    hist_i: Vec<f64>,
    hist_q: Vec<f64>,
    pos: usize,
    sample_index: u64,
    lo: LocalOscillator,
}

impl Demodulator {
    pub fn new(config: SonarConfig, carrier_phase0: f64) -> Result<Self> {
        config.validate()?;
        let spec = LowpassSpec::for_decimation(config.sample_rate as f64, config.baseband_rate as f64);
        let taps = kaiser_lowpass(&spec);
        let n = taps.len();
        let lo = LocalOscillator::new(&config, carrier_phase0);
        Ok(Demodulator {
            config,
            taps,
            hist_i: vec![0.0; 2 * n],
            hist_q: vec![0.0; 2 * n],
            pos: 0,
            sample_index: 0,
            lo,
        })
    }

    pub fn config(&self) -> &SonarConfig {
        &self.config
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Filter group delay in seconds.
    pub fn group_delay(&self) -> f64 {
        (self.taps.len() - 1) as f64 / 2.0 / self.config.sample_rate as f64
    }

    /// Number of leading baseband samples affected by the zero-initialised
    /// filter history.
    pub fn warmup_samples(&self) -> usize {
        self.taps.len().div_ceil(self.config.decimation())
    }

    /// Timestamp (filter-delay compensated) of the `k`-th baseband sample of
    /// the stream.
    pub fn baseband_time(&self, k: u64) -> f64 {
        let d = self.config.decimation() as f64;
        let gd = (self.taps.len() - 1) as f64 / 2.0;
        (k as f64 * d + d - 1.0 - gd) / self.config.sample_rate as f64
    }

    /// Demodulates one frame. Frames must be fed in stream order.
    pub fn demodulate(&mut self, frame: &AudioFrame) -> Result<BasebandFrame> {
        if frame.len() != self.config.frame_len {
            return Err(Error::contract(alloc::format!(
                "frame has {} samples, expected {}",
                frame.len(),
                self.config.frame_len
            )));
        }
        let n = self.taps.len();
        let d = self.config.decimation() as u64;
        let mut out = Vec::with_capacity(self.config.baseband_per_frame());
        for &x in &frame.samples {
            let (c, s) = self.lo.at(self.sample_index);
            self.hist_i[self.pos] = x * c;
            self.hist_i[self.pos + n] = x * c;
            self.hist_q[self.pos] = -x * s;
            self.hist_q[self.pos + n] = -x * s;
            self.pos = (self.pos + 1) % n;
            if self.sample_index % d == d - 1 {
                let wi = &self.hist_i[self.pos..self.pos + n];
                let wq = &self.hist_q[self.pos..self.pos + n];
                let mut acc_i = 0.0;
                let mut acc_q = 0.0;
                for ((t, a), b) in self.taps.iter().zip(wi).zip(wq) {
                    acc_i += t * a;
                    acc_q += t * b;
                }
                out.push(Complex64::new(2.0 * acc_i, 2.0 * acc_q));
            }
            self.sample_index += 1;
        }
        let gd = (n - 1) as f64 / 2.0;
        let fs = self.config.sample_rate as f64;
        Ok(BasebandFrame {
            samples: out,
            rate: self.config.baseband_rate as f64,
            start_time: frame.start_time + ((d - 1) as f64 - gd) / fs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::carrier_phase;
    use crate::signals::CARRIER_AMPLITUDE;
    use core::f64::consts::{PI, TAU};

    fn echo_frames(cfg: &SonarConfig, echoes: &[(f64, f64)], frames: usize) -> Vec<AudioFrame> {
        // echoes: (gain, delay seconds)
        let fs = cfg.sample_rate as f64;
        let w = TAU * cfg.carrier_freq;
        (0..frames)
            .map(|k| {
                let start = k * cfg.frame_len;
                let samples = (start..start + cfg.frame_len)
                    .map(|i| {
                        echoes
                            .iter()
                            .map(|&(g, tau)| {
                                g * CARRIER_AMPLITUDE * (carrier_phase(cfg, i as u64, 0.0) - w * tau).cos()
                            })
                            .sum::<f64>()
                    })
                    .collect();
                AudioFrame { samples, start_time: start as f64 / fs }
            })
            .collect()
    }

    fn run(cfg: &SonarConfig, frames: &[AudioFrame]) -> Vec<Complex64> {
        let mut demod = Demodulator::new(*cfg, 0.0).unwrap();
        let skip = demod.warmup_samples();
        frames.iter().flat_map(|f| demod.demodulate(f).unwrap().samples).skip(skip).collect()
    }

    #[test]
    fn pure_carrier_is_positive_real() {
        let cfg = SonarConfig::default();
        let bb = run(&cfg, &echo_frames(&cfg, &[(1.0, 0.0)], 5));
        for z in &bb {
            assert!(z.re > 0.0);
            assert!(z.im.abs() < 1e-3 * z.re, "{z}");
            assert!((z.re - CARRIER_AMPLITUDE).abs() < 1e-3);
        }
    }

    #[test]
    fn half_wavelength_path_gives_minus_pi() {
        let cfg = SonarConfig::default();
        // path = λ/2 → τ = λ/(2c) → phase −2π·f·τ = −π
        let tau = cfg.wavelength_mm() / 1000.0 / 2.0 / cfg.speed_of_sound;
        let bb = run(&cfg, &echo_frames(&cfg, &[(0.5, tau)], 4));
        for z in &bb {
            let err = crate::math::wrap_phase(z.arg() + PI);
            assert!(err.abs() < 0.01, "phase {}", z.arg());
        }
    }

    #[test]
    fn frame_length_is_checked() {
        let cfg = SonarConfig::default();
        let mut d = Demodulator::new(cfg, 0.0).unwrap();
        let f = AudioFrame { samples: vec![0.0; 100], start_time: 0.0 };
        assert!(matches!(d.demodulate(&f), Err(Error::Contract(_))));
    }

    #[test]
    fn timestamps_follow_frames() {
        let cfg = SonarConfig::default();
        let mut d = Demodulator::new(cfg, 0.0).unwrap();
        let frames = echo_frames(&cfg, &[(1.0, 0.0)], 3);
        let mut k = 0u64;
        for f in &frames {
            let bb = d.demodulate(f).unwrap();
            assert_eq!(bb.len(), cfg.baseband_per_frame());
            for j in 0..bb.len() {
                assert!((bb.time_of(j) - d.baseband_time(k)).abs() < 1e-12);
                k += 1;
            }
        }
    }
}
