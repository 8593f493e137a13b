use alloc::vec::Vec;
use core::f64::consts::TAU;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::SonarConfig;
use crate::{Error, Result};

/// Transmit amplitude relative to full scale. Leaves headroom for the sum of
/// the direct path and the echoes at the microphone.
pub const CARRIER_AMPLITUDE: f64 = 0.9;

/// A block of real microphone (or speaker) samples.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioFrame {
    pub samples: Vec<f64>,
    /// Time of the first sample, seconds.
    pub start_time: f64,
}

impl AudioFrame {
    pub fn new(samples: Vec<f64>, start_time: f64) -> Result<Self> {
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::contract(alloc::format!("audio sample {i} is not finite")));
        }
        Ok(AudioFrame { samples, start_time })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Carrier phase at absolute sample `index`, in radians, reduced to `[0, 2π)`
/// before `phase0` is added.
///
/// The product `index * carrier_freq` is exact in `f64` for any realistic
/// stream length, so the phase does not drift over long recordings.
pub fn carrier_phase(config: &SonarConfig, index: u64, phase0: f64) -> f64 {
    let cycles = index as f64 * config.carrier_freq / config.sample_rate as f64;
    TAU * cycles.fract() + phase0
}

/// Generates `n` samples of `A·cos(2π·f·i/fs + phase0)`.
///
/// Returns the frame together with the phase at which the next frame should
/// start, so consecutive calls chain without a discontinuity.
pub fn generate_carrier(config: &SonarConfig, n: usize, phase0: f64) -> (AudioFrame, f64) {
    let samples = (0..n as u64).map(|i| CARRIER_AMPLITUDE * carrier_phase(config, i, phase0).cos()).collect();
    let next = (carrier_phase(config, n as u64, phase0)) % TAU;
    (AudioFrame { samples, start_time: 0.0 }, next)
}

/// Carrier `(cos θ_i, sin θ_i)` lookup by absolute sample index.
///
/// When the carrier is a whole number of hertz the phase sequence repeats
/// every `fs / gcd(fs, f)` samples (12 for 20 kHz at 48 kHz) and is served
/// from a table; otherwise it is computed per sample.
#[derive(Debug, Clone)]
pub struct LocalOscillator {
    config: SonarConfig,
    phase0: f64,
    table: Option<Vec<(f64, f64)>>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl LocalOscillator {
    pub fn new(config: &SonarConfig, phase0: f64) -> Self {
        let table = if config.carrier_freq.fract() == 0.0 {
            let fs = config.sample_rate as u64;
            let period = fs / gcd(fs, config.carrier_freq as u64);
            (period <= 1 << 16).then(|| {
                (0..period)
                    .map(|k| {
                        let th = carrier_phase(config, k, phase0);
                        (th.cos(), th.sin())
                    })
                    .collect()
            })
        } else {
            None
        };
        LocalOscillator { config: *config, phase0, table }
    }

    #[inline]
    pub fn at(&self, index: u64) -> (f64, f64) {
        match &self.table {
            Some(t) => t[(index % t.len() as u64) as usize],
            None => {
                let th = carrier_phase(&self.config, index, self.phase0);
                (th.cos(), th.sin())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn first_sample_and_quadrature_start() {
        let cfg = SonarConfig::default();
        let (f, _) = generate_carrier(&cfg, 4, 0.0);
        assert!((f.samples[0] - 0.9).abs() < 1e-15);
        let (g, _) = generate_carrier(&cfg, 4, PI / 2.0);
        assert!(g.samples[0].abs() < 1e-12);
    }

    #[test]
    fn chaining_is_seamless() {
        let cfg = SonarConfig::default();
        let (whole, _) = generate_carrier(&cfg, 3000, 0.3);
        let (a, next) = generate_carrier(&cfg, 1234, 0.3);
        let (b, _) = generate_carrier(&cfg, 3000 - 1234, next);
        let joined: Vec<f64> = a.samples.iter().chain(b.samples.iter()).copied().collect();
        for (x, y) in whole.samples.iter().zip(&joined) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_period_count_over_one_second() {
        // 20 kHz at 48 kHz repeats every 12 samples (5 cycles); after 48000
        // samples the phase returns exactly to the start.
        let cfg = SonarConfig::default();
        assert_eq!(carrier_phase(&cfg, 48_000, 0.0), 0.0);
        assert_eq!(carrier_phase(&cfg, 12, 0.0), 0.0);
        let (f, next) = generate_carrier(&cfg, 48_000, 0.0);
        assert_eq!(next, 0.0);
        // rising zero crossings count whole periods
        let crossings = f.samples.windows(2).filter(|w| w[0] < 0.0 && w[1] >= 0.0).count();
        assert!((19_999..=20_000).contains(&crossings), "{crossings}");
    }

    #[test]
    fn oscillator_table_matches_direct_phase() {
        let cfg = SonarConfig::default();
        let lo = LocalOscillator::new(&cfg, 0.7);
        let odd = SonarConfig { carrier_freq: 19_999.5, ..cfg };
        let lo_odd = LocalOscillator::new(&odd, 0.7);
        for i in [0u64, 1, 11, 12, 13, 47_999, 1_000_003] {
            let th = carrier_phase(&cfg, i, 0.7);
            let (c, s) = lo.at(i);
            assert!((c - th.cos()).abs() < 1e-9 && (s - th.sin()).abs() < 1e-9);
            let th = carrier_phase(&odd, i, 0.7);
            let (c, s) = lo_odd.at(i);
            assert!((c - th.cos()).abs() < 1e-12 && (s - th.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_finite_audio() {
        assert!(AudioFrame::new(alloc::vec![0.0, f64::NAN], 0.0).is_err());
    }
}
