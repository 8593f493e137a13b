use crate::{Error, Result};

/// Cursor update rate of the tracking pipeline, in frames per second.
pub const UPDATE_RATE_HZ: u32 = 25;

/// Carrier, sampling, decimation and propagation constants.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SonarConfig {
    /// Audio sample rate, samples/s.
    pub sample_rate: u32,
    /// Transmitted tone, Hz.
    pub carrier_freq: f64,
    /// Samples per processing frame.
    pub frame_len: usize,
    /// Complex baseband rate after decimation, samples/s.
    pub baseband_rate: u32,
    /// Speed of sound, m/s.
    pub speed_of_sound: f64,
}

impl Default for SonarConfig {
    fn default() -> Self {
        SonarConfig {
            sample_rate: 48_000,
            carrier_freq: 20_000.0,
            frame_len: 1920,
            baseband_rate: 500,
            speed_of_sound: 343.0,
        }
    }
}

impl SonarConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 || self.baseband_rate == 0 {
            return Err(Error::config("sample and baseband rates must be positive"));
        }
        if !self.sample_rate.is_multiple_of(self.baseband_rate) {
            return Err(Error::config(alloc::format!(
                "sample_rate {} is not a multiple of baseband_rate {}",
                self.sample_rate,
                self.baseband_rate
            )));
        }
        if !(self.carrier_freq > 0.0 && self.carrier_freq < self.sample_rate as f64 / 2.0) {
            return Err(Error::config("carrier_freq must lie in (0, sample_rate/2)"));
        }
        if self.frame_len as u64 * UPDATE_RATE_HZ as u64 != self.sample_rate as u64 {
            return Err(Error::config(alloc::format!(
                "frame_len {} does not give a {} Hz update rate at {} samples/s",
                self.frame_len,
                UPDATE_RATE_HZ,
                self.sample_rate
            )));
        }
        if !(self.frame_len as u64 * self.baseband_rate as u64).is_multiple_of(self.sample_rate as u64) {
            return Err(Error::config("frame_len must hold a whole number of baseband samples"));
        }
        if !(self.speed_of_sound.is_finite() && self.speed_of_sound > 0.0) {
            return Err(Error::config("speed_of_sound must be positive"));
        }
        Ok(())
    }

    /// Carrier wavelength in millimetres.
    pub fn wavelength_mm(&self) -> f64 {
        1000.0 * self.speed_of_sound / self.carrier_freq
    }

    /// Audio samples per baseband sample.
    pub fn decimation(&self) -> usize {
        (self.sample_rate / self.baseband_rate) as usize
    }

    pub fn baseband_per_frame(&self) -> usize {
        self.frame_len / self.decimation()
    }

    pub fn frame_duration(&self) -> f64 {
        self.frame_len as f64 / self.sample_rate as f64
    }

    /// Round-trip delay, in seconds, of an echo from `range_mm`.
    pub fn round_trip_delay(&self, range_mm: f64) -> f64 {
        2.0 * range_mm / (1000.0 * self.speed_of_sound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_consistent() {
        let c = SonarConfig::default();
        c.validate().unwrap();
        assert_eq!(c.decimation(), 96);
        assert_eq!(c.baseband_per_frame(), 20);
        assert!((c.frame_duration() - 0.04).abs() < 1e-15);
        let lambda = c.wavelength_mm();
        assert!((lambda - 17.15).abs() / 17.15 < 1e-9);
        assert!((lambda * c.carrier_freq / 1000.0 - c.speed_of_sound).abs() / 343.0 < 1e-9);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = SonarConfig::default();
        let bad = [
            SonarConfig { baseband_rate: 470, ..base },
            SonarConfig { carrier_freq: 24_000.0, ..base },
            SonarConfig { frame_len: 2048, ..base },
            // 19.2 baseband samples per frame
            SonarConfig { baseband_rate: 480, ..base },
            SonarConfig { speed_of_sound: 0.0, ..base },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::Config(_))), "{c:?}");
        }
    }
}
