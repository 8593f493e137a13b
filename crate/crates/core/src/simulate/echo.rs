use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::scene::{echo_gain, FingerPath, SceneConfig, Walker};
use crate::math::mix_seed;
use crate::signals::{AudioFrame, Demodulator, LocalOscillator, SonarConfig, CARRIER_AMPLITUDE};
use crate::{Error, Result};

/// Streaming microphone synthesiser for a scene.
///
/// Each reflector at range `r` contributes `g·A·cos(θ_i − ω·2r/c)`, where
/// `θ_i` is the transmitted carrier phase at sample `i`. The delay is applied
/// as a carrier phase shift, which is exact for a single tone. The finger
/// path is supplied per frame so closed-loop callers can steer it.
#[derive(Debug, Clone)]
pub struct EchoSynth {
    config: SonarConfig,
    lo: LocalOscillator,
    static_iq: Complex64,
    finger_gain: f64,
    walker: Option<Walker>,
    noise: Option<Normal<f64>>,
    rng: ChaCha8Rng,
    index: u64,
    // radians of echo phase per mm of range
    k_mm: f64,
}

impl EchoSynth {
    /// `carrier_phase` is the transmit reference phase; the tracker must use
    /// the same value.
    pub fn new(scene: &SceneConfig, config: &SonarConfig, carrier_phase: f64) -> Result<Self> {
        config.validate()?;
        scene.validate()?;
        let c = scene.speed_of_sound.unwrap_or(config.speed_of_sound);
        let k_mm = TAU * config.carrier_freq * 2.0 / (c * 1000.0);
        let static_iq = scene
            .static_reflectors
            .iter()
            .map(|r| Complex64::from_polar(CARRIER_AMPLITUDE * r.gain, -k_mm * r.range_mm))
            .sum();
        let finger_gain = scene.finger.as_ref().map_or(0.0, |f| f.gain);
        let noise = match scene.noise_snr_db {
            Some(snr) => {
                // SNR of the echo tone power (A·g)²/2 against white noise power σ²
                let reference = if scene.finger.is_some() { finger_gain } else { 1.0 };
                let sd = CARRIER_AMPLITUDE * reference / 2f64.sqrt() * 10f64.powf(-snr / 20.0);
                Some(Normal::new(0.0, sd).map_err(|_| Error::config("invalid noise level"))?)
            }
            None => None,
        };
        Ok(EchoSynth {
            config: *config,
            lo: LocalOscillator::new(config, carrier_phase),
            static_iq,
            finger_gain,
            walker: scene.walker,
            noise,
            rng: ChaCha8Rng::seed_from_u64(mix_seed(scene.seed, 0x5EC0)),
            index: 0,
            k_mm,
        })
    }

    pub fn config(&self) -> &SonarConfig {
        &self.config
    }

    /// Stream time of the next sample to be rendered.
    pub fn time(&self) -> f64 {
        self.index as f64 / self.config.sample_rate as f64
    }

    /// Renders the next `frame_len` samples.
    pub fn render_frame(&mut self, finger: Option<&dyn FingerPath>) -> AudioFrame {
        let n = self.config.frame_len;
        let fs = self.config.sample_rate as f64;
        let start_time = self.time();
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            let t = self.index as f64 / fs;
            let mut iq = self.static_iq;
            if let Some(path) = finger {
                let r = path.range_mm(t);
                let g = CARRIER_AMPLITUDE * echo_gain(self.finger_gain, r);
                iq += Complex64::from_polar(g, -self.k_mm * r);
            }
            if let Some(w) = &self.walker {
                let (r, g) = w.state_at(t);
                iq += Complex64::from_polar(CARRIER_AMPLITUDE * g, -self.k_mm * r);
            }
            let (c, s) = self.lo.at(self.index);
            let mut x = iq.re * c - iq.im * s;
            if let Some(noise) = &self.noise {
                x += noise.sample(&mut self.rng);
            }
            samples.push(x);
            self.index += 1;
        }
        AudioFrame { samples, start_time }
    }
}

/// Finger range at one baseband instant.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TruthSample {
    pub time: f64,
    pub range_mm: f64,
    /// Range change since the start of the stream.
    pub displacement_mm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EchoRecording {
    pub config: SonarConfig,
    pub audio: Vec<f64>,
    /// Sampled at the baseband rate on the demodulator's delay-compensated
    /// time grid. Empty when the scene has no finger.
    pub truth: Vec<TruthSample>,
}

impl EchoRecording {
    pub fn frames(&self) -> impl Iterator<Item = AudioFrame> + '_ {
        let n = self.config.frame_len;
        let fs = self.config.sample_rate as f64;
        self.audio
            .chunks_exact(n)
            .enumerate()
            .map(move |(i, c)| AudioFrame { samples: c.to_vec(), start_time: (i * n) as f64 / fs })
    }
}

/// Renders `duration` seconds of a scene, rounded up to whole frames, with
/// its ground-truth finger track.
pub fn synthesize_echo(scene: &SceneConfig, config: &SonarConfig, duration: f64) -> Result<EchoRecording> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::config("duration must be positive"));
    }
    let mut synth = EchoSynth::new(scene, config, 0.0)?;
    let frames = (duration * config.sample_rate as f64 / config.frame_len as f64).ceil() as usize;
    let mut audio = Vec::with_capacity(frames * config.frame_len);
    let finger = scene.finger.as_ref();
    for _ in 0..frames {
        let f = synth.render_frame(finger.map(|f| f as &dyn FingerPath));
        audio.extend_from_slice(&f.samples);
    }
    let mut truth = Vec::new();
    if let Some(f) = finger {
        let demod = Demodulator::new(*config, 0.0)?;
        let end = (frames * config.frame_len) as f64 / config.sample_rate as f64;
        let r0 = f.range_mm(0.0);
        for k in 0.. {
            let t = demod.baseband_time(k);
            if t >= end {
                break;
            }
            if t < 0.0 {
                continue;
            }
            let r = f.range_mm(t);
            truth.push(TruthSample { time: t, range_mm: r, displacement_mm: r - r0 });
        }
    }
    Ok(EchoRecording { config: *config, audio, truth })
}
