use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::echo::EchoSynth;
use super::scene::{FingerConfig, FingerPath, Reflector, SceneConfig, Segment, Trajectory, Walker};
use crate::math::mix_seed;
use crate::tracking::{Tracker, TrackerConfig};
use crate::{Error, Result};

/// Background condition of a stage trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NoiseCondition {
    Quiet,
    Walker,
}

impl NoiseCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseCondition::Quiet => "quiet",
            NoiseCondition::Walker => "walker",
        }
    }
}

/// Factorial design for the virtual linear stage: a prop finger moved a
/// fixed distance at constant speed over a prop hand.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct StageProtocol {
    /// (near, far) bounds of each range cell, mm.
    pub ranges_mm: Vec<[f64; 2]>,
    pub speeds_mm_s: Vec<f64>,
    pub noise: Vec<NoiseCondition>,
    pub reps: usize,
    pub movement_mm: f64,
    /// Still time before the movement starts, s.
    pub lead_in_s: f64,
    /// Still time after the movement before the cursor is read, s.
    pub settle_s: f64,
    /// Direct path and hand/forearm clutter.
    pub clutter: Vec<Reflector>,
    pub finger_gain: f64,
    pub noise_snr_db: f64,
    pub walker: Walker,
    /// Room speed of sound, m/s; see [`SceneConfig::speed_of_sound`].
    pub speed_of_sound: Option<f64>,
    pub seed: u64,
}

impl Default for StageProtocol {
    fn default() -> Self {
        StageProtocol {
            ranges_mm: vec![[0.0, 50.0], [50.0, 100.0], [100.0, 150.0], [150.0, 200.0]],
            speeds_mm_s: vec![40.0, 80.0, 120.0],
            noise: vec![NoiseCondition::Quiet, NoiseCondition::Walker],
            reps: 10,
            movement_mm: 50.0,
            lead_in_s: 0.3,
            settle_s: 1.0,
            clutter: vec![
                Reflector { range_mm: 0.0, gain: 0.35 },
                Reflector { range_mm: 45.0, gain: 0.15 },
                Reflector { range_mm: 135.0, gain: 0.05 },
            ],
            // LEVD stops refreshing a bit beyond 10 cm at this gain
            finger_gain: 0.3,
            noise_snr_db: 40.0,
            walker: Walker::default(),
            // a 25 °C room against the tracker's 20 °C constant
            speed_of_sound: Some(346.1),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageTrial {
    pub index: usize,
    pub range_mm: [f64; 2],
    pub speed_mm_s: f64,
    pub noise: NoiseCondition,
    pub rep: usize,
    pub scene: SceneConfig,
    /// Signed finger displacement the trial should report, mm.
    pub expected_mm: f64,
}

impl StageTrial {
    /// Time from stream start until the cursor is read.
    pub fn duration(&self) -> f64 {
        self.scene.finger.as_ref().map_or(0.0, |f| f.trajectory.duration())
    }
}

/// Expands the protocol into its full factorial trial list, ordered
/// range, speed, noise, repetition. Even repetitions move outward from the
/// near bound, odd ones inward from the far bound.
pub fn linear_stage_protocol(p: &StageProtocol) -> Result<Vec<StageTrial>> {
    if p.ranges_mm.is_empty() || p.speeds_mm_s.is_empty() || p.noise.is_empty() || p.reps == 0 {
        return Err(Error::config("stage protocol needs non-empty ranges, speeds, noise and reps"));
    }
    if p.speeds_mm_s.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::config("stage speeds must be positive"));
    }
    if !(p.movement_mm.is_finite() && p.movement_mm > 0.0) {
        return Err(Error::config("movement_mm must be positive"));
    }
    if !(p.lead_in_s > 0.0 && p.settle_s > 0.0) {
        return Err(Error::config("lead_in_s and settle_s must be positive"));
    }
    let mut out = Vec::new();
    for &range in &p.ranges_mm {
        for &speed in &p.speeds_mm_s {
            for &noise in &p.noise {
                for rep in 0..p.reps {
                    let index = out.len();
                    let (start, delta) =
                        if rep % 2 == 0 { (range[0], p.movement_mm) } else { (range[1], -p.movement_mm) };
                    let trajectory = Trajectory::new(vec![
                        Segment::hold(p.lead_in_s),
                        Segment::constant_velocity(p.movement_mm / speed, delta),
                        Segment::hold(p.settle_s),
                    ])?;
                    let scene = SceneConfig {
                        static_reflectors: p.clutter.clone(),
                        finger: Some(FingerConfig { start_range_mm: start, gain: p.finger_gain, trajectory }),
                        noise_snr_db: Some(p.noise_snr_db),
                        walker: (noise == NoiseCondition::Walker).then_some(p.walker),
                        speed_of_sound: p.speed_of_sound,
                        seed: mix_seed(p.seed, index as u64),
                    };
                    scene.validate()?;
                    out.push(StageTrial {
                        index,
                        range_mm: range,
                        speed_mm_s: speed,
                        noise,
                        rep,
                        scene,
                        expected_mm: delta,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StageOutcome {
    pub measured_mm: f64,
    pub expected_mm: f64,
    pub abs_error_mm: f64,
}

/// Streams a trial through the echo synthesiser and the tracker and reads
/// the cursor once the finger has settled.
pub fn run_stage_trial(trial: &StageTrial, tracker: &TrackerConfig) -> Result<StageOutcome> {
    let finger = trial.scene.finger.as_ref().ok_or_else(|| Error::config("stage trial has no finger"))?;
    let mut synth = EchoSynth::new(&trial.scene, &tracker.sonar, tracker.carrier_phase)?;
    let mut tr = Tracker::new(*tracker)?;
    let frames = (trial.duration() * tracker.sonar.sample_rate as f64 / tracker.sonar.frame_len as f64).ceil() as usize;
    let mut last = None;
    for _ in 0..frames {
        let frame = synth.render_frame(Some(finger as &dyn FingerPath));
        last = Some(tr.track_frame(&frame)?);
    }
    let measured = last.map_or(0.0, |c| c.position);
    Ok(StageOutcome {
        measured_mm: measured,
        expected_mm: trial.expected_mm,
        abs_error_mm: (measured - trial.expected_mm).abs(),
    })
}
