//! Scene JSON in, echo WAV plus ground-truth CSV out.

use serde::{Deserialize, Serialize};
use wristsonar_core::signals::SonarConfig;
use wristsonar_core::simulate::{
    synthesize_echo, EchoRecording, FingerConfig, SceneConfig, Segment, StageProtocol, Trajectory, TruthSample,
};

use super::Common;
use crate::output::check_schema;
use crate::svg::{line_chart, LineSeries};
use crate::{load_config, OutDir, Provenance, Result, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub schema_version: u32,
    pub sonar: SonarConfig,
    pub scene: SceneConfig,
    /// Seconds to render; defaults to the finger trajectory's length, or 1 s
    /// without a finger.
    pub duration_s: Option<f64>,
}

impl Default for SimulateConfig {
    /// A stage-like scene: the finger starts 30 mm out and moves 50 mm away
    /// at 80 mm/s over the stage clutter.
    fn default() -> Self {
        let stage = StageProtocol::default();
        let scene = SceneConfig {
            static_reflectors: stage.clutter,
            finger: Some(FingerConfig {
                start_range_mm: 30.0,
                gain: stage.finger_gain,
                trajectory: Trajectory {
                    segments: vec![Segment::hold(0.3), Segment::constant_velocity(0.625, 50.0), Segment::hold(1.0)],
                },
            }),
            noise_snr_db: Some(stage.noise_snr_db),
            walker: None,
            speed_of_sound: None,
            seed: 0,
        };
        SimulateConfig { schema_version: SCHEMA_VERSION, sonar: SonarConfig::default(), scene, duration_s: None }
    }
}

impl SimulateConfig {
    pub fn duration(&self) -> f64 {
        self.duration_s.unwrap_or_else(|| {
            self.scene.finger.as_ref().map(|f| f.trajectory.duration()).filter(|d| *d > 0.0).unwrap_or(1.0)
        })
    }
}

#[derive(Debug, Clone, Serialize)]
struct TruthRow {
    time_s: f64,
    range_mm: f64,
    displacement_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateSummary {
    pub frames: usize,
    pub samples: usize,
    pub sample_rate: u32,
    pub duration_s: f64,
    pub peak_abs: f64,
    pub clipped_samples: usize,
    pub truth_samples: usize,
    pub net_displacement_mm: Option<f64>,
}

pub fn run(cfg: &SimulateConfig) -> Result<EchoRecording> {
    check_schema(cfg.schema_version)?;
    Ok(synthesize_echo(&cfg.scene, &cfg.sonar, cfg.duration())?)
}

pub fn execute(common: &Common) -> Result<SimulateSummary> {
    let mut cfg: SimulateConfig = load_config(common.config.as_deref())?;
    if let Some(seed) = common.seed {
        cfg.scene.seed = seed;
    }
    let rec = run(&cfg)?;
    let mut out = OutDir::create(&common.out, Provenance::new("simulate", cfg.scene.seed, &cfg)?)?;
    let clipped = out.wav("echo.wav", &rec.audio, cfg.sonar.sample_rate)?;
    if clipped > 0 {
        eprintln!("warning: {clipped} samples clipped; lower the reflector gains");
    }
    let rows: Vec<TruthRow> = rec
        .truth
        .iter()
        .map(|s: &TruthSample| TruthRow { time_s: s.time, range_mm: s.range_mm, displacement_mm: s.displacement_mm })
        .collect();
    out.csv("truth.csv", &rows)?;
    let summary = SimulateSummary {
        frames: rec.audio.len() / cfg.sonar.frame_len,
        samples: rec.audio.len(),
        sample_rate: cfg.sonar.sample_rate,
        duration_s: rec.audio.len() as f64 / cfg.sonar.sample_rate as f64,
        peak_abs: rec.audio.iter().fold(0.0, |m, x| m.max(x.abs())),
        clipped_samples: clipped,
        truth_samples: rows.len(),
        net_displacement_mm: rec.truth.last().map(|s| s.displacement_mm),
    };
    out.json("simulate.json", &cfg, &summary)?;
    if common.plot {
        let series = [LineSeries {
            label: "finger".into(),
            points: rows.iter().map(|r| (r.time_s, r.range_mm)).collect(),
            scatter: false,
        }];
        let svg = line_chart("Simulated finger range", "time (s)", "range (mm)", &series, out.provenance());
        out.svg("truth.svg", svg)?;
    }
    Ok(summary)
}
