//! WAV in, per-frame cursor CSV out.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use wristsonar_core::signals::AudioFrame;
use wristsonar_core::tracking::{CursorState, Tracker, TrackerConfig};

use super::Common;
use crate::output::check_schema;
use crate::svg::{line_chart, LineSeries};
use crate::{load_config, wav, CliError, OutDir, Provenance, Result, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackConfig {
    pub schema_version: u32,
    pub tracker: TrackerConfig,
}

impl Default for TrackConfig {
    fn default() -> Self {
        TrackConfig { schema_version: SCHEMA_VERSION, tracker: TrackerConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrackRow {
    pub time_s: f64,
    pub raw_disp_mm: f64,
    pub cursor_mm: f64,
    pub quality: f64,
}

impl From<CursorState> for TrackRow {
    fn from(c: CursorState) -> Self {
        TrackRow { time_s: c.time, raw_disp_mm: c.raw_displacement, cursor_mm: c.position, quality: c.quality }
    }
}

/// Wall time per frame, seconds. Never written to output files since it
/// varies between runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTiming {
    pub mean_s: f64,
    pub max_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackSummary {
    pub frames: usize,
    /// Audio samples after the last whole frame, ignored.
    pub trailing_samples: usize,
    pub final_cursor_mm: Option<f64>,
    pub mean_quality: Option<f64>,
}

/// Tracks every whole frame of `samples`.
pub fn run(samples: &[f64], sample_rate: u32, cfg: &TrackConfig) -> Result<(Vec<TrackRow>, FrameTiming)> {
    check_schema(cfg.schema_version)?;
    if sample_rate != cfg.tracker.sonar.sample_rate {
        return Err(CliError::Config(format!(
            "audio is sampled at {sample_rate} Hz but the tracker expects {} Hz",
            cfg.tracker.sonar.sample_rate
        )));
    }
    let mut tracker = Tracker::new(cfg.tracker)?;
    let n = cfg.tracker.sonar.frame_len;
    let mut rows = Vec::with_capacity(samples.len() / n);
    let (mut total, mut worst) = (0.0f64, 0.0f64);
    for (i, chunk) in samples.chunks_exact(n).enumerate() {
        let frame = AudioFrame::new(chunk.to_vec(), (i * n) as f64 / sample_rate as f64)?;
        let t0 = Instant::now();
        let c = tracker.track_frame(&frame)?;
        let dt = t0.elapsed().as_secs_f64();
        total += dt;
        worst = worst.max(dt);
        rows.push(c.into());
    }
    let mean_s = if rows.is_empty() { 0.0 } else { total / rows.len() as f64 };
    Ok((rows, FrameTiming { mean_s, max_s: worst }))
}

pub fn execute(common: &Common, input: &Path) -> Result<TrackSummary> {
    let cfg: TrackConfig = load_config(common.config.as_deref())?;
    let (samples, rate) = wav::read(input)?;
    let (rows, timing) = run(&samples, rate, &cfg)?;
    eprintln!(
        "tracked {} frames: mean {:.3} ms, max {:.3} ms per frame",
        rows.len(),
        timing.mean_s * 1e3,
        timing.max_s * 1e3
    );
    let seed = common.seed.unwrap_or(0);
    let mut out = OutDir::create(&common.out, Provenance::new("track", seed, &cfg)?)?;
    out.csv("track.csv", &rows)?;
    let q: Vec<f64> = rows.iter().map(|r| r.quality).collect();
    let summary = TrackSummary {
        frames: rows.len(),
        trailing_samples: samples.len() % cfg.tracker.sonar.frame_len,
        final_cursor_mm: rows.last().map(|r| r.cursor_mm),
        mean_quality: (!q.is_empty()).then(|| q.iter().sum::<f64>() / q.len() as f64),
    };
    out.json("track.json", &cfg, &summary)?;
    if common.plot {
        let series = [
            LineSeries {
                label: "raw".into(),
                points: rows.iter().map(|r| (r.time_s, r.raw_disp_mm)).collect(),
                scatter: false,
            },
            LineSeries {
                label: "cursor".into(),
                points: rows.iter().map(|r| (r.time_s, r.cursor_mm)).collect(),
                scatter: false,
            },
        ];
        let svg = line_chart("Tracked displacement", "time (s)", "displacement (mm)", &series, out.provenance());
        out.svg("track.svg", svg)?;
    }
    Ok(summary)
}
