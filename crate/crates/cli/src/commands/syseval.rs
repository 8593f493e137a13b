//! The virtual linear-stage sweep: range × speed × noise × repetition.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wristsonar_core::simulate::{linear_stage_protocol, run_stage_trial, NoiseCondition, StageProtocol};
use wristsonar_core::tracking::TrackerConfig;

use super::{mean, sd, Common};
use crate::output::check_schema;
use crate::svg::{line_chart, LineSeries};
use crate::{load_config, OutDir, Provenance, Result, SCHEMA_VERSION};

/// Ranges whose far bound is at or below this are the near sensing region.
pub const NEAR_LIMIT_MM: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SysevalConfig {
    pub schema_version: u32,
    pub stage: StageProtocol,
    pub tracker: TrackerConfig,
}

impl Default for SysevalConfig {
    fn default() -> Self {
        SysevalConfig {
            schema_version: SCHEMA_VERSION,
            stage: StageProtocol::default(),
            tracker: TrackerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub index: usize,
    pub range_near_mm: f64,
    pub range_far_mm: f64,
    pub speed_mm_s: f64,
    pub noise: NoiseCondition,
    pub rep: usize,
    pub expected_mm: f64,
    pub measured_mm: f64,
    pub abs_error_mm: f64,
}

/// Mean and SD of absolute error over a group of trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRow {
    pub range_near_mm: f64,
    pub range_far_mm: f64,
    /// Empty when pooled over speeds.
    pub speed_mm_s: Option<f64>,
    /// Empty when pooled over noise conditions.
    pub noise: Option<NoiseCondition>,
    pub n: usize,
    pub mean_abs_error_mm: f64,
    pub sd_abs_error_mm: f64,
}

/// Pass/fail flags over the range × speed × noise cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SysevalChecks {
    /// Worst near-region cell under each noise condition.
    pub near_quiet_max_mm: f64,
    pub near_walker_max_mm: f64,
    pub near_quiet_within_1mm: bool,
    pub near_walker_within_5mm: bool,
    /// Best cell beyond the near region against the worst cell inside it.
    pub far_min_mm: f64,
    pub near_max_mm: f64,
    pub far_exceeds_near: bool,
    /// Pooled means of the two closest range cells and their difference
    /// relative to the smaller one.
    pub first_range_mean_mm: f64,
    pub second_range_mean_mm: f64,
    pub near_relative_difference: f64,
    pub near_ranges_similar: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SysevalReport {
    pub trials: Vec<TrialRow>,
    /// range × speed × noise.
    pub cells: Vec<CellRow>,
    /// range × noise, pooled over speeds.
    pub ranges: Vec<CellRow>,
    pub checks: SysevalChecks,
}

fn group(rows: &[&TrialRow], speed: Option<f64>, noise: Option<NoiseCondition>) -> CellRow {
    let errs: Vec<f64> = rows.iter().map(|r| r.abs_error_mm).collect();
    CellRow {
        range_near_mm: rows[0].range_near_mm,
        range_far_mm: rows[0].range_far_mm,
        speed_mm_s: speed,
        noise,
        n: errs.len(),
        mean_abs_error_mm: mean(&errs),
        sd_abs_error_mm: sd(&errs),
    }
}

/// Runs every stage trial (in parallel on the current rayon pool) and
/// aggregates.
pub fn run(cfg: &SysevalConfig) -> Result<SysevalReport> {
    check_schema(cfg.schema_version)?;
    let trials = linear_stage_protocol(&cfg.stage)?;
    let rows: Vec<TrialRow> = trials
        .par_iter()
        .map(|t| {
            let o = run_stage_trial(t, &cfg.tracker)?;
            Ok(TrialRow {
                index: t.index,
                range_near_mm: t.range_mm[0],
                range_far_mm: t.range_mm[1],
                speed_mm_s: t.speed_mm_s,
                noise: t.noise,
                rep: t.rep,
                expected_mm: o.expected_mm,
                measured_mm: o.measured_mm,
                abs_error_mm: o.abs_error_mm,
            })
        })
        .collect::<Result<_>>()?;

    let p = &cfg.stage;
    let mut cells = Vec::new();
    let mut ranges = Vec::new();
    for r in &p.ranges_mm {
        let in_range = |t: &&TrialRow| t.range_near_mm == r[0] && t.range_far_mm == r[1];
        for &speed in &p.speeds_mm_s {
            for &noise in &p.noise {
                let sel: Vec<&TrialRow> =
                    rows.iter().filter(in_range).filter(|t| t.speed_mm_s == speed && t.noise == noise).collect();
                if !sel.is_empty() {
                    cells.push(group(&sel, Some(speed), Some(noise)));
                }
            }
        }
        for &noise in &p.noise {
            let sel: Vec<&TrialRow> = rows.iter().filter(in_range).filter(|t| t.noise == noise).collect();
            if !sel.is_empty() {
                ranges.push(group(&sel, None, Some(noise)));
            }
        }
    }
    let checks = checks(&rows, &cells, &p.ranges_mm);
    Ok(SysevalReport { trials: rows, cells, ranges, checks })
}

fn checks(rows: &[TrialRow], cells: &[CellRow], range_cells: &[[f64; 2]]) -> SysevalChecks {
    let near = |c: &&CellRow| c.range_far_mm <= NEAR_LIMIT_MM;
    let far = |c: &&CellRow| c.range_near_mm >= NEAR_LIMIT_MM;
    let max = |it: &mut dyn Iterator<Item = &CellRow>| it.map(|c| c.mean_abs_error_mm).fold(f64::NAN, f64::max);
    let min = |it: &mut dyn Iterator<Item = &CellRow>| it.map(|c| c.mean_abs_error_mm).fold(f64::NAN, f64::min);
    let near_quiet_max_mm = max(&mut cells.iter().filter(near).filter(|c| c.noise == Some(NoiseCondition::Quiet)));
    let near_walker_max_mm = max(&mut cells.iter().filter(near).filter(|c| c.noise == Some(NoiseCondition::Walker)));
    let near_max_mm = max(&mut cells.iter().filter(near));
    let far_min_mm = min(&mut cells.iter().filter(far));

    let mut sorted: Vec<[f64; 2]> = range_cells.to_vec();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let pooled = |r: Option<&[f64; 2]>| {
        r.map_or(f64::NAN, |r| {
            mean(
                &rows
                    .iter()
                    .filter(|t| t.range_near_mm == r[0] && t.range_far_mm == r[1])
                    .map(|t| t.abs_error_mm)
                    .collect::<Vec<_>>(),
            )
        })
    };
    let (a, b) = (pooled(sorted.first()), pooled(sorted.get(1)));
    let rel = (a - b).abs() / a.min(b);
    SysevalChecks {
        near_quiet_max_mm,
        near_walker_max_mm,
        near_quiet_within_1mm: near_quiet_max_mm <= 1.0,
        near_walker_within_5mm: near_walker_max_mm <= 5.0,
        far_min_mm,
        near_max_mm,
        far_exceeds_near: far_min_mm > near_max_mm,
        first_range_mean_mm: a,
        second_range_mean_mm: b,
        near_relative_difference: rel,
        near_ranges_similar: rel < 0.5,
    }
}

/// Error against range centre, one line per speed × noise.
pub fn plot(report: &SysevalReport, provenance: &Provenance) -> String {
    let mut keys: Vec<(f64, NoiseCondition)> = Vec::new();
    for c in &report.cells {
        let k = (c.speed_mm_s.unwrap_or(f64::NAN), c.noise.unwrap_or(NoiseCondition::Quiet));
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let series: Vec<LineSeries> = keys
        .iter()
        .map(|&(speed, noise)| LineSeries {
            label: format!("{} mm/s {}", speed, noise.as_str()),
            points: report
                .cells
                .iter()
                .filter(|c| c.speed_mm_s == Some(speed) && c.noise == Some(noise))
                .map(|c| ((c.range_near_mm + c.range_far_mm) / 20.0, c.mean_abs_error_mm))
                .collect(),
            scatter: false,
        })
        .collect();
    line_chart(
        "Displacement error by finger distance",
        "distance (cm, cell centre)",
        "mean |error| (mm)",
        &series,
        provenance,
    )
}

pub fn execute(common: &Common) -> Result<SysevalReport> {
    let mut cfg: SysevalConfig = load_config(common.config.as_deref())?;
    if let Some(seed) = common.seed {
        cfg.stage.seed = seed;
    }
    let report = run(&cfg)?;
    let mut out = OutDir::create(&common.out, Provenance::new("syseval", cfg.stage.seed, &cfg)?)?;
    out.csv("syseval_trials.csv", &report.trials)?;
    out.csv("syseval_cells.csv", &report.cells)?;
    out.csv("syseval_ranges.csv", &report.ranges)?;
    #[derive(Serialize)]
    struct Results<'a> {
        ranges: &'a [CellRow],
        cells: &'a [CellRow],
        checks: &'a SysevalChecks,
    }
    out.json("syseval.json", &cfg, &Results { ranges: &report.ranges, cells: &report.cells, checks: &report.checks })?;
    if common.plot {
        let svg = plot(&report, out.provenance());
        out.svg("syseval.svg", svg)?;
    }
    Ok(report)
}
