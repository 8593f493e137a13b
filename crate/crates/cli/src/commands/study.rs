//! Closed-loop replications of the two selection studies with simulated
//! participants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wristsonar_core::fitts::{
    make_study1_session, make_study2_session, run_protocol_trial, summarize, AgentSetup, CellSummary, FittsSummary,
    Pipeline, ProtocolTrial, SonarPipeline, TrialRecord,
};
use wristsonar_core::triggers::{offset_sweep, Method, OffsetSweep, PinchCase, OFFSETS_MS};

use super::{mean, sd, Common};
use crate::output::check_schema;
use crate::svg::{bar_chart, line_chart, BarSeries, LineSeries};
use crate::{load_config, CliError, OutDir, Provenance, Result, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    /// Serial binary selection over three widths and two spacings.
    Serial,
    /// Four selections among three targets, with and without haptics.
    Multi,
}

impl Study {
    pub fn command(self) -> &'static str {
        match self {
            Study::Serial => "fitts",
            Study::Multi => "multi",
        }
    }

    fn default_methods(self) -> Vec<Method> {
        match self {
            Study::Serial => Method::ALL.to_vec(),
            Study::Multi => vec![Method::DoubleCrossing, Method::Dwell],
        }
    }

    fn default_haptics(self) -> Vec<bool> {
        match self {
            Study::Serial => vec![false],
            Study::Multi => vec![false, true],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub schema_version: u32,
    /// Simulated participants; participant `p` runs with seed `seed + p`.
    pub participants: usize,
    /// Defaults depend on the study.
    pub methods: Option<Vec<Method>>,
    pub haptics: Option<Vec<bool>>,
    /// Agent parameters and cursor pipeline; `"pipeline": "bypass"` skips
    /// the acoustic chain.
    pub setup: AgentSetup,
    /// Pinch look-back offsets for the correction sweep, ms.
    pub offsets_ms: Vec<f64>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            schema_version: SCHEMA_VERSION,
            participants: 5,
            methods: None,
            haptics: None,
            setup: AgentSetup { pipeline: Pipeline::Sonar(SonarPipeline::default()), ..AgentSetup::default() },
            offsets_ms: OFFSETS_MS.to_vec(),
        }
    }
}

impl StudyConfig {
    /// Fills study-specific defaults so the recorded config is explicit.
    pub fn resolve(mut self, study: Study) -> Result<Self> {
        check_schema(self.schema_version)?;
        self.methods.get_or_insert_with(|| study.default_methods());
        self.haptics.get_or_insert_with(|| study.default_haptics());
        if self.participants == 0 {
            return Err(CliError::Config("participants must be at least 1".into()));
        }
        if self.methods.as_ref().is_some_and(|m| m.is_empty()) || self.haptics.as_ref().is_some_and(|h| h.is_empty()) {
            return Err(CliError::Config("methods and haptics must not be empty".into()));
        }
        Ok(self)
    }

    fn methods(&self) -> &[Method] {
        self.methods.as_deref().unwrap_or(&[])
    }

    fn haptics(&self) -> &[bool] {
        self.haptics.as_deref().unwrap_or(&[])
    }
}

/// A trial as run, with where it sat in the session.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub participant: usize,
    /// Position within its block.
    pub trial: usize,
    pub record: TrialRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRun {
    pub study: Study,
    /// Seed of each participant.
    pub seeds: Vec<u64>,
    /// Participant-major, then method, then session order.
    pub records: Vec<RunRecord>,
}

impl StudyRun {
    pub fn participant(&self, p: usize) -> Vec<TrialRecord> {
        self.records.iter().filter(|r| r.participant == p).map(|r| r.record.clone()).collect()
    }

    /// Every pinch of every trial, practice included.
    pub fn pinch_cases(&self) -> Vec<PinchCase> {
        self.records.iter().flat_map(|r| r.record.pinch_cases.iter().cloned()).collect()
    }
}

fn sessions(study: Study, cfg: &StudyConfig, seed: u64) -> Vec<(usize, Method, ProtocolTrial)> {
    let mut jobs = Vec::new();
    for p in 0..cfg.participants {
        let s = seed.wrapping_add(p as u64);
        for &m in cfg.methods() {
            match study {
                Study::Serial => {
                    for &h in cfg.haptics() {
                        for mut t in make_study1_session(s) {
                            t.haptic = h;
                            jobs.push((p, m, t));
                        }
                    }
                }
                Study::Multi => {
                    for t in make_study2_session(s).into_iter().filter(|t| cfg.haptics().contains(&t.haptic)) {
                        jobs.push((p, m, t));
                    }
                }
            }
        }
    }
    jobs
}

/// Runs every trial of every participant on the current rayon pool.
pub fn run(study: Study, cfg: &StudyConfig, seed: u64) -> Result<StudyRun> {
    let jobs = sessions(study, cfg, seed);
    let records = jobs
        .par_iter()
        .map(|(p, m, t)| {
            Ok(RunRecord { participant: *p, trial: t.index, record: run_protocol_trial(t, *m, &cfg.setup)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let seeds = (0..cfg.participants).map(|p| seed.wrapping_add(p as u64)).collect();
    Ok(StudyRun { study, seeds, records })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParticipantSummary {
    pub participant: usize,
    pub seed: u64,
    pub summaries: Vec<FittsSummary>,
}

/// Mean and SD across participants of their per-condition summaries.
/// `haptic` is empty for rows that pool several haptic conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionMean {
    pub method: Method,
    pub haptic: Option<bool>,
    pub participants: usize,
    pub tp: f64,
    pub tp_sd: f64,
    pub mt: f64,
    pub mt_sd: f64,
    pub er: f64,
    pub er_sd: f64,
    pub tre: f64,
    pub tre_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingChecks {
    /// TP(double-crossing) > TP(dwell) > TP(pinch) on participant means.
    pub tp_dc_gt_dwell_gt_pinch: Option<bool>,
    /// ER(pinch) > ER(double-crossing).
    pub er_pinch_gt_dc: Option<bool>,
    /// ER(double-crossing) > ER(dwell), haptic conditions pooled.
    pub er_dc_gt_dwell: Option<bool>,
    /// The same within every haptic condition.
    pub er_dc_gt_dwell_each_haptic: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepChecks {
    /// Non-decreasing over the offsets and higher at the last than the first.
    pub corrected_increases: bool,
    pub premature_increases: bool,
    pub crossover_ms: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub sweep: OffsetSweep,
    pub checks: SweepChecks,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub study: Study,
    /// How `tp` is aggregated; `tp_inverse_slope` holds the regression form.
    pub tp_aggregation: &'static str,
    pub participants: Vec<ParticipantSummary>,
    /// All participants' trials summarised together.
    pub pooled: Vec<FittsSummary>,
    pub means: Vec<ConditionMean>,
    pub checks: OrderingChecks,
    pub offset_sweep: Option<SweepReport>,
}

fn increases(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] >= w[0]) && xs.len() > 1 && xs[xs.len() - 1] > xs[0]
}

pub fn sweep_checks(sweep: &OffsetSweep) -> SweepChecks {
    let corrected: Vec<f64> = sweep.rows.iter().map(|r| r.corrected_pct).collect();
    let premature: Vec<f64> = sweep.rows.iter().map(|r| r.premature_pct).collect();
    SweepChecks {
        corrected_increases: increases(&corrected),
        premature_increases: increases(&premature),
        crossover_ms: sweep.crossover_ms,
    }
}

fn condition_mean(method: Method, haptic: Option<bool>, rows: &[&FittsSummary]) -> ConditionMean {
    let col = |f: fn(&FittsSummary) -> f64| rows.iter().map(|s| f(s)).filter(|v| v.is_finite()).collect::<Vec<_>>();
    let (tp, mt, er, tre) = (col(|s| s.tp), col(|s| s.mt), col(|s| s.er), col(|s| s.tre));
    ConditionMean {
        method,
        haptic,
        participants: rows.len(),
        tp: mean(&tp),
        tp_sd: sd(&tp),
        mt: mean(&mt),
        mt_sd: sd(&mt),
        er: mean(&er),
        er_sd: sd(&er),
        tre: mean(&tre),
        tre_sd: sd(&tre),
    }
}

fn with_haptics_pooled(records: &[TrialRecord]) -> Vec<TrialRecord> {
    records
        .iter()
        .cloned()
        .map(|mut r| {
            r.haptic = false;
            r
        })
        .collect()
}

/// Summaries, participant means, ordering checks and, when pinch trials
/// ran, the offset sweep.
pub fn analyse(run: &StudyRun, cfg: &StudyConfig) -> Result<StudyReport> {
    let mut participants = Vec::new();
    let mut pooled_haptics = Vec::new();
    for (p, &seed) in run.seeds.iter().enumerate() {
        let recs = run.participant(p);
        participants.push(ParticipantSummary { participant: p, seed, summaries: summarize(&recs)? });
        pooled_haptics.push(summarize(&with_haptics_pooled(&recs))?);
    }
    let all: Vec<TrialRecord> = run.records.iter().map(|r| r.record.clone()).collect();
    let pooled = summarize(&all)?;

    let mut means = Vec::new();
    for &m in cfg.methods() {
        for &h in cfg.haptics() {
            let rows: Vec<&FittsSummary> =
                participants.iter().flat_map(|p| &p.summaries).filter(|s| s.method == m && s.haptic == h).collect();
            if !rows.is_empty() {
                means.push(condition_mean(m, Some(h), &rows));
            }
        }
        let rows: Vec<&FittsSummary> = pooled_haptics.iter().flatten().filter(|s| s.method == m).collect();
        if cfg.haptics().len() > 1 && !rows.is_empty() {
            means.push(condition_mean(m, None, &rows));
        }
    }

    let get = |m: Method, h: Option<bool>| means.iter().find(|c| c.method == m && c.haptic == h);
    // with a single haptic condition its rows are the overall ones
    let overall = |m: Method| get(m, None).or_else(|| cfg.haptics().first().and_then(|&h| get(m, Some(h))));
    let (dc, dw, pi) = (overall(Method::DoubleCrossing), overall(Method::Dwell), overall(Method::Pinch));
    let checks = OrderingChecks {
        tp_dc_gt_dwell_gt_pinch: match (dc, dw, pi) {
            (Some(a), Some(b), Some(c)) => Some(a.tp > b.tp && b.tp > c.tp),
            _ => None,
        },
        er_pinch_gt_dc: dc.zip(pi).map(|(a, c)| c.er > a.er),
        er_dc_gt_dwell: dc.zip(dw).map(|(a, b)| a.er > b.er),
        er_dc_gt_dwell_each_haptic: dc.zip(dw).map(|_| {
            cfg.haptics().iter().all(|&h| {
                matches!((get(Method::DoubleCrossing, Some(h)), get(Method::Dwell, Some(h))), (Some(a), Some(b)) if a.er > b.er)
            })
        }),
    };

    let cases = run.pinch_cases();
    let offset_sweep = if cases.is_empty() {
        None
    } else {
        let sweep = offset_sweep(&cases, &cfg.offsets_ms)?;
        Some(SweepReport { checks: sweep_checks(&sweep), sweep })
    };
    Ok(StudyReport {
        study: run.study,
        tp_aggregation: "mean over (W, A) cells of ID_e / MT",
        participants,
        pooled,
        means,
        checks,
        offset_sweep,
    })
}

#[derive(Debug, Serialize)]
struct SelectionRow {
    participant: usize,
    seed: u64,
    method: Method,
    haptic: bool,
    block: usize,
    trial: usize,
    practice: bool,
    width_mm: f64,
    amplitude_mm: f64,
    selection: usize,
    target_id: u32,
    selected_id: Option<u32>,
    target_center_mm: f64,
    start_mm: f64,
    endpoint_mm: f64,
    t_start_s: f64,
    t_select_s: f64,
    movement_time_s: f64,
    error: bool,
    re_entries: u32,
    missing: Option<String>,
}

#[derive(Debug, Serialize)]
struct EventRow {
    time_s: f64,
    method: Method,
    kind: &'static str,
    target_id: Option<u32>,
    coordinate_mm: f64,
    haptic_ms: Option<f64>,
    haptic_intensity: Option<f64>,
    participant: usize,
    haptic_condition: bool,
    block: usize,
    trial: usize,
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    scope: &'static str,
    participant: Option<usize>,
    method: Method,
    haptic: bool,
    trials: usize,
    missing: usize,
    selections: usize,
    tp: f64,
    tp_inverse_slope: Option<f64>,
    mt: f64,
    er: f64,
    tre: f64,
    model_a: Option<f64>,
    model_b: Option<f64>,
    model_r2: Option<f64>,
    best_width_mm: Option<f64>,
    best_amplitude_mm: Option<f64>,
}

#[derive(Debug, Serialize)]
struct CellRow {
    scope: &'static str,
    participant: Option<usize>,
    method: Method,
    haptic: bool,
    width_mm: f64,
    amplitude_mm: f64,
    n: usize,
    id_e: f64,
    a_e: f64,
    w_e: f64,
    floored: bool,
    mt: f64,
    tp: f64,
    er: f64,
    tre: f64,
}

impl CellRow {
    fn new(scope: &'static str, participant: Option<usize>, s: &FittsSummary, c: &CellSummary) -> Self {
        CellRow {
            scope,
            participant,
            method: s.method,
            haptic: s.haptic,
            width_mm: c.width,
            amplitude_mm: c.amplitude,
            n: c.n,
            id_e: c.id_e,
            a_e: c.a_e,
            w_e: c.w_e,
            floored: c.floored,
            mt: c.mt,
            tp: c.tp,
            er: c.er,
            tre: c.tre,
        }
    }
}

fn summary_rows(scope: &'static str, participant: Option<usize>, summaries: &[FittsSummary]) -> Vec<SummaryRow> {
    summaries
        .iter()
        .map(|s| {
            let best = s.best_cell.map(|i| &s.cells[i]);
            SummaryRow {
                scope,
                participant,
                method: s.method,
                haptic: s.haptic,
                trials: s.trials,
                missing: s.missing,
                selections: s.selections,
                tp: s.tp,
                tp_inverse_slope: s.tp_inverse_slope,
                mt: s.mt,
                er: s.er,
                tre: s.tre,
                model_a: s.model.map(|m| m.a),
                model_b: s.model.map(|m| m.b),
                model_r2: s.model.map(|m| m.r2),
                best_width_mm: best.map(|c| c.width),
                best_amplitude_mm: best.map(|c| c.amplitude),
            }
        })
        .collect()
}

fn cell_rows(scope: &'static str, participant: Option<usize>, summaries: &[FittsSummary]) -> Vec<CellRow> {
    summaries.iter().flat_map(|s| s.cells.iter().map(move |c| CellRow::new(scope, participant, s, c))).collect()
}

fn write(out: &mut OutDir, run: &StudyRun, report: &StudyReport, cfg: &StudyConfig, plot: bool) -> Result<()> {
    let prefix = run.study.command();
    let mut selections = Vec::new();
    let mut events = Vec::new();
    for r in &run.records {
        let t = &r.record;
        for s in &t.selections {
            selections.push(SelectionRow {
                participant: r.participant,
                seed: run.seeds[r.participant],
                method: t.method,
                haptic: t.haptic,
                block: t.block,
                trial: r.trial,
                practice: t.practice,
                width_mm: t.task.width,
                amplitude_mm: t.task.amplitude,
                selection: s.index,
                target_id: s.target_id,
                selected_id: s.selected_id,
                target_center_mm: s.target_center_mm,
                start_mm: s.start_mm,
                endpoint_mm: s.endpoint_mm,
                t_start_s: s.t_start,
                t_select_s: s.t_select,
                movement_time_s: s.movement_time(),
                error: s.error,
                re_entries: s.re_entries,
                missing: t.missing.clone(),
            });
        }
        for e in &t.events {
            events.push(EventRow {
                time_s: e.time,
                method: e.method,
                kind: e.kind.as_str(),
                target_id: e.target_id,
                coordinate_mm: e.coordinate,
                haptic_ms: e.haptic.map(|h| h.duration_ms),
                haptic_intensity: e.haptic.map(|h| h.intensity),
                participant: r.participant,
                haptic_condition: t.haptic,
                block: t.block,
                trial: r.trial,
            });
        }
    }
    out.csv(&format!("{prefix}_selections.csv"), &selections)?;
    out.csv(&format!("{prefix}_events.csv"), &events)?;

    let mut summary = summary_rows("pooled", None, &report.pooled);
    let mut cells = cell_rows("pooled", None, &report.pooled);
    for p in &report.participants {
        summary.extend(summary_rows("participant", Some(p.participant), &p.summaries));
        cells.extend(cell_rows("participant", Some(p.participant), &p.summaries));
    }
    out.csv(&format!("{prefix}_summary.csv"), &summary)?;
    out.csv(&format!("{prefix}_cells.csv"), &cells)?;
    out.csv(&format!("{prefix}_means.csv"), &report.means)?;
    if let Some(s) = &report.offset_sweep {
        out.csv(&format!("{prefix}_offset_sweep.csv"), &s.sweep.rows)?;
    }
    out.json(&format!("{prefix}.json"), cfg, report)?;
    if plot {
        for svg in plots(report, cfg, out.provenance()) {
            out.svg(&format!("{prefix}_{}.svg", svg.0), svg.1)?;
        }
    }
    Ok(())
}

fn plots(report: &StudyReport, cfg: &StudyConfig, prov: &Provenance) -> Vec<(&'static str, String)> {
    let methods = cfg.methods();
    let cats: Vec<String> = methods.iter().map(|m| m.as_str().to_string()).collect();
    let bars = |f: fn(&ConditionMean) -> (f64, f64)| -> Vec<BarSeries> {
        cfg.haptics()
            .iter()
            .map(|&h| {
                let vals: Vec<(f64, f64)> = methods
                    .iter()
                    .map(|&m| {
                        report
                            .means
                            .iter()
                            .find(|c| c.method == m && c.haptic == Some(h))
                            .map_or((f64::NAN, f64::NAN), f)
                    })
                    .collect();
                BarSeries {
                    label: if h { "haptics on".into() } else { "haptics off".into() },
                    values: vals.iter().map(|v| v.0).collect(),
                    errors: Some(vals.iter().map(|v| v.1).collect()),
                }
            })
            .collect()
    };
    let mut out = vec![
        (
            "tp",
            bar_chart(
                "Throughput (mean, SD over participants)",
                "TP (bits/s)",
                &cats,
                &bars(|c| (c.tp, c.tp_sd)),
                prov,
            ),
        ),
        (
            "mt",
            bar_chart("Movement time (mean, SD over participants)", "MT (s)", &cats, &bars(|c| (c.mt, c.mt_sd)), prov),
        ),
        ("er", bar_chart("Error rate (mean, SD over participants)", "ER (%)", &cats, &bars(|c| (c.er, c.er_sd)), prov)),
    ];
    let mut lines = Vec::new();
    for s in &report.pooled {
        let label = format!("{}{}", s.method.as_str(), if s.haptic { " +h" } else { "" });
        let pts: Vec<(f64, f64)> = s.cells.iter().filter(|c| c.tp.is_finite()).map(|c| (c.id_e, c.mt)).collect();
        if let Some(m) = s.model {
            let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
            lines.push(LineSeries {
                label: format!("{label} fit"),
                points: vec![(lo, m.predict(lo)), (hi, m.predict(hi))],
                scatter: false,
            });
        }
        lines.push(LineSeries { label, points: pts, scatter: true });
    }
    out.push(("regression", line_chart("Movement time against effective ID", "ID_e (bits)", "MT (s)", &lines, prov)));
    if let Some(s) = &report.offset_sweep {
        let rows = &s.sweep.rows;
        let series = [
            LineSeries {
                label: "corrected".into(),
                points: rows.iter().map(|r| (r.offset_ms, r.corrected_pct)).collect(),
                scatter: false,
            },
            LineSeries {
                label: "premature".into(),
                points: rows.iter().map(|r| (r.offset_ms, r.premature_pct)).collect(),
                scatter: false,
            },
        ];
        out.push(("offset_sweep", line_chart("Pinch offset correction", "offset (ms)", "% of pinches", &series, prov)));
    }
    out
}

pub fn execute(study: Study, common: &Common) -> Result<StudyReport> {
    let cfg: StudyConfig = load_config(common.config.as_deref())?;
    let cfg = cfg.resolve(study)?;
    let seed = common.seed.unwrap_or(0);
    let run = run(study, &cfg, seed)?;
    let report = analyse(&run, &cfg)?;
    let mut out = OutDir::create(&common.out, Provenance::new(study.command(), seed, &cfg)?)?;
    write(&mut out, &run, &report, &cfg, common.plot)?;
    Ok(report)
}
