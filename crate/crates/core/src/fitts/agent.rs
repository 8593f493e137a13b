use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::protocol::{ProtocolTrial, TaskSpec};
use crate::math::{min_jerk, mix_seed};
use crate::simulate::{
    EchoSynth, FingerConfig, ImuSynth, ImuSynthConfig, Reflector, SceneConfig, StageProtocol, Trajectory,
};
use crate::tracking::{CursorState, Tracker, TrackerConfig};
use crate::triggers::{
    apply_haptics, merge_streams, DoubleCrossing, Dwell, EventKind, Input, Method, PinchCase, PinchDetectorConfig,
    PinchTrigger, ReentryCounter, SelectionMachine, Target, TargetSet, TriggerEvent, DWELL_S,
};
use crate::{Error, Result};

/// Synthetic participant. Fitted once so that bypass runs land near the
/// published method ordering, then left alone.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct AgentParams {
    /// Delay between noticing something and starting to move, s.
    pub reaction_time: f64,
    /// Upper bound on finger speed, mm/s.
    pub peak_speed: f64,
    /// Aiming error SD as a fraction of the target width.
    pub endpoint_sd_fraction: f64,
    /// Aiming spread multiplier for a movement that reverses the direction
    /// of the previous one.
    pub reversal_sd_gain: f64,
    /// For double-crossing, how far past the centre the agent aims, as a
    /// fraction of the half-width. It is about to turn around anyway.
    pub crossing_depth: f64,
    /// Mean delay from arriving on a target to starting a pinch, s.
    pub trigger_latency: f64,
    /// SD of that delay, s. Negative draws start the pinch during the approach.
    pub trigger_jitter: f64,
    /// Unintended finger displacement caused by a pinch, mm.
    pub pinch_kick_mean: f64,
    pub pinch_kick_sd: f64,
    /// Time from the start of the pinch motion to the thumb-finger impact, s.
    pub pinch_lead: f64,
    /// Primary movement time `move_intercept + move_slope·log2(D/W + 1)`.
    pub move_intercept: f64,
    pub move_slope: f64,
    /// How far past an edge the finger goes when leaving a target, mm.
    pub exit_margin: f64,
    /// Time after arriving before the agent judges where the cursor is, s.
    pub check_delay: f64,
}

impl Default for AgentParams {
    fn default() -> Self {
        AgentParams {
            reaction_time: 0.25,
            peak_speed: 250.0,
            endpoint_sd_fraction: 0.22,
            reversal_sd_gain: 1.6,
            crossing_depth: 0.2,
            trigger_latency: 0.45,
            trigger_jitter: 0.25,
            pinch_kick_mean: 0.43,
            pinch_kick_sd: 1.04,
            pinch_lead: 0.08,
            move_intercept: 0.15,
            move_slope: 0.15,
            exit_margin: 1.5,
            check_delay: 0.1,
        }
    }
}

impl AgentParams {
    pub fn validate(&self) -> Result<()> {
        let non_neg = [
            self.reaction_time,
            self.endpoint_sd_fraction,
            self.crossing_depth,
            self.reversal_sd_gain,
            self.trigger_latency,
            self.trigger_jitter,
            self.pinch_kick_mean,
            self.pinch_kick_sd,
            self.pinch_lead,
            self.move_intercept,
            self.move_slope,
            self.exit_margin,
            self.check_delay,
        ];
        if non_neg.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::config("agent parameters must be non-negative"));
        }
        if !(self.peak_speed.is_finite() && self.peak_speed > 0.0) {
            return Err(Error::config("agent peak speed must be positive"));
        }
        Ok(())
    }

    /// Duration of a point-to-point movement of `d` mm onto a target of width `w`.
    pub fn movement_time(&self, d: f64, w: f64) -> f64 {
        let fitts = self.move_intercept + self.move_slope * (d / w + 1.0).log2();
        // a minimum-jerk profile peaks at 1.875 times the mean speed
        fitts.max(1.875 * d / self.peak_speed).max(0.08)
    }
}

/// One minimum-jerk finger stroke, mm of cursor travel.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Stroke {
    pub start: f64,
    pub duration: f64,
    pub delta: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub tag: u32,
}

/// Finger displacement as a sum of strokes. Strokes may overlap: a pinch
/// kick is superimposed on whatever the finger is doing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FingerPlan {
    base: f64,
    strokes: Vec<Stroke>,
}

impl FingerPlan {
    pub fn new(strokes: Vec<Stroke>) -> Self {
        FingerPlan { base: 0.0, strokes }
    }

    pub fn push(&mut self, s: Stroke) {
        self.strokes.push(s);
    }

    /// Displacement from the starting point at time `t`, mm.
    pub fn offset_at(&self, t: f64) -> f64 {
        self.base + self.strokes.iter().map(|s| s.delta * min_jerk((t - s.start) / s.duration)).sum::<f64>()
    }

    /// When the last stroke ends.
    pub fn rest_time(&self) -> f64 {
        self.strokes.iter().map(|s| s.start + s.duration).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Drops strokes that have not started by `t`.
    fn cancel_after(&mut self, t: f64) {
        self.strokes.retain(|s| s.start <= t);
    }

    fn cancel_tag(&mut self, tag: u32, t: f64) {
        self.strokes.retain(|s| s.tag != tag || s.start <= t);
    }

    /// Folds finished strokes into the base offset.
    fn settle(&mut self, t: f64) {
        let mut base = self.base;
        self.strokes.retain(|s| {
            if s.start + s.duration <= t {
                base += s.delta;
                false
            } else {
                true
            }
        });
        self.base = base;
    }
}

/// Acoustic chain settings for closed-loop runs.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SonarPipeline {
    pub tracker: TrackerConfig,
    pub static_reflectors: Vec<Reflector>,
    pub finger_gain: f64,
    /// Finger range while the cursor sits at the trial's start position, mm.
    pub finger_start_mm: f64,
    pub noise_snr_db: Option<f64>,
    pub speed_of_sound: Option<f64>,
}

impl Default for SonarPipeline {
    fn default() -> Self {
        let stage = StageProtocol::default();
        SonarPipeline {
            tracker: TrackerConfig::default(),
            static_reflectors: stage.clutter,
            finger_gain: stage.finger_gain,
            finger_start_mm: 40.0,
            noise_snr_db: Some(stage.noise_snr_db),
            speed_of_sound: stage.speed_of_sound,
        }
    }
}

/// Where the cursor comes from.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Pipeline {
    /// The cursor is the finger, sampled once per frame.
    #[default]
    Bypass,
    /// Audio is synthesised and tracked.
    Sonar(SonarPipeline),
}

/// Everything besides the task that a closed-loop run needs.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct AgentSetup {
    pub params: AgentParams,
    pub pipeline: Pipeline,
    pub detector: PinchDetectorConfig,
    pub imu: ImuSynthConfig,
    pub dwell_s: f64,
    pub pinch_offset_s: f64,
    /// Still period before the first target is shown, s.
    pub fixation_s: f64,
    /// A selection taking longer than this marks the trial missing, s.
    pub selection_timeout_s: f64,
}

impl Default for AgentSetup {
    fn default() -> Self {
        AgentSetup {
            params: AgentParams::default(),
            pipeline: Pipeline::Bypass,
            detector: PinchDetectorConfig::default(),
            imu: ImuSynthConfig::default(),
            dwell_s: DWELL_S,
            pinch_offset_s: 0.0,
            fixation_s: 1.0,
            selection_timeout_s: 8.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionRecord {
    /// Position in the trial, from 0.
    pub index: usize,
    /// Highlighted target.
    pub target_id: u32,
    /// Target the trigger acted on, if any.
    pub selected_id: Option<u32>,
    pub target_center_mm: f64,
    /// Where the previous selection ended (or the trial's start position).
    pub start_mm: f64,
    pub endpoint_mm: f64,
    pub t_start: f64,
    pub t_select: f64,
    pub error: bool,
    pub re_entries: u32,
}

impl SelectionRecord {
    /// Unit direction of travel toward the target.
    pub fn direction(&self) -> f64 {
        if self.target_center_mm >= self.start_mm {
            1.0
        } else {
            -1.0
        }
    }

    /// Signed endpoint deviation from the centre along the movement direction.
    pub fn deviation(&self) -> f64 {
        (self.endpoint_mm - self.target_center_mm) * self.direction()
    }

    /// Actual movement amplitude along the direction of travel.
    pub fn amplitude(&self) -> f64 {
        (self.endpoint_mm - self.start_mm) * self.direction()
    }

    pub fn movement_time(&self) -> f64 {
        self.t_select - self.t_start
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialRecord {
    pub task: TaskSpec,
    pub method: Method,
    pub haptic: bool,
    pub practice: bool,
    pub block: usize,
    pub seed: u64,
    pub selections: Vec<SelectionRecord>,
    pub events: Vec<TriggerEvent>,
    /// Every pinch detection, for the offset sweep.
    pub pinch_cases: Vec<PinchCase>,
    /// Why the trial could not be completed, if it could not.
    pub missing: Option<String>,
}

enum Source {
    Bypass,
    Sonar { synth: Box<EchoSynth>, tracker: Box<Tracker>, finger_start: f64 },
}

impl Source {
    fn new(pipeline: &Pipeline, seed: u64) -> Result<Self> {
        match pipeline {
            Pipeline::Bypass => Ok(Source::Bypass),
            Pipeline::Sonar(s) => {
                let scene = SceneConfig {
                    static_reflectors: s.static_reflectors.clone(),
                    finger: Some(FingerConfig {
                        start_range_mm: s.finger_start_mm,
                        gain: s.finger_gain,
                        trajectory: Trajectory::default(),
                    }),
                    noise_snr_db: s.noise_snr_db,
                    walker: None,
                    speed_of_sound: s.speed_of_sound,
                    seed,
                };
                let synth = EchoSynth::new(&scene, &s.tracker.sonar, s.tracker.carrier_phase)?;
                Ok(Source::Sonar {
                    synth: Box::new(synth),
                    tracker: Box::new(Tracker::new(s.tracker)?),
                    finger_start: s.finger_start_mm,
                })
            }
        }
    }

    /// Cursor displacement after the frame ending at `t1`.
    fn next(&mut self, plan: &FingerPlan, t1: f64) -> Result<CursorState> {
        match self {
            Source::Bypass => {
                let x = plan.offset_at(t1);
                Ok(CursorState { position: x, velocity: 0.0, time: t1, quality: 1.0, raw_displacement: x })
            }
            Source::Sonar { synth, tracker, finger_start } => {
                let r0 = *finger_start;
                let path = |t: f64| r0 + plan.offset_at(t);
                let frame = synth.render_frame(Some(&path));
                tracker.track_frame(&frame)
            }
        }
    }
}

fn frame_duration(pipeline: &Pipeline) -> f64 {
    let sonar = match pipeline {
        Pipeline::Bypass => TrackerConfig::default().sonar,
        Pipeline::Sonar(s) => s.tracker.sonar,
    };
    sonar.frame_len as f64 / sonar.sample_rate as f64
}

/// Cursor displacements for an open-loop plan, one per frame.
pub fn track_plan(plan: &FingerPlan, pipeline: &Pipeline, duration: f64, seed: u64) -> Result<Vec<CursorState>> {
    let fd = frame_duration(pipeline);
    let mut src = Source::new(pipeline, mix_seed(seed, 3))?;
    let n = (duration / fd).ceil() as usize;
    (1..=n).map(|k| src.next(plan, k as f64 * fd)).collect()
}

#[derive(Debug, Clone, Copy)]
struct PendingPinch {
    onset: f64,
    impact: f64,
    tag: u32,
}

struct Agent {
    p: AgentParams,
    method: Method,
    dwell_s: f64,
    width: f64,
    seen: f64,
    // sign of the last planned movement, 0 before the first
    heading: f64,
    rng: ChaCha8Rng,
    aim: Normal<f64>,
    plan: FingerPlan,
    next_attempt: Option<f64>,
    check_at: Option<f64>,
    await_until: Option<f64>,
    pinch: Option<PendingPinch>,
    last_impact: f64,
    last_selected: Option<u32>,
    next_tag: u32,
}

impl Agent {
    fn stroke(&mut self, start: f64, from: f64, to: f64, w: f64) -> f64 {
        let d = (to - from).abs();
        if d < 1e-9 {
            return start;
        }
        let duration = self.p.movement_time(d, w);
        self.plan.push(Stroke { start, duration, delta: to - from, tag: 0 });
        self.heading = (to - from).signum();
        start + duration
    }

    fn schedule_pinch(&mut self, earliest: f64, onset: f64) {
        // the IMU model needs bursts more than 0.2 s apart
        let onset = onset.max(earliest).max(self.last_impact + 0.25 - self.p.pinch_lead);
        let sign = if self.rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let z: f64 = Normal::new(0.0, 1.0).unwrap().sample(&mut self.rng);
        let kick = sign * (self.p.pinch_kick_mean + self.p.pinch_kick_sd * z);
        self.next_tag += 1;
        let tag = self.next_tag;
        self.plan.push(Stroke { start: onset, duration: 0.1, delta: kick, tag });
        self.pinch = Some(PendingPinch { onset, impact: onset + self.p.pinch_lead, tag });
    }

    /// Plans the next try from where the cursor was last seen.
    fn attempt(&mut self, ts: f64, goal: &Target) {
        let c = self.seen;
        let half = goal.width / 2.0 + self.p.exit_margin;
        let reversing = self.heading * (goal.center - c) < 0.0;
        let gain = if reversing { self.p.reversal_sd_gain } else { 1.0 };
        let aim = goal.center + gain * self.aim.sample(&mut self.rng);
        let w = self.width;
        match self.method {
            Method::DoubleCrossing => {
                let side = if c < goal.center { -1.0 } else { 1.0 };
                let outside = goal.center + side * half;
                let aim = aim - side * self.p.crossing_depth * goal.width / 2.0;
                let mut t = ts;
                let mut from = c;
                if goal.contains(c) {
                    t = self.stroke(t, c, outside, w);
                    from = outside;
                }
                t = self.stroke(t, from, aim, w);
                self.stroke(t, aim, outside, w);
            }
            Method::Dwell => {
                let mut t = ts;
                let mut from = c;
                if self.last_selected == Some(goal.id) && goal.contains(c) {
                    let side = if c < goal.center { -1.0 } else { 1.0 };
                    let outside = goal.center + side * half;
                    t = self.stroke(t, c, outside, w);
                    from = outside;
                }
                let arrival = self.stroke(t, from, aim, w);
                self.check_at = Some(arrival + self.p.check_delay);
            }
            Method::Pinch => {
                let (arrival, duration) = if goal.contains(c) && self.plan.rest_time() <= ts {
                    (ts, 0.0)
                } else {
                    let end = self.stroke(ts, c, aim, w);
                    (end, end - ts)
                };
                let lat = self.p.trigger_latency
                    + self.p.trigger_jitter * Normal::new(0.0, 1.0).unwrap().sample(&mut self.rng);
                self.schedule_pinch(ts.max(arrival - 0.5 * duration), arrival + lat);
                self.check_at = Some(arrival + self.p.check_delay);
            }
        }
    }

    fn decide(&mut self, now: f64, fd: f64, cursor_x: f64, goal: &Target) {
        self.seen = cursor_x;
        let inside = goal.contains(cursor_x);
        if self.check_at.is_some_and(|t| now >= t) {
            self.check_at = None;
            match self.method {
                Method::Dwell if inside => self.await_until = Some(now + self.dwell_s + 0.3),
                Method::Dwell => self.next_attempt = Some(now + self.p.reaction_time),
                Method::Pinch if !inside => {
                    if let Some(pp) = self.pinch {
                        if pp.onset > now {
                            self.plan.cancel_tag(pp.tag, now);
                            self.pinch = None;
                            self.next_attempt = Some(now + self.p.reaction_time);
                        }
                    }
                }
                _ => {}
            }
        }
        if self.await_until.is_some_and(|t| now >= t) {
            self.await_until = None;
            match self.method {
                Method::Dwell if inside => self.await_until = Some(now + self.dwell_s + 0.3),
                Method::Pinch if inside => {
                    // missed detection: pinch again
                    self.schedule_pinch(now, now + self.p.trigger_latency);
                }
                _ => self.next_attempt = Some(now + self.p.reaction_time),
            }
        }
        if let Some(ta) = self.next_attempt {
            let ts = ta.max(now);
            if ta < now + fd && self.plan.rest_time() <= ts {
                self.next_attempt = None;
                self.attempt(ts, goal);
            }
        }
        let idle = self.next_attempt.is_none()
            && self.check_at.is_none()
            && self.await_until.is_none()
            && self.pinch.is_none();
        if idle && now >= self.plan.rest_time() {
            self.next_attempt = Some(now + self.p.reaction_time);
        }
    }

    fn resolved(&mut self, now: f64, t_event: f64, selected: Option<u32>) {
        self.plan.cancel_after(now);
        if let Some(pp) = self.pinch.take() {
            self.plan.cancel_tag(pp.tag, now);
        }
        self.check_at = None;
        self.await_until = None;
        self.last_selected = selected;
        self.next_attempt = Some(t_event + self.p.reaction_time);
    }
}

/// Outcome of an event for the current goal: `Some((selected, error))`
/// when it ends the selection.
fn resolution(method: Method, e: &TriggerEvent, goal: u32) -> Option<(Option<u32>, bool)> {
    match (method, e.kind) {
        (_, EventKind::Select) => Some((e.target_id, e.target_id != Some(goal))),
        (_, EventKind::ErrorSelect) => Some((e.target_id, true)),
        (Method::DoubleCrossing, EventKind::Cancel) if e.target_id == Some(goal) => Some((None, true)),
        _ => None,
    }
}

fn machine(method: Method, targets: TargetSet, setup: &AgentSetup) -> Result<Box<dyn SelectionMachine>> {
    Ok(match method {
        Method::DoubleCrossing => Box::new(DoubleCrossing::new(targets)),
        Method::Dwell => Box::new(Dwell::new(targets, setup.dwell_s)?),
        Method::Pinch => Box::new(PinchTrigger::new(targets, setup.detector, setup.pinch_offset_s)?),
    })
}

/// Runs one trial with the synthetic participant in the loop.
///
/// Configuration problems are errors; a failure inside the pipeline or a
/// selection that never completes marks the trial missing instead.
pub fn run_agent(task: &TaskSpec, method: Method, haptic: bool, setup: &AgentSetup, seed: u64) -> Result<TrialRecord> {
    task.validate()?;
    setup.params.validate()?;
    setup.imu.validate()?;
    if !(setup.fixation_s.is_finite() && setup.fixation_s >= 0.2) {
        return Err(Error::config("fixation must be at least 0.2 s"));
    }
    if !(setup.selection_timeout_s.is_finite() && setup.selection_timeout_s > 0.0) {
        return Err(Error::config("selection timeout must be positive"));
    }
    let targets = task.targets()?;
    let mut m = machine(method, targets.clone(), setup)?;
    let mut record = TrialRecord {
        task: task.clone(),
        method,
        haptic,
        practice: false,
        block: 0,
        seed,
        selections: Vec::new(),
        events: Vec::new(),
        pinch_cases: Vec::new(),
        missing: None,
    };
    if let Err(e) = drive(task, method, setup, seed, &targets, m.as_mut(), &mut record) {
        match e {
            Error::Config(_) => return Err(e),
            Error::Contract(msg) => record.missing = Some(msg),
        }
    }
    record.events = apply_haptics(&record.events, haptic);
    Ok(record)
}

fn drive(
    task: &TaskSpec,
    method: Method,
    setup: &AgentSetup,
    seed: u64,
    targets: &TargetSet,
    m: &mut dyn SelectionMachine,
    record: &mut TrialRecord,
) -> Result<()> {
    let p = setup.params;
    let fd = frame_duration(&setup.pipeline);
    let mut src = Source::new(&setup.pipeline, mix_seed(seed, 3))?;
    let mut imu = ImuSynth::new(setup.imu, mix_seed(seed, 2))?;
    let sd = (p.endpoint_sd_fraction * task.width).max(1e-12);
    let mut agent = Agent {
        p,
        method,
        dwell_s: setup.dwell_s,
        width: task.width,
        seen: task.start_mm,
        heading: 0.0,
        rng: ChaCha8Rng::seed_from_u64(mix_seed(seed, 1)),
        aim: Normal::new(0.0, sd).map_err(|_| Error::config("invalid endpoint spread"))?,
        plan: FingerPlan::default(),
        next_attempt: Some(setup.fixation_s + p.reaction_time),
        check_at: None,
        await_until: None,
        pinch: None,
        last_impact: f64::NEG_INFINITY,
        last_selected: None,
        next_tag: 0,
    };
    let mut reentries = ReentryCounter::default();
    let mut history: Vec<(f64, f64)> = Vec::new();
    let mut goal_idx = 0usize;
    let mut t_start = setup.fixation_s;
    let mut start_mm = task.start_mm;
    let mut k = 0u64;
    while goal_idx < task.goals.len() {
        let t1 = (k + 1) as f64 * fd;
        let now = t1;
        if let Some(pp) = agent.pinch {
            if pp.impact < t1 {
                imu.schedule_pinch(pp.impact).map_err(|e| Error::contract(e.to_string()))?;
                agent.last_impact = pp.impact;
                agent.pinch = None;
                agent.await_until = Some(pp.impact + 0.4);
            }
        }
        let mut cursor = src.next(&agent.plan, t1)?;
        cursor.position += task.start_mm;
        history.push((cursor.time, cursor.position));
        let samples = imu.samples_until(t1);
        let goal = task.goals[goal_idx];
        let cursors = [cursor];
        let mut resolved_now = None;
        for input in merge_streams(&cursors, &samples) {
            let ev = match input {
                Input::Cursor(c) => m.on_cursor(c, Some(goal))?,
                Input::Imu(s) => m.on_imu(s, Some(goal))?,
            };
            for e in ev {
                reentries.push(&e);
                record.events.push(e);
                if resolved_now.is_some() {
                    continue;
                }
                if let Some((selected, error)) = resolution(method, &e, goal) {
                    let center = targets.get(goal).map_or(f64::NAN, |t| t.center);
                    record.selections.push(SelectionRecord {
                        index: goal_idx,
                        target_id: goal,
                        selected_id: selected,
                        target_center_mm: center,
                        start_mm,
                        endpoint_mm: e.coordinate,
                        t_start,
                        t_select: e.time,
                        error,
                        re_entries: reentries.take(),
                    });
                    if method == Method::Pinch {
                        let from = e.time - 0.6;
                        let i = history.partition_point(|&(t, _)| t < from).saturating_sub(1);
                        record.pinch_cases.push(PinchCase {
                            cursor: history[i..].to_vec(),
                            detection_time: e.time,
                            targets: targets.clone(),
                            highlighted: goal,
                        });
                    }
                    resolved_now = Some((e.time, selected));
                }
            }
        }
        if let Some((te, selected)) = resolved_now {
            agent.resolved(now, te, selected);
            t_start = te;
            start_mm = record.selections.last().unwrap().endpoint_mm;
            goal_idx += 1;
            if goal_idx == task.goals.len() {
                break;
            }
        }
        if now - t_start > setup.selection_timeout_s {
            return Err(Error::contract("selection timed out"));
        }
        let goal_target = *targets.get(task.goals[goal_idx]).unwrap();
        agent.decide(now, fd, cursor.position, &goal_target);
        agent.plan.settle(now - 0.5);
        k += 1;
    }
    Ok(())
}

/// Runs a scheduled protocol trial and tags the record with its place.
pub fn run_protocol_trial(trial: &ProtocolTrial, method: Method, setup: &AgentSetup) -> Result<TrialRecord> {
    let mut r = run_agent(&trial.task, method, trial.haptic, setup, trial.seed)?;
    r.practice = trial.practice;
    r.block = trial.block;
    Ok(r)
}
