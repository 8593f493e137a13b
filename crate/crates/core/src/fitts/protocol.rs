use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::mix_seed;
use crate::triggers::{Target, TargetSet};
use crate::{Error, Result};

/// Width of the watch display the targets are laid out on, mm.
pub const DISPLAY_MM: f64 = 37.3;

/// Target widths of the serial binary study, mm.
pub const STUDY1_WIDTHS: [f64; 3] = [3.0, 6.0, 9.0];
/// Target spacings of the serial binary study, mm.
pub const STUDY1_AMPLITUDES: [f64; 2] = [12.0, 15.0];

pub const STUDY1_BLOCKS: usize = 4;
pub const STUDY1_REPS: usize = 2;
pub const STUDY1_SELECTIONS: usize = 6;

pub const STUDY2_WIDTH: f64 = 6.0;
pub const STUDY2_AMPLITUDE: f64 = 12.0;
pub const STUDY2_BLOCKS: usize = 5;
pub const STUDY2_TRIALS_PER_BLOCK: usize = 6;
pub const STUDY2_SELECTIONS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TaskKind {
    /// Two targets, selected alternately.
    SerialBinary,
    /// A row of three targets, four selections with a constrained sequence.
    MultiThree,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::SerialBinary => "serial_binary",
            TaskKind::MultiThree => "multi_three",
        }
    }
}

/// One trial's layout and the order in which its targets are highlighted.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaskSpec {
    pub kind: TaskKind,
    /// Target width, mm.
    pub width: f64,
    /// Centre-to-centre spacing of neighbouring targets, mm.
    pub amplitude: f64,
    /// Goal target id for each selection.
    pub goals: Vec<u32>,
    /// Cursor position when the trial starts, mm from the display's left edge.
    pub start_mm: f64,
}

impl TaskSpec {
    pub fn serial_binary(width: f64, amplitude: f64, first_goal: u32) -> Self {
        let goals = (0..STUDY1_SELECTIONS as u32).map(|i| (first_goal + i) % 2).collect();
        TaskSpec { kind: TaskKind::SerialBinary, width, amplitude, goals, start_mm: DISPLAY_MM / 2.0 }
    }

    pub fn multi_three(goals: Vec<u32>) -> Self {
        TaskSpec { kind: TaskKind::MultiThree, width: STUDY2_WIDTH, amplitude: STUDY2_AMPLITUDE, goals, start_mm: 0.0 }
    }

    pub fn selections(&self) -> usize {
        self.goals.len()
    }

    /// Targets centred on the display, ids increasing left to right.
    pub fn targets(&self) -> Result<TargetSet> {
        let c = DISPLAY_MM / 2.0;
        let centers: Vec<f64> = match self.kind {
            TaskKind::SerialBinary => vec![c - self.amplitude / 2.0, c + self.amplitude / 2.0],
            TaskKind::MultiThree => vec![c - self.amplitude, c, c + self.amplitude],
        };
        TargetSet::new(centers.into_iter().enumerate().map(|(i, x)| Target::new(i as u32, x, self.width)).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0 && self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(Error::config("task width and amplitude must be positive"));
        }
        let targets = self.targets()?;
        let t = targets.targets();
        if t.first().unwrap().left() < 0.0 || t.last().unwrap().right() > DISPLAY_MM {
            return Err(Error::config("targets do not fit the display"));
        }
        if !(0.0..=DISPLAY_MM).contains(&self.start_mm) {
            return Err(Error::config("start position is off the display"));
        }
        if self.goals.is_empty() || self.goals.iter().any(|g| targets.get(*g).is_none()) {
            return Err(Error::config("goals must name targets of the layout"));
        }
        Ok(())
    }
}

/// A trial as scheduled within a session.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtocolTrial {
    pub block: usize,
    /// Position within the block.
    pub index: usize,
    /// Practice trials are run but left out of the analysis.
    pub practice: bool,
    pub haptic: bool,
    pub task: TaskSpec,
    pub seed: u64,
}

/// Twelve serial binary trials: every (W, A) pair twice, shuffled.
pub fn make_study1_block(seed: u64, block: usize) -> Vec<ProtocolTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x5701 + block as u64));
    let mut combos = Vec::with_capacity(12);
    for _ in 0..STUDY1_REPS {
        for &w in &STUDY1_WIDTHS {
            for &a in &STUDY1_AMPLITUDES {
                combos.push((w, a));
            }
        }
    }
    combos.shuffle(&mut rng);
    combos
        .into_iter()
        .enumerate()
        .map(|(index, (w, a))| {
            let first = rng.random_range(0..2u32);
            ProtocolTrial {
                block,
                index,
                practice: block == 0,
                haptic: false,
                task: TaskSpec::serial_binary(w, a, first),
                seed: mix_seed(seed, ((block as u64) << 16) | index as u64),
            }
        })
        .collect()
}

/// Four blocks for one method; the first is practice.
pub fn make_study1_session(seed: u64) -> Vec<ProtocolTrial> {
    (0..STUDY1_BLOCKS).flat_map(|b| make_study1_block(seed, b)).collect()
}

// 0 = repeat, 1 = adjacent, 2 = non-adjacent
fn step_kind(a: u32, b: u32) -> u32 {
    a.abs_diff(b)
}

/// Every valid four-selection sequence starting at `first`: the three
/// transitions are one repeat, one move to an adjacent target and one move
/// to the non-adjacent target, in any order the layout allows.
pub fn enumerate_study2_sequences(first: u32) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    for b in 0..3 {
        for c in 0..3 {
            for d in 0..3 {
                let seq = [first, b, c, d];
                let mut kinds: Vec<u32> = seq.windows(2).map(|w| step_kind(w[0], w[1])).collect();
                kinds.sort_unstable();
                if kinds == [0, 1, 2] {
                    out.push(seq);
                }
            }
        }
    }
    out
}

/// A random first target and a uniformly drawn valid continuation.
pub fn make_study2_trial(seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x5702));
    let first = rng.random_range(0..3u32);
    let all = enumerate_study2_sequences(first);
    all[rng.random_range(0..all.len())].to_vec()
}

/// Five blocks of six trials under each haptic condition, haptics-off first.
pub fn make_study2_session(seed: u64) -> Vec<ProtocolTrial> {
    let mut out = Vec::new();
    for (h, haptic) in [false, true].into_iter().enumerate() {
        for block in 0..STUDY2_BLOCKS {
            for index in 0..STUDY2_TRIALS_PER_BLOCK {
                let trial_seed = mix_seed(seed, ((h as u64) << 32) | ((block as u64) << 16) | index as u64);
                out.push(ProtocolTrial {
                    block,
                    index,
                    practice: false,
                    haptic,
                    task: TaskSpec::multi_three(make_study2_trial(trial_seed)),
                    seed: trial_seed,
                });
            }
        }
    }
    out
}
