use alloc::vec::Vec;

use super::pinch::pinch_outcome;
use super::targets::TargetSet;
use super::EventKind;
use crate::{Error, Result};

/// Offsets evaluated by the correction sweep, ms.
pub const OFFSETS_MS: [f64; 6] = [0.0, 40.0, 80.0, 120.0, 160.0, 200.0];

/// One recorded pinch: the cursor trace leading up to it and the goal.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PinchCase {
    /// `(time, position)`, time-sorted, covering at least the largest offset.
    pub cursor: Vec<(f64, f64)>,
    pub detection_time: f64,
    pub targets: TargetSet,
    pub highlighted: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OffsetRow {
    pub offset_ms: f64,
    /// Baseline errors turned into correct selections, % of baseline errors.
    pub corrected_pct_of_errors: f64,
    /// Same count, % of all pinches.
    pub corrected_pct: f64,
    /// Baseline-correct selections turned into errors, % of all pinches.
    pub premature_pct: f64,
    /// `corrected_pct - premature_pct`.
    pub net_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OffsetSweep {
    pub cases: usize,
    /// Error rate with no offset, %.
    pub baseline_error_pct: f64,
    pub rows: Vec<OffsetRow>,
    /// `(previous, first)` offsets bracketing where premature triggers first
    /// appear and match or outnumber corrections; `None` if they never do.
    pub crossover_ms: Option<(f64, f64)>,
}

/// Re-reads every pinch at each offset and compares against offset 0.
pub fn offset_sweep(cases: &[PinchCase], offsets_ms: &[f64]) -> Result<OffsetSweep> {
    if cases.is_empty() {
        return Err(Error::config("offset sweep needs at least one pinch"));
    }
    if offsets_ms.iter().any(|o| !(o.is_finite() && *o >= 0.0)) {
        return Err(Error::config("offsets must be non-negative"));
    }
    let classify = |c: &PinchCase, off_ms: f64| -> Result<bool> {
        let (kind, _, _) =
            pinch_outcome(&c.cursor, &c.targets, Some(c.highlighted), c.detection_time, off_ms / 1000.0)?;
        Ok(kind == EventKind::Select)
    };
    let base: Vec<bool> = cases.iter().map(|c| classify(c, 0.0)).collect::<Result<_>>()?;
    let n = cases.len() as f64;
    let n_err = base.iter().filter(|ok| !**ok).count();
    let mut rows = Vec::with_capacity(offsets_ms.len());
    for &off in offsets_ms {
        let (mut corrected, mut premature) = (0usize, 0usize);
        for (c, &ok0) in cases.iter().zip(&base) {
            let ok = classify(c, off)?;
            match (ok0, ok) {
                (false, true) => corrected += 1,
                (true, false) => premature += 1,
                _ => {}
            }
        }
        let corrected_pct = 100.0 * corrected as f64 / n;
        let premature_pct = 100.0 * premature as f64 / n;
        rows.push(OffsetRow {
            offset_ms: off,
            corrected_pct_of_errors: if n_err == 0 { 0.0 } else { 100.0 * corrected as f64 / n_err as f64 },
            corrected_pct,
            premature_pct,
            net_pct: corrected_pct - premature_pct,
        });
    }
    let mut crossover_ms = None;
    for (i, r) in rows.iter().enumerate() {
        if r.premature_pct > 0.0 && r.premature_pct >= r.corrected_pct {
            let prev = if i == 0 { r.offset_ms } else { rows[i - 1].offset_ms };
            crossover_ms = Some((prev, r.offset_ms));
            break;
        }
    }
    Ok(OffsetSweep { cases: cases.len(), baseline_error_pct: 100.0 * n_err as f64 / n, rows, crossover_ms })
}
