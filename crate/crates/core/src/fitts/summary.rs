use alloc::vec::Vec;

use super::agent::{SelectionRecord, TrialRecord};
use super::metrics::{effective_id, fit_fitts, FittsModel};
use crate::math::mean;
use crate::triggers::Method;
use crate::{Error, Result};

/// Aggregates for one (W, A) condition.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellSummary {
    pub width: f64,
    pub amplitude: f64,
    /// Selections counted towards MT and ID_e.
    pub n: usize,
    pub id_e: f64,
    pub a_e: f64,
    pub w_e: f64,
    pub floored: bool,
    /// s.
    pub mt: f64,
    /// bits/s.
    pub tp: f64,
    /// %.
    pub er: f64,
    /// Re-entries per trial.
    pub tre: f64,
}

/// Descriptive statistics for one method and haptic condition.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FittsSummary {
    pub method: Method,
    pub haptic: bool,
    pub trials: usize,
    /// Trials lost to pipeline failures or timeouts.
    pub missing: usize,
    pub selections: usize,
    /// Mean over cells of ID_e / MT, bits/s.
    pub tp: f64,
    /// `1/b` of the regression, bits/s.
    pub tp_inverse_slope: Option<f64>,
    /// s.
    pub mt: f64,
    /// %.
    pub er: f64,
    /// Re-entries per trial.
    pub tre: f64,
    /// MT on ID_e over the cells.
    pub model: Option<FittsModel>,
    pub cells: Vec<CellSummary>,
    /// Index into `cells` of the highest-TP cell whose ER does not exceed
    /// the overall ER.
    pub best_cell: Option<usize>,
}

/// Whether a selection's timing says anything about aiming. The first
/// selection of a trial starts from a fixation point rather than a target.
fn timed(s: &SelectionRecord) -> bool {
    !s.error && s.index > 0
}

fn cell(width: f64, amplitude: f64, trials: &[&TrialRecord]) -> Option<CellSummary> {
    let sels: Vec<&SelectionRecord> = trials.iter().flat_map(|t| &t.selections).collect();
    if sels.is_empty() {
        return None;
    }
    let ok: Vec<&SelectionRecord> = sels.iter().copied().filter(|s| timed(s)).collect();
    let er = 100.0 * sels.iter().filter(|s| s.error).count() as f64 / sels.len() as f64;
    let tre =
        mean(&trials.iter().map(|t| t.selections.iter().map(|s| s.re_entries).sum::<u32>() as f64).collect::<Vec<_>>());
    let amps: Vec<f64> = ok.iter().map(|s| s.amplitude()).collect();
    let devs: Vec<f64> = ok.iter().map(|s| s.deviation()).collect();
    let mts: Vec<f64> = ok.iter().map(|s| s.movement_time()).collect();
    let (id_e, a_e, w_e, floored, mt, tp) = match effective_id(&amps, &devs) {
        Ok(e) => {
            let mt = mean(&mts);
            (e.id_e, e.a_e, e.w_e, e.floored, mt, e.id_e / mt)
        }
        Err(_) => (f64::NAN, f64::NAN, f64::NAN, false, if mts.is_empty() { f64::NAN } else { mean(&mts) }, f64::NAN),
    };
    Some(CellSummary { width, amplitude, n: ok.len(), id_e, a_e, w_e, floored, mt, tp, er, tre })
}

fn summarize_group(method: Method, haptic: bool, records: &[&TrialRecord]) -> FittsSummary {
    let complete: Vec<&TrialRecord> = records.iter().copied().filter(|r| r.missing.is_none()).collect();
    let mut conditions: Vec<(f64, f64)> = Vec::new();
    for r in &complete {
        let key = (r.task.width, r.task.amplitude);
        if !conditions.contains(&key) {
            conditions.push(key);
        }
    }
    conditions.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cells: Vec<CellSummary> = conditions
        .iter()
        .filter_map(|&(w, a)| {
            let ts: Vec<&TrialRecord> =
                complete.iter().copied().filter(|r| r.task.width == w && r.task.amplitude == a).collect();
            cell(w, a, &ts)
        })
        .collect();

    let sels: Vec<&SelectionRecord> = complete.iter().flat_map(|t| &t.selections).collect();
    let er = if sels.is_empty() {
        f64::NAN
    } else {
        100.0 * sels.iter().filter(|s| s.error).count() as f64 / sels.len() as f64
    };
    let mts: Vec<f64> = sels.iter().filter(|s| timed(s)).map(|s| s.movement_time()).collect();
    let mt = if mts.is_empty() { f64::NAN } else { mean(&mts) };
    let tre = if complete.is_empty() {
        f64::NAN
    } else {
        sels.iter().map(|s| s.re_entries as f64).sum::<f64>() / complete.len() as f64
    };
    let tps: Vec<f64> = cells.iter().map(|c| c.tp).filter(|v| v.is_finite()).collect();
    let tp = if tps.is_empty() { f64::NAN } else { mean(&tps) };
    let points: Vec<(f64, f64)> = cells.iter().filter(|c| c.tp.is_finite()).map(|c| (c.id_e, c.mt)).collect();
    let model = fit_fitts(&points);
    let tp_inverse_slope = model.filter(|m| m.b > 0.0).map(|m| 1.0 / m.b);
    let best_cell = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.tp.is_finite() && c.er <= er + 1e-9)
        .max_by(|a, b| a.1.tp.partial_cmp(&b.1.tp).unwrap())
        .map(|(i, _)| i);
    FittsSummary {
        method,
        haptic,
        trials: records.len(),
        missing: records.len() - complete.len(),
        selections: sels.len(),
        tp,
        tp_inverse_slope,
        mt,
        er,
        tre,
        model,
        cells,
        best_cell,
    }
}

/// One summary per method and haptic condition present, in method order
/// with haptics off first. Practice trials are skipped.
pub fn summarize(records: &[TrialRecord]) -> Result<Vec<FittsSummary>> {
    let scored: Vec<&TrialRecord> = records.iter().filter(|r| !r.practice).collect();
    if scored.is_empty() {
        return Err(Error::config("nothing to summarise"));
    }
    let mut out = Vec::new();
    for method in Method::ALL {
        for haptic in [false, true] {
            let group: Vec<&TrialRecord> =
                scored.iter().copied().filter(|r| r.method == method && r.haptic == haptic).collect();
            if !group.is_empty() {
                out.push(summarize_group(method, haptic, &group));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitts::protocol::TaskSpec;
    use alloc::vec;

    fn sel(index: usize, start: f64, center: f64, end: f64, t0: f64, t1: f64, error: bool) -> SelectionRecord {
        SelectionRecord {
            index,
            target_id: 0,
            selected_id: Some(0),
            target_center_mm: center,
            start_mm: start,
            endpoint_mm: end,
            t_start: t0,
            t_select: t1,
            error,
            re_entries: 0,
        }
    }

    fn trial(w: f64, sels: Vec<SelectionRecord>) -> TrialRecord {
        TrialRecord {
            task: TaskSpec::serial_binary(w, 12.0, 0),
            method: Method::Dwell,
            haptic: false,
            practice: false,
            block: 1,
            seed: 0,
            selections: sels,
            events: vec![],
            pinch_cases: vec![],
            missing: None,
        }
    }

    #[test]
    fn empty_cells_are_omitted() {
        let t = trial(
            6.0,
            vec![
                sel(0, 18.65, 12.65, 12.0, 0.0, 1.0, false),
                sel(1, 12.0, 24.65, 25.0, 1.0, 2.0, false),
                sel(2, 25.0, 12.65, 13.0, 2.0, 3.0, true),
                sel(3, 13.0, 24.65, 24.0, 3.0, 4.0, false),
            ],
        );
        let s = summarize(&[t]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].cells.len(), 1);
        assert_eq!(s[0].er, 25.0);
        assert_eq!(s[0].cells[0].n, 2);
        assert!((s[0].mt - 1.0).abs() < 1e-12);
        assert!(s[0].tp > 0.0);
        assert!(summarize(&[]).is_err());
    }
}
