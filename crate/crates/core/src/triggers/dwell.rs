use alloc::vec::Vec;

use super::targets::{Target, TargetSet};
use super::{EventKind, Method, SelectionMachine, TriggerEvent};
use crate::tracking::CursorState;
use crate::{Error, Result};

/// Default residence time, s.
pub const DWELL_S: f64 = 0.5;

// cursor timestamps are sums of float steps
const TIME_EPS: f64 = 1e-9;

/// Frame-sampled presence: which target the latest cursor sample is in.
#[derive(Debug, Clone, Default)]
pub(crate) struct Presence {
    current: Option<(Target, f64)>,
}

impl Presence {
    /// Updates with a cursor sample; emits exit/enter at the sample time.
    pub fn update(&mut self, targets: &TargetSet, t: f64, x: f64, method: Method, out: &mut Vec<TriggerEvent>) {
        let now = targets.at(x).copied();
        let same = match (&self.current, &now) {
            (Some((a, _)), Some(b)) => a.id == b.id,
            (None, None) => true,
            _ => false,
        };
        if same {
            return;
        }
        if let Some((a, _)) = self.current.take() {
            out.push(TriggerEvent::new(EventKind::Exit, method, Some(a.id), x, t));
        }
        if let Some(b) = now {
            out.push(TriggerEvent::new(EventKind::Enter, method, Some(b.id), x, t));
            self.current = Some((b, t));
        }
    }

    /// (target, time of entry).
    pub fn current(&self) -> Option<(Target, f64)> {
        self.current
    }
}

/// Dwell: staying inside one target for `dwell_s` selects it, with the
/// coordinate taken at the end of the dwell.
///
/// Residence is sampled per cursor frame; leaving for a single frame resets
/// the timer. After a selection the cursor has to leave the target before it
/// can be selected again. Dwell has no notion of a wrong selection and never
/// emits `ErrorSelect`.
#[derive(Debug, Clone)]
pub struct Dwell {
    targets: TargetSet,
    dwell_s: f64,
    presence: Presence,
    fired: bool,
    last_t: Option<f64>,
}

impl Dwell {
    pub fn new(targets: TargetSet, dwell_s: f64) -> Result<Self> {
        if !(dwell_s.is_finite() && dwell_s > 0.0) {
            return Err(Error::config("dwell time must be positive"));
        }
        Ok(Dwell { targets, dwell_s, presence: Presence::default(), fired: false, last_t: None })
    }

    fn step(&mut self, t: f64, x: f64) -> Result<Vec<TriggerEvent>> {
        if self.last_t.is_some_and(|p| t < p) {
            return Err(Error::contract("dwell cursor time went backwards"));
        }
        self.last_t = Some(t);
        let mut out = Vec::new();
        let before = self.presence.current().map(|(tg, _)| tg.id);
        self.presence.update(&self.targets, t, x, Method::Dwell, &mut out);
        if self.presence.current().map(|(tg, _)| tg.id) != before {
            self.fired = false;
        }
        if let Some((tg, since)) = self.presence.current() {
            if !self.fired && t - since >= self.dwell_s - TIME_EPS {
                out.push(TriggerEvent::new(EventKind::Select, Method::Dwell, Some(tg.id), x, t));
                self.fired = true;
            }
        }
        Ok(out)
    }
}

impl SelectionMachine for Dwell {
    fn method(&self) -> Method {
        Method::Dwell
    }

    fn targets(&self) -> &TargetSet {
        &self.targets
    }

    fn on_cursor(&mut self, cursor: &CursorState, _highlighted: Option<u32>) -> Result<Vec<TriggerEvent>> {
        self.step(cursor.time, cursor.position)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn dwell() -> Dwell {
        Dwell::new(TargetSet::new(vec![Target::new(1, 10.0, 6.0)]).unwrap(), DWELL_S).unwrap()
    }

    fn run(d: &mut Dwell, samples: &[(f64, f64)]) -> Vec<TriggerEvent> {
        samples.iter().flat_map(|&(t, x)| d.step(t, x).unwrap()).collect()
    }

    #[test]
    fn parked_499_ms_does_not_select() {
        let mut d = dwell();
        let ev = run(&mut d, &[(0.0, 0.0), (0.1, 10.0), (0.599, 10.0), (0.6, 0.0)]);
        assert!(ev.iter().all(|e| e.kind != EventKind::Select));
    }

    #[test]
    fn parked_500_ms_selects_at_500() {
        let mut d = dwell();
        let ev = run(&mut d, &[(0.0, 0.0), (0.1, 10.0), (0.3, 11.0), (0.6, 12.0)]);
        let sel: Vec<_> = ev.iter().filter(|e| e.kind == EventKind::Select).collect();
        assert_eq!(sel.len(), 1);
        assert!((sel[0].time - 0.6).abs() < 1e-12);
        assert_eq!(sel[0].coordinate, 12.0);
    }

    #[test]
    fn leaving_resets_and_reselect_needs_exit() {
        let mut d = dwell();
        let mut path = vec![(0.0, 0.0), (0.1, 10.0), (0.4, 10.0), (0.44, 0.0), (0.48, 10.0)];
        for k in 1..=20 {
            path.push((0.48 + 0.04 * k as f64, 10.0));
        }
        let ev = run(&mut d, &path);
        let sel: Vec<_> = ev.iter().filter(|e| e.kind == EventKind::Select).collect();
        assert_eq!(sel.len(), 1);
        assert!(sel[0].time >= 0.98 - 1e-9);
        assert_eq!(super::super::reentries_per_selection(&ev), vec![1]);
    }

    #[test]
    fn backwards_time_is_contract_error() {
        let mut d = dwell();
        d.step(1.0, 0.0).unwrap();
        assert!(matches!(d.step(0.5, 0.0), Err(Error::Contract(_))));
    }
}
