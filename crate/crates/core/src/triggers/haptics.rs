use alloc::vec::Vec;

use super::{EventKind, Haptic, TriggerEvent};

/// Short half-intensity pulse when the cursor activates a target.
pub const ENTER_PULSE: Haptic = Haptic { duration_ms: 10.0, intensity: 0.5 };

/// Long full-intensity pulse on a selection.
pub const SELECT_PULSE: Haptic = Haptic { duration_ms: 20.0, intensity: 1.0 };

/// Inserts a `HapticPulse` after every enter and every selection.
///
/// Erroneous selections get the selection pulse as well: the wearer cannot
/// tell them apart at the moment of triggering. Pulses are log events only.
pub fn apply_haptics(events: &[TriggerEvent], enabled: bool) -> Vec<TriggerEvent> {
    let mut out = Vec::with_capacity(events.len() * 2);
    for e in events {
        if e.kind == EventKind::HapticPulse {
            continue;
        }
        out.push(*e);
        if !enabled {
            continue;
        }
        let pulse = match e.kind {
            EventKind::Enter => Some(ENTER_PULSE),
            k if k.is_selection() => Some(SELECT_PULSE),
            _ => None,
        };
        if let Some(p) = pulse {
            let mut h = TriggerEvent::new(EventKind::HapticPulse, e.method, e.target_id, e.coordinate, e.time);
            h.haptic = Some(p);
            out.push(h);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triggers::Method;
    use alloc::vec;

    fn ev(kind: EventKind) -> TriggerEvent {
        TriggerEvent::new(kind, Method::Dwell, Some(1), 0.0, 0.0)
    }

    fn pulses(ev: &[TriggerEvent]) -> Vec<(f64, f64)> {
        ev.iter().filter_map(|e| e.haptic.map(|h| (h.duration_ms, h.intensity))).collect()
    }

    #[test]
    fn enter_then_select() {
        let out = apply_haptics(&[ev(EventKind::Enter), ev(EventKind::Select)], true);
        assert_eq!(pulses(&out), vec![(10.0, 0.5), (20.0, 1.0)]);
    }

    #[test]
    fn one_pulse_per_enter() {
        use EventKind::*;
        let out = apply_haptics(&[ev(Enter), ev(Exit), ev(Enter), ev(Select)], true);
        assert_eq!(pulses(&out).len(), 3);
    }

    #[test]
    fn disabled_emits_nothing() {
        use EventKind::*;
        let out = apply_haptics(&[ev(Enter), ev(Exit), ev(Enter), ev(Select)], false);
        assert!(out.iter().all(|e| e.kind != HapticPulse && e.haptic.is_none()));
        assert_eq!(out.len(), 4);
    }
}
