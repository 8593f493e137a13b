use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EventKind {
    Enter,
    Exit,
    Select,
    Cancel,
    ErrorSelect,
    HapticPulse,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Enter => "enter",
            EventKind::Exit => "exit",
            EventKind::Select => "select",
            EventKind::Cancel => "cancel",
            EventKind::ErrorSelect => "error_select",
            EventKind::HapticPulse => "haptic_pulse",
        }
    }

    /// Select or error_select: the user perceives a selection either way.
    pub fn is_selection(self) -> bool {
        matches!(self, EventKind::Select | EventKind::ErrorSelect)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    DoubleCrossing,
    Dwell,
    Pinch,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::DoubleCrossing, Method::Dwell, Method::Pinch];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::DoubleCrossing => "double_crossing",
            Method::Dwell => "dwell",
            Method::Pinch => "pinch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Haptic {
    pub duration_ms: f64,
    /// In (0, 1].
    pub intensity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TriggerEvent {
    pub kind: EventKind,
    pub method: Method,
    pub target_id: Option<u32>,
    /// Cursor coordinate, mm.
    pub coordinate: f64,
    pub time: f64,
    pub haptic: Option<Haptic>,
}

impl TriggerEvent {
    pub fn new(kind: EventKind, method: Method, target_id: Option<u32>, coordinate: f64, time: f64) -> Self {
        TriggerEvent { kind, method, target_id, coordinate, time, haptic: None }
    }
}

/// Counts target re-entries in an event stream.
///
/// A re-entry is an entry into a target that the cursor previously left
/// without resolving it, i.e. with no select, error_select or cancel between
/// entering and leaving. Double-crossing resolves every exit, so its count is
/// always zero.
#[derive(Debug, Clone, Default)]
pub struct ReentryCounter {
    // (target, resolved since its last enter)
    inside: Option<(Option<u32>, bool)>,
    unresolved_exits: Vec<u32>,
    count: u32,
}

impl ReentryCounter {
    pub fn push(&mut self, e: &TriggerEvent) {
        match e.kind {
            EventKind::Enter => {
                if let Some(id) = e.target_id {
                    if self.unresolved_exits.contains(&id) {
                        self.count += 1;
                    }
                }
                self.inside = Some((e.target_id, false));
            }
            EventKind::Exit => {
                if let Some((Some(id), false)) = self.inside {
                    if !self.unresolved_exits.contains(&id) {
                        self.unresolved_exits.push(id);
                    }
                }
                self.inside = None;
            }
            EventKind::Cancel | EventKind::Select | EventKind::ErrorSelect => {
                if let Some((_, r)) = self.inside.as_mut() {
                    *r = true;
                }
            }
            EventKind::HapticPulse => {}
        }
    }

    /// Re-entries since the last call; starts a fresh count.
    pub fn take(&mut self) -> u32 {
        self.unresolved_exits.clear();
        core::mem::take(&mut self.count)
    }
}

/// Re-entries preceding each select or error_select in a stream.
pub fn reentries_per_selection(events: &[TriggerEvent]) -> Vec<u32> {
    let mut c = ReentryCounter::default();
    let mut out = Vec::new();
    for e in events {
        c.push(e);
        if e.kind.is_selection() {
            out.push(c.take());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ev(kind: EventKind, id: u32) -> TriggerEvent {
        TriggerEvent::new(kind, Method::Dwell, Some(id), 0.0, 0.0)
    }

    #[test]
    fn counts_unresolved_returns() {
        use EventKind::*;
        let evs = vec![ev(Enter, 1), ev(Exit, 1), ev(Enter, 1), ev(Select, 1), ev(Exit, 1)];
        assert_eq!(reentries_per_selection(&evs), vec![1]);
        let evs = vec![
            ev(Enter, 1),
            ev(Exit, 1),
            ev(Enter, 2),
            ev(Exit, 2),
            ev(Enter, 1),
            ev(Exit, 1),
            ev(Enter, 1),
            ev(Select, 1),
        ];
        assert_eq!(reentries_per_selection(&evs), vec![2]);
    }

    #[test]
    fn resolved_exits_are_not_reentries() {
        use EventKind::*;
        let evs = vec![ev(Enter, 1), ev(Cancel, 1), ev(Exit, 1), ev(Enter, 1), ev(Select, 1), ev(Exit, 1)];
        assert_eq!(reentries_per_selection(&evs), vec![0]);
    }
}
