use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::targets::{Edge, Target, TargetSet};
use super::{EventKind, Method, SelectionMachine, TriggerEvent};
use crate::tracking::CursorState;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    target: Target,
    // None when tracking started inside the target
    entry: Option<Edge>,
    turn: Option<f64>,
    deepest: f64,
}

/// Double-crossing: entering a target through an edge highlights it as the
/// candidate; leaving through the same edge selects it, leaving through the
/// opposite edge cancels.
///
/// The selection coordinate is where the cursor reversed inside the target.
/// Reversals are found at frame granularity as a sign change of the per-frame
/// displacement; the velocity is interpolated linearly between frame
/// midpoints and the coordinate is the position at its zero crossing (the
/// vertex of the parabola through the last three frames).
#[derive(Debug, Clone)]
pub struct DoubleCrossing {
    targets: TargetSet,
    prev: Option<(f64, f64)>,
    prev2: Option<(f64, f64)>,
    last_dir: f64,
    cand: Option<Candidate>,
}

/// Position at the zero crossing of the velocity through three samples.
fn turning_point(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    let (ta, xa) = a;
    let (tb, xb) = b;
    let (tc, xc) = c;
    if tb <= ta || tc <= tb {
        return xb;
    }
    let v1 = (xb - xa) / (tb - ta);
    let v2 = (xc - xb) / (tc - tb);
    if v1 == v2 {
        return xb;
    }
    let m1 = 0.5 * (ta + tb);
    let m2 = 0.5 * (tb + tc);
    let slope = (v2 - v1) / (m2 - m1);
    let t_star = m1 - v1 / slope;
    // integrate the interpolated velocity from tb to t*
    xb + v1 * (t_star - tb) + 0.5 * slope * ((t_star - m1).powi(2) - (tb - m1).powi(2))
}

impl DoubleCrossing {
    pub fn new(targets: TargetSet) -> Self {
        DoubleCrossing { targets, prev: None, prev2: None, last_dir: 0.0, cand: None }
    }

    /// Highlighted candidate, if any.
    pub fn candidate(&self) -> Option<u32> {
        self.cand.map(|c| c.target.id)
    }

    fn step(&mut self, t: f64, x: f64, highlighted: Option<u32>) -> Vec<TriggerEvent> {
        let m = Method::DoubleCrossing;
        let mut out = Vec::new();
        let Some((t0, x0)) = self.prev else {
            if let Some(&target) = self.targets.at(x) {
                self.cand = Some(Candidate { target, entry: None, turn: None, deepest: x });
            }
            self.prev = Some((t, x));
            return out;
        };
        let dx = x - x0;
        let dir = if dx > 0.0 {
            1.0
        } else if dx < 0.0 {
            -1.0
        } else {
            0.0
        };
        if let Some(c) = self.cand.as_mut() {
            if dir != 0.0 && self.last_dir != 0.0 && dir != self.last_dir {
                let before = self.prev2.unwrap_or((t0, x0));
                c.turn = Some(turning_point(before, (t0, x0), (t, x)));
            }
        }
        for cr in self.targets.crossings(x0, x) {
            let tc = t0 + cr.frac * (t - t0);
            let xc = match cr.edge {
                Edge::Left => cr.target.left(),
                Edge::Right => cr.target.right(),
            };
            let id = Some(cr.target.id);
            if cr.entering {
                out.push(TriggerEvent::new(EventKind::Enter, m, id, xc, tc));
                self.cand = Some(Candidate { target: cr.target, entry: Some(cr.edge), turn: None, deepest: xc });
            } else {
                if let Some(c) = self.cand.take() {
                    if c.target.id == cr.target.id {
                        match c.entry {
                            Some(e) if e == cr.edge => {
                                let kind = if highlighted.is_some_and(|h| h != c.target.id) {
                                    EventKind::ErrorSelect
                                } else {
                                    EventKind::Select
                                };
                                let coord = c.turn.unwrap_or(c.deepest);
                                out.push(TriggerEvent::new(kind, m, id, coord, tc));
                            }
                            Some(_) => out.push(TriggerEvent::new(EventKind::Cancel, m, id, xc, tc)),
                            None => {}
                        }
                    }
                }
                out.push(TriggerEvent::new(EventKind::Exit, m, id, xc, tc));
            }
        }
        if let Some(c) = self.cand.as_mut() {
            if c.target.contains(x) {
                let depth = |p: f64| match c.entry {
                    Some(Edge::Left) => p - c.target.left(),
                    Some(Edge::Right) => c.target.right() - p,
                    None => 0.0,
                };
                if depth(x) > depth(c.deepest) {
                    c.deepest = x;
                }
            }
        }
        if dir != 0.0 {
            self.last_dir = dir;
        }
        self.prev2 = Some((t0, x0));
        self.prev = Some((t, x));
        out
    }
}

impl SelectionMachine for DoubleCrossing {
    fn method(&self) -> Method {
        Method::DoubleCrossing
    }

    fn targets(&self) -> &TargetSet {
        &self.targets
    }

    fn on_cursor(&mut self, cursor: &CursorState, highlighted: Option<u32>) -> Result<Vec<TriggerEvent>> {
        Ok(self.step(cursor.time, cursor.position, highlighted))
    }
}
