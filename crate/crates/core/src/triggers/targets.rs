use alloc::vec::Vec;

use crate::{Error, Result};

/// A one-dimensional selection target, mm of screen.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Target {
    pub id: u32,
    pub center: f64,
    pub width: f64,
}

impl Target {
    pub fn new(id: u32, center: f64, width: f64) -> Self {
        Target { id, center, width }
    }

    pub fn left(&self) -> f64 {
        self.center - 0.5 * self.width
    }

    pub fn right(&self) -> f64 {
        self.center + 0.5 * self.width
    }

    /// Closed interval test.
    pub fn contains(&self, x: f64) -> bool {
        x >= self.left() && x <= self.right()
    }
}

/// Which side of a target a crossing happened on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Left,
    Right,
}

/// One edge crossing along a cursor step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Crossing {
    pub target: Target,
    pub edge: Edge,
    pub entering: bool,
    /// Fraction of the step at which the crossing happens.
    pub frac: f64,
}

/// Non-overlapping targets sorted by position. Touching edges are allowed.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<Target>", into = "Vec<Target>"))]
pub struct TargetSet {
    targets: Vec<Target>,
}

impl TryFrom<Vec<Target>> for TargetSet {
    type Error = Error;

    fn try_from(v: Vec<Target>) -> Result<Self> {
        TargetSet::new(v)
    }
}

impl From<TargetSet> for Vec<Target> {
    fn from(s: TargetSet) -> Self {
        s.targets
    }
}

impl TargetSet {
    pub fn new(mut targets: Vec<Target>) -> Result<Self> {
        for t in &targets {
            if !(t.width.is_finite() && t.width > 0.0 && t.center.is_finite()) {
                return Err(Error::config(alloc::format!("target {}: width must be positive", t.id)));
            }
        }
        targets.sort_by(|a, b| a.center.total_cmp(&b.center));
        for w in targets.windows(2) {
            if w[0].right() > w[1].left() {
                return Err(Error::config(alloc::format!("targets {} and {} overlap", w[0].id, w[1].id)));
            }
        }
        let mut ids: Vec<u32> = targets.iter().map(|t| t.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("duplicate target id"));
        }
        Ok(TargetSet { targets })
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn get(&self, id: u32) -> Option<&Target> {
        self.targets.iter().find(|t| t.id == id)
    }

    /// The target under `x`. On a shared edge the right-hand target wins.
    pub fn at(&self, x: f64) -> Option<&Target> {
        self.targets.iter().rev().find(|t| t.contains(x))
    }

    /// Edge crossings of the step `x0 → x1`, in path order.
    pub(crate) fn crossings(&self, x0: f64, x1: f64) -> Vec<Crossing> {
        let mut out = Vec::new();
        if x0 == x1 {
            return out;
        }
        let span = x1 - x0;
        for &t in &self.targets {
            let (l, r) = (t.left(), t.right());
            if x1 > x0 {
                if x0 < l && l <= x1 {
                    out.push(Crossing { target: t, edge: Edge::Left, entering: true, frac: (l - x0) / span });
                }
                if x0 <= r && r < x1 {
                    out.push(Crossing { target: t, edge: Edge::Right, entering: false, frac: (r - x0) / span });
                }
            } else {
                if x1 <= r && r < x0 {
                    out.push(Crossing { target: t, edge: Edge::Right, entering: true, frac: (r - x0) / span });
                }
                if x1 < l && l <= x0 {
                    out.push(Crossing { target: t, edge: Edge::Left, entering: false, frac: (l - x0) / span });
                }
            }
        }
        // exits before entries at a shared edge
        out.sort_by(|a, b| a.frac.total_cmp(&b.frac).then(a.entering.cmp(&b.entering)));
        out
    }
}
