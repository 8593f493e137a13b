#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::math::{mean, sample_sd};
use crate::triggers::Method;
use crate::{Error, Result};

/// Effective width is the endpoint spread times this factor (±2.066 SD,
/// 96% of a normal distribution).
pub const WE_FACTOR: f64 = 4.133;

/// Lower bound on the effective width, mm. Identical endpoints would
/// otherwise give an infinite index of difficulty.
pub const WE_FLOOR_MM: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EffectiveId {
    /// bits.
    pub id_e: f64,
    /// Mean actual movement amplitude, mm.
    pub a_e: f64,
    /// Effective width, mm.
    pub w_e: f64,
    /// True when `w_e` was raised to [`WE_FLOOR_MM`].
    pub floored: bool,
}

/// `ID_e = log2(A_e / W_e + 1)` from actual amplitudes and signed endpoint
/// deviations from the target centre along the movement direction.
pub fn effective_id(amplitudes: &[f64], deviations: &[f64]) -> Result<EffectiveId> {
    if amplitudes.len() < 2 || amplitudes.len() != deviations.len() {
        return Err(Error::contract("effective ID needs >= 2 selections with matching deviations"));
    }
    if amplitudes.iter().chain(deviations).any(|v| !v.is_finite()) {
        return Err(Error::contract("non-finite selection endpoint"));
    }
    let a_e = mean(amplitudes);
    let raw = WE_FACTOR * sample_sd(deviations);
    let floored = raw < WE_FLOOR_MM;
    let w_e = raw.max(WE_FLOOR_MM);
    Ok(EffectiveId { id_e: (a_e.abs() / w_e + 1.0).log2(), a_e, w_e, floored })
}

/// `MT = a + b·ID`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FittsModel {
    /// Intercept, s.
    pub a: f64,
    /// Slope, s/bit.
    pub b: f64,
    pub r2: f64,
}

impl FittsModel {
    pub fn predict(&self, id: f64) -> f64 {
        self.a + self.b * id
    }
}

/// Reference models for the serial binary study.
pub const REFERENCE_MODELS: [(Method, FittsModel); 3] = [
    (Method::DoubleCrossing, FittsModel { a: 0.065, b: 0.475, r2: 0.98 }),
    (Method::Dwell, FittsModel { a: 0.47, b: 0.461, r2: 0.94 }),
    (Method::Pinch, FittsModel { a: 0.021, b: 1.234, r2: 0.90 }),
];

pub fn reference_model(method: Method) -> FittsModel {
    REFERENCE_MODELS.iter().find(|(m, _)| *m == method).map(|(_, f)| *f).unwrap()
}

/// Ordinary least squares of MT on ID over `(id, mt)` points.
///
/// `None` with fewer than three points or when all IDs coincide.
pub fn fit_fitts(points: &[(f64, f64)]) -> Option<FittsModel> {
    if points.len() < 3 || points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 1e-12 * (1.0 + mx * mx) {
        return None;
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - a - b * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Some(FittsModel { a, b, r2 })
}
