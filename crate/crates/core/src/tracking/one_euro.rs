use core::f64::consts::PI;

use crate::{Error, Result};

/// Parameters of the speed-adaptive low-pass filter.
///
/// The cutoff rises with the smoothed speed, `min_cutoff + beta·|ẋ|`, so a
/// stationary cursor is heavily smoothed while fast motion is followed with
/// little lag.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct OneEuroConfig {
    /// Hz.
    pub min_cutoff: f64,
    /// Hz per mm/s.
    pub beta: f64,
    /// Cutoff of the derivative filter, Hz.
    pub d_cutoff: f64,
}

impl Default for OneEuroConfig {
    fn default() -> Self {
        OneEuroConfig { min_cutoff: 1.0, beta: 0.01, d_cutoff: 1.0 }
    }
}

impl OneEuroConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_cutoff > 0.0 && self.d_cutoff > 0.0 && self.beta >= 0.0) {
            return Err(Error::config("one-euro filter needs min_cutoff > 0, d_cutoff > 0, beta >= 0"));
        }
        Ok(())
    }
}

fn alpha(cutoff: f64, dt: f64) -> f64 {
    let tau = 1.0 / (2.0 * PI * cutoff);
    1.0 / (1.0 + tau / dt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Prev {
    x: f64,
    dx: f64,
    t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneEuroState {
    config: OneEuroConfig,
    prev: Option<Prev>,
}

impl OneEuroState {
    pub fn new(config: OneEuroConfig) -> Result<Self> {
        config.validate()?;
        Ok(OneEuroState { config, prev: None })
    }

    /// Smoothed derivative from the last update, units of x per second.
    pub fn velocity(&self) -> f64 {
        self.prev.map_or(0.0, |p| p.dx)
    }

    /// Filters sample `x` taken at time `t`. Times must strictly increase.
    pub fn filter(&mut self, x: f64, t: f64) -> Result<f64> {
        let Some(p) = self.prev else {
            self.prev = Some(Prev { x, dx: 0.0, t });
            return Ok(x);
        };
        let dt = t - p.t;
        if dt.is_nan() || dt <= 0.0 {
            return Err(Error::contract(alloc::format!("one-euro timestamps must increase ({} after {})", t, p.t)));
        }
        let raw_dx = (x - p.x) / dt;
        let a_d = alpha(self.config.d_cutoff, dt);
        let dx = p.dx + a_d * (raw_dx - p.dx);
        let cutoff = self.config.min_cutoff + self.config.beta * dx.abs();
        let a = alpha(cutoff, dt);
        let x_hat = p.x + a * (x - p.x);
        self.prev = Some(Prev { x: x_hat, dx, t });
        Ok(x_hat)
    }
}
