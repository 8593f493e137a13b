use alloc::collections::VecDeque;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::LevdSample;
use crate::math::wrap_phase;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    baseband: Complex64,
    phase: f64,
}

/// Cumulative phase of the dynamic vector and the displacement it implies.
///
/// A reflector moving `d` mm away lengthens the round trip by `2d`, which
/// rotates the baseband by `−4π·d/λ`; hence `displacement = −φ·λ/(4π)`.
///
/// Samples whose dynamic vector is weaker than the gate hold the previous
/// phase. Whenever the static estimate changes, the whole recent history
/// (a sliding window of `capacity` samples) is unwrapped again against the
/// new estimate, starting from the phase of its oldest sample. Phase
/// accumulated against a stale static vector, as happens before the first
/// refresh, is therefore corrected, and estimate errors do not pile up
/// from one refresh to the next.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrack {
    wavelength_mm: f64,
    gate: f64,
    unwrapped_phase: f64,
    last_wrapped: Option<f64>,
    history: VecDeque<Entry>,
    capacity: usize,
}

impl PhaseTrack {
    /// `capacity` bounds the re-unwrap window in baseband samples.
    pub fn new(wavelength_mm: f64, gate: f64, capacity: usize) -> Self {
        PhaseTrack {
            wavelength_mm,
            gate,
            unwrapped_phase: 0.0,
            last_wrapped: None,
            history: VecDeque::with_capacity(capacity.max(2)),
            capacity: capacity.max(2),
        }
    }

    pub fn unwrapped_phase(&self) -> f64 {
        self.unwrapped_phase
    }

    pub fn last_wrapped(&self) -> Option<f64> {
        self.last_wrapped
    }

    /// Round-trip path length change, mm.
    pub fn path_change(&self) -> f64 {
        -self.unwrapped_phase * self.wavelength_mm / (2.0 * PI)
    }

    /// Reflector displacement, mm (half the path change).
    pub fn displacement(&self) -> f64 {
        -self.unwrapped_phase * self.wavelength_mm / (4.0 * PI)
    }

    fn step(&mut self, d: Complex64) {
        if d.norm() < self.gate {
            return;
        }
        let w = d.arg();
        if let Some(lw) = self.last_wrapped {
            self.unwrapped_phase += wrap_phase(w - lw);
        }
        self.last_wrapped = Some(w);
    }

    fn reunwrap(&mut self, static_estimate: Complex64) {
        let Some(anchor) = self.history.front().copied() else {
            return;
        };
        self.unwrapped_phase = anchor.phase;
        self.last_wrapped = None;
        self.step(anchor.baseband - static_estimate);
        for i in 1..self.history.len() {
            let b = self.history[i].baseband;
            self.step(b - static_estimate);
            self.history[i].phase = self.unwrapped_phase;
        }
    }

    /// Unwraps a run of annotated samples and updates the displacement.
    pub fn update(&mut self, samples: &[LevdSample]) {
        for s in samples {
            self.step(s.dynamic());
            self.history.push_back(Entry { baseband: s.baseband, phase: self.unwrapped_phase });
            if s.refreshed != 0 {
                self.reunwrap(s.static_estimate);
            }
            if self.history.len() > self.capacity {
                self.history.pop_front();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    const LAMBDA: f64 = 17.15;

    fn spin(total: f64, steps: usize, amp: f64) -> Vec<LevdSample> {
        (0..=steps)
            .map(|k| {
                let th = total * k as f64 / steps as f64;
                LevdSample {
                    time: k as f64 / 500.0,
                    baseband: Complex64::from_polar(amp, th),
                    static_estimate: Complex64::new(0.0, 0.0),
                    refreshed: 0,
                }
            })
            .collect()
    }

    #[test]
    fn minus_four_pi_is_one_wavelength_of_displacement() {
        let mut p = PhaseTrack::new(LAMBDA, 0.0125, 1000);
        p.update(&spin(-4.0 * PI, 400, 0.1));
        assert!((p.unwrapped_phase() + 4.0 * PI).abs() < 1e-9);
        assert!((p.displacement() - LAMBDA).abs() < 1e-9);
        assert!((p.path_change() - 2.0 * LAMBDA).abs() < 1e-9);
    }

    #[test]
    fn minus_two_pi_is_half_wavelength() {
        let mut p = PhaseTrack::new(LAMBDA, 0.0125, 1000);
        p.update(&spin(-2.0 * PI, 200, 0.1));
        assert!((p.displacement() - 8.575).abs() < 1e-9);
    }

    #[test]
    fn zero_phase_change_is_zero_displacement() {
        let mut p = PhaseTrack::new(LAMBDA, 0.0125, 1000);
        p.update(&spin(0.0, 50, 0.1));
        assert_eq!(p.displacement(), 0.0);
    }

    #[test]
    fn weak_samples_hold_phase() {
        let mut p = PhaseTrack::new(LAMBDA, 0.0125, 1000);
        p.update(&spin(-PI, 100, 0.1));
        let held = p.unwrapped_phase();
        p.update(&spin(3.0, 100, 0.001));
        assert_eq!(p.unwrapped_phase(), held);
    }

    #[test]
    fn refresh_corrects_phase_measured_against_stale_static() {
        // True static s, moving vector rotating from angle 0. The first
        // samples are seen against a wrong estimate (s + v0); when the right
        // estimate arrives the accumulated phase snaps to the truth.
        let s = Complex64::new(0.4, 0.1);
        let a = 0.1;
        let n = 300;
        let total = -3.0 * PI;
        let wrong = s + Complex64::new(a, 0.0);
        let mut samples: Vec<LevdSample> = (0..=n)
            .map(|k| {
                let th = total * k as f64 / n as f64;
                LevdSample {
                    time: k as f64 / 500.0,
                    baseband: s + Complex64::from_polar(a, th),
                    static_estimate: wrong,
                    refreshed: 0,
                }
            })
            .collect();
        let last = samples.len() - 1;
        samples[last].static_estimate = s;
        samples[last].refreshed = 0b11;
        let mut p = PhaseTrack::new(LAMBDA, 0.0125, 1000);
        p.update(&samples);
        assert!((p.unwrapped_phase() - total).abs() < 1e-9, "{}", p.unwrapped_phase());
    }
}
