use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Band edges and stop-band depth for a linear-phase low-pass design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowpassSpec {
    pub sample_rate: f64,
    pub pass_edge_hz: f64,
    pub stop_edge_hz: f64,
    pub attenuation_db: f64,
}

impl LowpassSpec {
    /// Anti-alias filter used ahead of the ÷`decimation` stage: the stop band
    /// starts where the first alias would fold back onto the pass band.
    pub fn for_decimation(sample_rate: f64, baseband_rate: f64) -> Self {
        let pass = 0.08 * baseband_rate;
        LowpassSpec { sample_rate, pass_edge_hz: pass, stop_edge_hz: baseband_rate - pass, attenuation_db: 70.0 }
    }

    pub fn cutoff_hz(&self) -> f64 {
        0.5 * (self.pass_edge_hz + self.stop_edge_hz)
    }
}

fn bessel_i0(x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > 1e-17 * sum {
        term *= (half / k) * (half / k);
        sum += term;
        k += 1.0;
    }
    sum
}

/// Kaiser-windowed sinc low-pass, odd length, unit DC gain.
///
/// Length and window shape follow Kaiser's empirical formulas for the
/// requested transition width and attenuation. The group delay is
/// `(taps.len() - 1) / 2` samples.
pub fn kaiser_lowpass(spec: &LowpassSpec) -> Vec<f64> {
    let a = spec.attenuation_db;
    let transition = (spec.stop_edge_hz - spec.pass_edge_hz) / spec.sample_rate;
    let mut n = ((a - 7.95) / (14.36 * transition)).ceil() as usize + 1;
    if n.is_multiple_of(2) {
        n += 1;
    }
    let beta = if a > 50.0 {
        0.1102 * (a - 8.7)
    } else if a >= 21.0 {
        0.5842 * (a - 21.0).powf(0.4) + 0.07886 * (a - 21.0)
    } else {
        0.0
    };
    let fc = spec.cutoff_hz() / spec.sample_rate;
    let mid = (n - 1) as f64 / 2.0;
    let i0_beta = bessel_i0(beta);
    let mut taps: Vec<f64> = (0..n)
        .map(|i| {
            let m = i as f64 - mid;
            let sinc = if m == 0.0 { 2.0 * fc } else { (2.0 * PI * fc * m).sin() / (PI * m) };
            let r = m / mid;
            let w = bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / i0_beta;
            sinc * w
        })
        .collect();
    let dc: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= dc;
    }
    taps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn response(taps: &[f64], f: f64, fs: f64) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (i, t) in taps.iter().enumerate() {
            let w = 2.0 * PI * f / fs * i as f64;
            re += t * w.cos();
            im -= t * w.sin();
        }
        (re * re + im * im).sqrt()
    }

    #[test]
    fn decimation_filter_meets_band_edges() {
        let spec = LowpassSpec::for_decimation(48_000.0, 500.0);
        let taps = kaiser_lowpass(&spec);
        assert_eq!(taps.len() % 2, 1);
        assert!(spec.cutoff_hz() <= 250.0);
        // symmetric → linear phase
        for i in 0..taps.len() / 2 {
            assert!((taps[i] - taps[taps.len() - 1 - i]).abs() < 1e-15);
        }
        assert!((response(&taps, 0.0, 48_000.0) - 1.0).abs() < 1e-12);
        assert!((response(&taps, 20.0, 48_000.0) - 1.0).abs() < 1e-3);
        // stop band: ≥ 60 dB from the stop edge through to Nyquist (spot checks)
        for f in [460.0, 500.0, 750.0, 1000.0, 5_000.0, 8_000.0, 16_000.0, 23_999.0] {
            let g = response(&taps, f, 48_000.0);
            assert!(g < 1e-3, "gain {g} at {f} Hz");
        }
    }

    #[test]
    fn bessel_reference_values() {
        assert!((bessel_i0(0.0) - 1.0).abs() < 1e-15);
        // I0(1) = 1.2660658777520082
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_2).abs() < 1e-14);
    }
}
