//! Carrier generation and I/Q demodulation of microphone audio into a
//! decimated complex baseband stream.

mod carrier;
mod config;
mod demod;
mod fir;

pub use carrier::{carrier_phase, generate_carrier, AudioFrame, LocalOscillator, CARRIER_AMPLITUDE};
pub use config::{SonarConfig, UPDATE_RATE_HZ};
pub use demod::{BasebandFrame, Demodulator};
pub use fir::{kaiser_lowpass, LowpassSpec};
