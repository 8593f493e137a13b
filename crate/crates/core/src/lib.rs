//! Single-microphone continuous-wave sonar finger tracking for one-dimensional
//! around-device input, the selection triggers built on top of it, and the
//! Fitts' law machinery used to evaluate them.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. Everything here operates on in-memory buffers; file formats and
//! the command line live in the companion `wristsonar` crate.
//!
//! Pipeline overview:
//!
//! ```text
//!  audio frame ──► signals::Demodulator ──► tracking::Levd ──► tracking::PhaseTrack
//!   (48 kHz)         (I/Q, FIR, ÷96)          (static vector)     (unwrap, λ/4π)
//!                                                                     │
//!             triggers (crossing / dwell / pinch) ◄── CursorState ◄── One-Euro
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod fitts;
pub mod signals;
pub mod simulate;
pub mod tracking;
pub mod triggers;

mod math;

pub use error::{Error, Result};
