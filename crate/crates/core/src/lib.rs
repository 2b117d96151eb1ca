//! Coded distributed diversity reception.
//!
//! A transmitter sends one symbol of an M-ary constellation to N receive
//! nodes. Each node detects the symbol, converts its label to K symbols of
//! GF(2^B) and forwards a single field symbol `a g_i` (a column of a linear
//! code's generator matrix) to a fusion center, which decodes the codeword.
//!
//! * [`gf`]: field arithmetic and vectors.
//! * [`codes`]: generator families (simplex, first-order Reed-Muller, SCRS),
//!   code enumeration, minimum distance and length bounds.
//! * [`sigmap`]: constellations, Gray labels, per-node detection and quantization.
//! * [`channel`]: fading and noise sampling, per-node transition tables.
//! * [`fusion`]: ML, selected-subset ML and Hamming decoders, and baselines.
//! * [`harness`]: Monte-Carlo sweeps, diversity fits, achievable rates, presets.

pub mod channel;
pub mod codes;
pub mod error;
pub mod fusion;
pub mod gf;
pub mod harness;
pub mod sigmap;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
