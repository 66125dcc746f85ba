//! Density-evolution analysis of joint iterative decoding for regular and
//! spatially coupled LDPC ensembles over the dicode erasure channel, with
//! a finite-length simulator to cross-check the recursions.
//!
//! * [`channel`]: extrinsic transfer functions, information rate, Shannon
//!   threshold.
//! * [`uncoupled`]: DE, thresholds, EXIT curves and bounds for `(dl, dr)`.
//! * [`coupled`]: the `(dl, dr, L, w)` chain: forward and reverse DE,
//!   thresholds, EXIT curves, fixed-point shape.
//! * [`sim`]: graph sampling, channel, trellis detector, decoder.
//! * [`io`]: CSV writers for curves, traces and constellations.

pub mod bisect;
pub mod channel;
pub mod coupled;
pub mod error;
pub mod io;
pub mod par;
pub mod sim;
pub mod uncoupled;

pub use error::{Error, Result};
