//! Finite-length Monte-Carlo verification: graph sampling, the dicode
//! erasure channel, trellis detection and joint iterative decoding.

mod channel;
mod decoder;
mod detector;
mod experiment;
mod graph;

pub use channel::{derive_seed, random_bits, simulate_channel, ChannelRealization};
pub use decoder::{jit_decode, jit_decode_with, DecodeResult, DecoderState, IterationStats};
pub use detector::{detect_section, trellis_detector_pass};
pub use experiment::{run_experiment, run_trial, Experiment, TrialResult};
pub use graph::{sample_graph, GraphEnsemble, TannerGraph};
