//! Link-level simulation and numerical optimization for digital over-the-air
//! feature aggregation assisted by a hybrid (active/passive) reflecting surface.
//!
//! Distributed agents extract local feature vectors, quantize them block-wise
//! against shared sphere codebooks, and transmit modulation sequences that
//! superimpose in the air. The edge node recovers the aggregated codeword
//! histogram with sparse detection, reconstructs the global feature vector and
//! runs a linear classifier on it. A joint optimizer allocates quantization
//! bits across blocks and tunes agent transmit coefficients, the receive
//! beamformer and the reflecting-surface coefficients to maximize a
//! class-separability surrogate of inference accuracy.
//!
//! Module map:
//!
//! - [`model`] — system parameters, Rician channel generation, the hybrid
//!   surface state and the uplink signal equation.
//! - [`codec`] — block partitioning, sphere codebooks (Lloyd), modulation
//!   codebooks, stagewise weak OMP detection and reconstruction.
//! - [`theory`] — Gaussian-mixture feature model, aggregation-error bounds,
//!   the separability surrogate, entropy bounds and the linear classifier.
//! - [`opt`] — the alternating optimizer: SCA bit allocation, per-agent
//!   transmit coefficients, closed-form receive beamforming and the
//!   closed-form inner loop for the reflection coefficients.
//! - [`harness`] — end-to-end trials, baselines, sweeps, CSV output and the
//!   `simulate` CLI.
//!
//! Runnable demos live in `examples/`; see the README for a tour.

pub mod codec;
pub mod harness;
pub mod model;
pub mod opt;
pub mod rng;
pub mod theory;

pub use num_complex::Complex64;
