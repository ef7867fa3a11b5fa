//! Deterministic image degradation and detector robustness benchmarking.
//!
//! The crate has three layers:
//!
//! - **Operators** ([`corrupt`]): parameterized corruptions — Gaussian and
//!   Poissonian-Gaussian noise, three blur filters, baseline JPEG round
//!   trips, down/up resizing, gamma and linear intensity adjustment — plus
//!   [`corrupt::SeverityGrid`], a named corruption × severity grid with a
//!   builtin default.
//! - **Augmentation** ([`augment`]): a stochastic enhancement → blur →
//!   noise → JPEG chain where every stage fires with a configurable
//!   probability and samples its parameters from configurable ranges; each
//!   run yields a replayable [`augment::AugmentTrace`].
//! - **Benchmarking** ([`bench`], [`detector`], [`metrics`]): run a dataset
//!   manifest through every grid cell, score the degraded copies with an
//!   external detector process (newline-delimited JSON over stdin/stdout)
//!   or an in-process [`detector::Scorer`], and report ACC/AUC/F1 per cell.
//!
//! Everything is reproducible: all randomness flows from
//! [`rng::RngStream`] streams derived from a `(master seed, item id,
//! stage)` triple, so re-running with the same seed gives byte-identical
//! images and reports, regardless of worker count.
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `degrade` binary for the batch CLI.

pub mod augment;
pub mod bench;
pub mod cli;
pub mod corrupt;
pub mod detector;
mod error;
pub mod manifest;
pub mod metrics;
pub mod raster;
pub mod report;
pub mod rng;
pub mod synth;
pub mod toy;

pub use error::{Error, Result};
pub use raster::ImageBuffer;
pub use rng::RngStream;
