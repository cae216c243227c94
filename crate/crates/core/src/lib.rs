//! Modeling toolkit for mid-infrared single-photon detectors that up-convert
//! the signal to the near infrared before a silicon avalanche photodiode.
//!
//! - [`upconversion`]: sum-frequency conversion efficiency with Boyd–Kleinman
//!   focusing, and efficiency-budget arithmetic.
//! - [`radiometry`]: thermal background from Bose–Einstein mode occupation.
//! - [`sensitivity`]: noise-equivalent power at unit signal-to-noise ratio,
//!   its background-limited floor, and detector comparisons.
//! - [`counting_sim`]: seeded Monte Carlo of the pulsed counting experiment
//!   and its time-to-amplitude-converter histogram.
//! - [`design`]: whole-chain scenarios, parameter sweeps and 1-D optimizers.
//! - [`config`], [`report`], [`commands`]: scenario files, reports and the
//!   command layer behind the `mirdet` binary.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod counting_sim;
pub mod design;
mod error;
pub mod numerics;
pub mod quantities;
pub mod radiometry;
pub mod report;
pub mod sensitivity;
pub mod upconversion;

pub use error::{Error, Result};
