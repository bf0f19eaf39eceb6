//! Link-level Monte-Carlo simulator for the downlink of a massive MIMO
//! base station that drives many antennas from few RF chains via
//! generalized spatial modulation (GSM), compared against a conventional
//! one-chain-per-antenna array.
//!
//! The crate evaluates three quantities per scenario:
//!
//! - spectral efficiency (mutual-information rate for GSM, SINR capacity
//!   for the conventional system),
//! - base-station power (transmission + computation + fixed), and
//! - energy efficiency, the delivered bits per Joule.
//!
//! Modules follow the processing chain: [`gsm`] builds the antenna-group
//! codebook, [`channel`] draws Rayleigh realizations with distance-dependent
//! attenuation, [`precoding`] forms zero-forcing precoders, [`se`] computes
//! rates, [`power`] costs them, and [`sim`] runs seeded, reproducible
//! Monte-Carlo sweeps on top. [`linalg`] is the small complex-matrix kernel
//! underneath; [`rng`] derives the deterministic substreams.

pub mod channel;
pub mod gsm;
pub mod linalg;
pub mod power;
pub mod precoding;
pub mod rng;
pub mod se;
pub mod sim;
