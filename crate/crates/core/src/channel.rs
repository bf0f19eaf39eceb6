//! Rayleigh downlink channel with distance-dependent attenuation.
//!
//! Each user k sits at distance `d_k` drawn uniformly from
//! `[d_min, d_max]`, and its channel column is i.i.d. complex Gaussian with
//! per-entry variance `l(d_k) = d_bar * d_k^(-alpha)`. Real and imaginary
//! parts each carry half the variance.

use crate::linalg::CMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("distance bounds must satisfy 0 < d_min <= d_max, got [{d_min}, {d_max}]")]
    BadDistanceBounds { d_min: f64, d_max: f64 },
    #[error("attenuation constants must be positive (d_bar = {d_bar}, alpha = {alpha})")]
    BadAttenuation { d_bar: f64, alpha: f64 },
    #[error("antenna count must be at least 1")]
    NoAntennas,
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
}

/// Attenuation constants and the user-distance range.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    /// Attenuation at unit distance (dimensionless).
    pub d_bar: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Minimum user distance in meters.
    pub d_min: f64,
    /// Maximum user distance in meters.
    pub d_max: f64,
}

impl ChannelModel {
    pub fn new(d_bar: f64, alpha: f64, d_min: f64, d_max: f64) -> Result<Self, ChannelError> {
        if !(d_bar > 0.0) || !(alpha > 0.0) {
            return Err(ChannelError::BadAttenuation { d_bar, alpha });
        }
        if !(d_min > 0.0) || !(d_max >= d_min) {
            return Err(ChannelError::BadDistanceBounds { d_min, d_max });
        }
        Ok(Self {
            d_bar,
            alpha,
            d_min,
            d_max,
        })
    }

    /// Urban-macro constants used throughout: `d_bar = 10^-3.53`,
    /// `alpha = 3.76`, distances 35 m to 250 m.
    pub fn urban_default() -> Self {
        Self {
            d_bar: 10f64.powf(-3.53),
            alpha: 3.76,
            d_min: 35.0,
            d_max: 250.0,
        }
    }
}

/// One drawn channel: user distances and the `N_T x K` matrix whose k-th
/// column is user k's channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub distances: Vec<f64>,
    pub h: CMatrix,
}

impl ChannelRealization {
    /// Number of users.
    pub fn users(&self) -> usize {
        self.h.cols()
    }

    /// Number of transmit antennas.
    pub fn n_t(&self) -> usize {
        self.h.rows()
    }
}

/// Large-scale attenuation `d_bar * d^(-alpha)`.
pub fn path_loss(d: f64, model: &ChannelModel) -> Result<f64, ChannelError> {
    if !(d > 0.0) {
        return Err(ChannelError::NonPositiveDistance(d));
    }
    Ok(model.d_bar * d.powf(-model.alpha))
}

/// `k` i.i.d. distances, uniform on `[d_min, d_max]`.
pub fn draw_distances(k: usize, model: &ChannelModel, rng: &mut impl Rng) -> Vec<f64> {
    (0..k)
        .map(|_| rng.random_range(model.d_min..=model.d_max))
        .collect()
}

/// Channel matrix draw: column k is complex Gaussian with per-entry variance
/// `l(d_k)` (so each real component has variance `l(d_k)/2`).
pub fn draw_channel(
    n_t: usize,
    distances: &[f64],
    model: &ChannelModel,
    rng: &mut impl Rng,
) -> Result<ChannelRealization, ChannelError> {
    if n_t == 0 {
        return Err(ChannelError::NoAntennas);
    }
    let scales: Vec<f64> = distances
        .iter()
        .map(|&d| path_loss(d, model).map(|l| (l / 2.0).sqrt()))
        .collect::<Result<_, _>>()?;
    let mut h = CMatrix::zeros(n_t, distances.len())?;
    // column-major fill so each user's column is one contiguous draw sequence
    for (k, &s) in scales.iter().enumerate() {
        for i in 0..n_t {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            h.set(i, k, Complex64::new(re * s, im * s));
        }
    }
    Ok(ChannelRealization {
        distances: distances.to_vec(),
        h,
    })
}
