//! Zero-forcing precoding over the effective (group-reduced) channel, with
//! total-power normalization.
//!
//! `B = beta * H_eff^H (H_eff H_eff^H)^{-1}` with
//! `beta = sqrt(p_max / tr((H_eff H_eff^H)^{-1}))`, so `H_eff B = beta I_K`
//! and `tr(B B^H) = p_max`.

use crate::channel::ChannelRealization;
use crate::gsm::GsmCodebook;
use crate::linalg::{CMatrix, LinalgError};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PrecodingError {
    #[error("effective channel is rank deficient (K = {users} rows)")]
    RankDeficient { users: usize },
    #[error("zero-forcing needs K <= N_RF, got K = {users}, N_RF = {chains}")]
    TooManyUsers { users: usize, chains: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A normalized zero-forcing precoder.
#[derive(Debug, Clone)]
pub struct Precoder {
    /// `N_RF x K` precoding matrix; column k serves user k.
    pub b: CMatrix,
    /// Normalization factor (sqrt Watt); the per-user received amplitude.
    pub beta: f64,
    /// Transmit power budget the precoder was normalized to (Watt).
    pub p_max: f64,
}

impl Precoder {
    /// Precoder column for user `k`.
    pub fn user_column(&self, k: usize) -> Vec<Complex64> {
        self.b.column(k)
    }
}

/// Effective channel `H^H C_m`: the `K x N_RF` matrix with entry (k, j)
/// equal to `h_k^H` times column j of `c_m`.
pub fn effective_channel(
    h: &ChannelRealization,
    c_m: &CMatrix,
) -> Result<CMatrix, PrecodingError> {
    Ok(h.h.hermitian().matmul(c_m)?)
}

/// Effective channel computed from the codebook's group structure instead of
/// a dense selection matrix. Equivalent to
/// `effective_channel(h, codebook.matrix(m))`; the selection matrix has
/// exactly `n_k` equal entries per column, so each output entry is a scaled
/// sum over one antenna group.
pub fn effective_channel_for_combination(
    h: &ChannelRealization,
    codebook: &GsmCodebook,
    m: usize,
) -> Result<CMatrix, PrecodingError> {
    let users = h.users();
    let n_k = codebook.n_k();
    let gain = 1.0 / (n_k as f64).sqrt();
    let comb = codebook.combination(m);
    let mut eff = CMatrix::zeros(users, comb.len())?;
    for k in 0..users {
        for (j, &g) in comb.iter().enumerate() {
            let mut acc = Complex64::ZERO;
            for r in (g - 1) * n_k..g * n_k {
                acc += h.h.get(r, k).conj();
            }
            eff.set(k, j, acc * gain);
        }
    }
    Ok(eff)
}

/// Zero-forcing precoder for a `K x N_RF` effective channel with full row
/// rank, normalized to the transmit power budget.
pub fn zf_precoder(h_eff: &CMatrix, p_max: f64) -> Result<Precoder, PrecodingError> {
    let users = h_eff.rows();
    let chains = h_eff.cols();
    if users > chains {
        return Err(PrecodingError::TooManyUsers { users, chains });
    }
    let gram = h_eff.matmul(&h_eff.hermitian())?;
    let gram_inv = match gram.inverse() {
        Ok(inv) => inv,
        Err(LinalgError::Singular { .. }) => {
            return Err(PrecodingError::RankDeficient { users })
        }
        Err(e) => return Err(e.into()),
    };
    let trace = gram_inv.trace()?;
    let beta = (p_max / trace.re).sqrt();
    if !beta.is_finite() {
        return Err(PrecodingError::RankDeficient { users });
    }
    let b = h_eff
        .hermitian()
        .matmul(&gram_inv)?
        .scaled(Complex64::new(beta, 0.0));
    Ok(Precoder { b, beta, p_max })
}
