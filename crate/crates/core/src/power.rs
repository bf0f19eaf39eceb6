//! Base-station power model: transmission (PA, RF chains, switches),
//! computation (channel estimation, coding, linear processing), and a fixed
//! term.
//!
//! Conventions: every value here is in Watt. Rates are bit/s, bandwidth Hz,
//! computation efficiency flops per Watt. The coherence block length `u` is
//! in symbols, so `w / u` is the number of coherence blocks per second.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PowerError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("PA efficiency must lie in (0, 1], got {0}")]
    BadPaEfficiency(f64),
}

/// Scenario constants of the power model.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerParams {
    /// Maximum radiated power in Watt.
    pub p_max: f64,
    /// Power-amplifier efficiency in (0, 1].
    pub gamma: f64,
    /// Power per RF chain in Watt.
    pub p_rf: f64,
    /// Power per antenna-group switch in Watt.
    pub p_each_switch: f64,
    /// Bandwidth in Hz.
    pub w: f64,
    /// Coherence block length in symbols.
    pub u: f64,
    /// Relative pilot length.
    pub tau: f64,
    /// Coding power in Watt per bit/s.
    pub p_cod: f64,
    /// Baseband computation efficiency in flops per Watt.
    pub l_bs: f64,
    /// Fixed power (cooling, control signaling) in Watt.
    pub p_fix: f64,
}

impl PowerParams {
    /// Default constants: 0.39 PA efficiency, 48 mW per RF chain, 5 mW per
    /// switch, 20 MHz bandwidth, 1800-symbol coherence block, unit relative
    /// pilot length, 1e-10 W per bit/s coding power, 12.8 Gflops/W, 1 W
    /// fixed power, 1 W power budget.
    pub fn defaults() -> Self {
        Self {
            p_max: 1.0,
            gamma: 0.39,
            p_rf: 0.048,
            p_each_switch: 0.005,
            w: 20e6,
            u: 1800.0,
            tau: 1.0,
            p_cod: 1e-10,
            l_bs: 12.8e9,
            p_fix: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), PowerError> {
        let positive = [
            ("p_max", self.p_max),
            ("p_rf", self.p_rf),
            ("p_each_switch", self.p_each_switch),
            ("w", self.w),
            ("u", self.u),
            ("tau", self.tau),
            ("p_cod", self.p_cod),
            ("l_bs", self.l_bs),
            ("p_fix", self.p_fix),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(PowerError::NonPositive { name, value });
            }
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(PowerError::BadPaEfficiency(self.gamma));
        }
        Ok(())
    }
}

/// Itemized power consumption for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBreakdown {
    /// Power amplifier: `p_max / gamma`.
    pub p_pa: f64,
    /// All RF chains.
    pub p_rf_chains: f64,
    /// Antenna-group switches (zero without GSM).
    pub p_switch: f64,
    /// Channel estimation.
    pub p_ce: f64,
    /// Channel coding (rate dependent).
    pub p_cd: f64,
    /// Linear processing (precoder computation plus per-symbol application).
    pub p_lp: f64,
    /// Fixed power.
    pub p_fix: f64,
    /// Transmission total: `p_pa + p_rf_chains + p_switch`.
    pub p_t: f64,
    /// Computation total: `p_ce + p_cd + p_lp`.
    pub p_c: f64,
    /// Grand total: `p_t + p_c + p_fix`.
    pub p_total: f64,
}

/// Transmission-side components `(p_pa, p_rf_chains, p_switch)`.
pub fn transmission_power(
    params: &PowerParams,
    n_rf: usize,
    with_switches: bool,
) -> (f64, f64, f64) {
    let p_pa = params.p_max / params.gamma;
    let p_rf_chains = n_rf as f64 * params.p_rf;
    let p_switch = if with_switches {
        n_rf as f64 * params.p_each_switch
    } else {
        0.0
    };
    (p_pa, p_rf_chains, p_switch)
}

/// Channel-estimation power: `(w/u) * 2 tau n_t k^2 / l_bs`. Pilot-based
/// estimation runs once per coherence block.
pub fn channel_estimation_power(params: &PowerParams, n_t: usize, k: usize) -> f64 {
    let k = k as f64;
    (params.w / params.u) * (2.0 * params.tau * n_t as f64 * k * k) / params.l_bs
}

/// Coding power: linear in the delivered rate.
pub fn coding_power(params: &PowerParams, r_total: f64) -> f64 {
    params.p_cod * r_total
}

/// Linear-processing power: one precoder computation per coherence block
/// (`16 k^2 n_rf + 12 k^3 + 8 n_rf k` flops) plus one matrix-vector product
/// per symbol (`8 n_rf k` flops).
pub fn linear_processing_power(params: &PowerParams, n_rf: usize, k: usize) -> f64 {
    let n_rf = n_rf as f64;
    let k = k as f64;
    let precoder_flops = 16.0 * k * k * n_rf + 12.0 * k * k * k + 8.0 * n_rf * k;
    (params.w / params.u) * precoder_flops / params.l_bs
        + params.w * 8.0 * n_rf * k / params.l_bs
}

/// Full breakdown for one configuration. `n_rf` is the active RF chain
/// count (equal to the antenna count for a conventional array), and
/// `with_switches` marks the GSM switching network.
pub fn total_power(
    params: &PowerParams,
    n_t: usize,
    n_rf: usize,
    k: usize,
    r_total: f64,
    with_switches: bool,
) -> PowerBreakdown {
    let (p_pa, p_rf_chains, p_switch) = transmission_power(params, n_rf, with_switches);
    let p_ce = channel_estimation_power(params, n_t, k);
    let p_cd = coding_power(params, r_total);
    let p_lp = linear_processing_power(params, n_rf, k);
    let p_t = p_pa + p_rf_chains + p_switch;
    let p_c = p_ce + p_cd + p_lp;
    let p_total = p_t + p_c + params.p_fix;
    PowerBreakdown {
        p_pa,
        p_rf_chains,
        p_switch,
        p_ce,
        p_cd,
        p_lp,
        p_fix: params.p_fix,
        p_t,
        p_c,
        p_total,
    }
}
