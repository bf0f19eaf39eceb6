//! Monte-Carlo trial engine and sweep orchestration.
//!
//! A trial draws one channel realization, builds the per-combination
//! zero-forcing precoders, evaluates per-user spectral efficiency, feeds the
//! achieved rate into the power model, and reports the energy efficiency
//! `R_total / P_total`. Sweeps repeat this over user counts or RF chain
//! counts for the GSM and conventional systems.
//!
//! Reproducibility: every draw comes from a substream derived from
//! `(seed, mode, trial, redraw attempt, purpose)`, and sweep points derive
//! their own seeds from `(seed, point index)`. Trials run on a rayon pool
//! but are collected in trial order and aggregated with compensated sums,
//! so results are bit-identical for any worker count.

use crate::channel::{draw_channel, draw_distances, ChannelError, ChannelModel};
use crate::gsm::{GsmCodebook, GsmError};
use crate::power::{total_power, PowerBreakdown, PowerError, PowerParams};
use crate::precoding::{
    effective_channel_for_combination, zf_precoder, PrecodingError,
};
use crate::rng::{derive_seed, stream_id, substream};
use crate::se::{
    compensated_sum, conventional_user_se, gsm_user_se, SeError, SeResult,
};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

/// Consecutive rank-rejections tolerated per trial before giving up.
pub const MAX_CONSECUTIVE_REJECTIONS: u32 = 100;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("antenna layout mismatch: N_T = {n_t} but N_m * N_k = {n_m} * {n_k} = {product}")]
    AntennaLayoutMismatch {
        n_t: usize,
        n_m: usize,
        n_k: usize,
        product: usize,
    },
    #[error("RF chain count must satisfy N_RF <= N_m, got N_RF = {n_rf}, N_m = {n_m}")]
    TooManyRfChains { n_rf: usize, n_m: usize },
    #[error("GSM zero-forcing needs K <= N_RF, got K = {users}, N_RF = {n_rf}")]
    TooManyUsersForGsm { users: usize, n_rf: usize },
    #[error("baseline zero-forcing needs K <= N_T, got K = {users}, N_T = {n_t}")]
    TooManyUsersForBaseline { users: usize, n_t: usize },
    #[error("user count must be at least 1")]
    NoUsers,
    #[error("RF chain count must be at least 1")]
    NoRfChains,
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("noise variance must be positive, got {0}")]
    BadNoiseVariance(f64),
    #[error("sweep needs at least one value and one mode")]
    EmptySweep,
    #[error(
        "trial {trial}: {limit} consecutive rank-deficient channel draws; \
         configuration appears infeasible"
    )]
    TooManyRejections { trial: u64, limit: u32 },
    #[error(transparent)]
    Gsm(#[from] GsmError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Precoding(#[from] PrecodingError),
    #[error(transparent)]
    Se(#[from] SeError),
    #[error(transparent)]
    Power(#[from] PowerError),
}

/// Which system a run models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// GSM: `N_RF` chains switched across antenna groups.
    Gsm,
    /// Conventional array: one RF chain per antenna, no switches.
    Baseline,
}

impl Mode {
    /// Stable tag used in RNG substream derivation.
    pub fn tag(self) -> u64 {
        match self {
            Mode::Gsm => 0,
            Mode::Baseline => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Gsm => "gsm",
            Mode::Baseline => "baseline",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gsm" => Ok(Mode::Gsm),
            "baseline" => Ok(Mode::Baseline),
            other => Err(format!("unknown mode '{other}' (expected gsm or baseline)")),
        }
    }
}

/// Full scenario description for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Transmit antennas (`N_m * N_k`).
    pub n_t: usize,
    /// Antenna groups.
    pub n_m: usize,
    /// Antennas per group.
    pub n_k: usize,
    /// RF chains.
    pub n_rf: usize,
    /// Single-antenna users.
    pub users: usize,
    pub channel: ChannelModel,
    pub power: PowerParams,
    /// Receiver noise variance in Watt.
    pub noise_var: f64,
    /// Monte-Carlo trials per point.
    pub trials: usize,
    /// Base seed; all substreams derive from it.
    pub seed: u64,
    pub mode: Mode,
}

impl SystemConfig {
    /// Scenario defaults: 128 antennas in 64 groups of 2, 63 RF chains,
    /// 10 users, urban attenuation, 500 trials.
    pub fn defaults() -> Self {
        let power = PowerParams::defaults();
        let noise_var = Self::default_noise_var(power.w);
        Self {
            n_t: 128,
            n_m: 64,
            n_k: 2,
            n_rf: 63,
            users: 10,
            channel: ChannelModel::urban_default(),
            power,
            noise_var,
            trials: 500,
            seed: 42,
            mode: Mode::Gsm,
        }
    }

    /// Thermal noise over bandwidth `w` with a 9 dB receiver noise figure:
    /// `10^((-174 + 10 log10(w) + 9 - 30) / 10)` Watt.
    pub fn default_noise_var(w: f64) -> f64 {
        10f64.powf((-174.0 + 10.0 * w.log10() + 9.0 - 30.0) / 10.0)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let product = self.n_m * self.n_k;
        if self.n_t != product {
            return Err(SimError::AntennaLayoutMismatch {
                n_t: self.n_t,
                n_m: self.n_m,
                n_k: self.n_k,
                product,
            });
        }
        if self.n_rf == 0 {
            return Err(SimError::NoRfChains);
        }
        if self.n_rf > self.n_m {
            return Err(SimError::TooManyRfChains {
                n_rf: self.n_rf,
                n_m: self.n_m,
            });
        }
        if self.users == 0 {
            return Err(SimError::NoUsers);
        }
        match self.mode {
            Mode::Gsm if self.users > self.n_rf => {
                return Err(SimError::TooManyUsersForGsm {
                    users: self.users,
                    n_rf: self.n_rf,
                })
            }
            Mode::Baseline if self.users > self.n_t => {
                return Err(SimError::TooManyUsersForBaseline {
                    users: self.users,
                    n_t: self.n_t,
                })
            }
            _ => {}
        }
        if self.trials == 0 {
            return Err(SimError::NoTrials);
        }
        if !(self.noise_var > 0.0) || !self.noise_var.is_finite() {
            return Err(SimError::BadNoiseVariance(self.noise_var));
        }
        ChannelModel::new(
            self.channel.d_bar,
            self.channel.alpha,
            self.channel.d_min,
            self.channel.d_max,
        )?;
        self.power.validate()?;
        Ok(())
    }
}

/// One trial's outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutput {
    pub se: SeResult,
    pub power: PowerBreakdown,
    /// Energy efficiency `r_total / p_total` in bit/Joule.
    pub ee: f64,
    /// Channel redraws forced by rank-deficient draws before this trial
    /// succeeded.
    pub rejected_draws: u32,
}

/// Run one trial. Deterministic given `(config, trial_index)`.
pub fn run_trial(config: &SystemConfig, trial_index: u64) -> Result<TrialOutput, SimError> {
    config.validate()?;
    let codebook = match config.mode {
        Mode::Gsm => Some(GsmCodebook::build(config.n_m, config.n_k, config.n_rf)?),
        Mode::Baseline => None,
    };
    run_trial_inner(config, codebook.as_ref(), trial_index)
}

fn run_trial_inner(
    config: &SystemConfig,
    codebook: Option<&GsmCodebook>,
    trial_index: u64,
) -> Result<TrialOutput, SimError> {
    let mode_tag = config.mode.tag();
    let mut rejected = 0u32;
    loop {
        let attempt = rejected as u64;
        let mut d_rng = substream(
            config.seed,
            &[mode_tag, trial_index, attempt, stream_id::DISTANCES],
        );
        let distances = draw_distances(config.users, &config.channel, &mut d_rng);
        let mut c_rng = substream(
            config.seed,
            &[mode_tag, trial_index, attempt, stream_id::CHANNEL],
        );
        let realization = draw_channel(config.n_t, &distances, &config.channel, &mut c_rng)?;

        let body = match config.mode {
            Mode::Gsm => gsm_trial_body(config, codebook.expect("codebook"), &realization),
            Mode::Baseline => baseline_trial_body(config, &realization),
        };
        match body {
            Ok(se) => {
                let (n_rf_active, with_switches) = match config.mode {
                    Mode::Gsm => (config.n_rf, true),
                    Mode::Baseline => (config.n_t, false),
                };
                let power = total_power(
                    &config.power,
                    config.n_t,
                    n_rf_active,
                    config.users,
                    se.total_rate,
                    with_switches,
                );
                let ee = se.total_rate / power.p_total;
                return Ok(TrialOutput {
                    se,
                    power,
                    ee,
                    rejected_draws: rejected,
                });
            }
            Err(SimError::Precoding(PrecodingError::RankDeficient { .. })) => {
                rejected += 1;
                if rejected >= MAX_CONSECUTIVE_REJECTIONS {
                    return Err(SimError::TooManyRejections {
                        trial: trial_index,
                        limit: MAX_CONSECUTIVE_REJECTIONS,
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }
}

fn gsm_trial_body(
    config: &SystemConfig,
    codebook: &GsmCodebook,
    realization: &crate::channel::ChannelRealization,
) -> Result<SeResult, SimError> {
    let users = config.users;
    let m_count = codebook.m_count();
    // per-user precoder columns across all combinations
    let mut b_cols: Vec<Vec<Vec<Complex64>>> = vec![Vec::with_capacity(m_count); users];
    for m in 0..m_count {
        let eff = effective_channel_for_combination(realization, codebook, m)?;
        let precoder = zf_precoder(&eff, config.power.p_max)?;
        for (k, cols) in b_cols.iter_mut().enumerate() {
            cols.push(precoder.user_column(k));
        }
    }
    let mut apm = Vec::with_capacity(users);
    let mut spatial = Vec::with_capacity(users);
    for (k, cols) in b_cols.iter().enumerate() {
        let h_k = realization.h.column(k);
        let user = gsm_user_se(&h_k, codebook, cols, config.noise_var)?;
        apm.push(user.apm);
        spatial.push(user.spatial);
    }
    Ok(SeResult::from_components(apm, spatial, config.power.w)?)
}

fn baseline_trial_body(
    config: &SystemConfig,
    realization: &crate::channel::ChannelRealization,
) -> Result<SeResult, SimError> {
    let eff = realization.h.hermitian();
    let precoder = zf_precoder(&eff, config.power.p_max)?;
    let mut se_values = Vec::with_capacity(config.users);
    for k in 0..config.users {
        let h_k = realization.h.column(k);
        se_values.push(conventional_user_se(
            &h_k,
            &precoder.b,
            k,
            config.noise_var,
        )?);
    }
    let zeros = vec![0.0; config.users];
    Ok(SeResult::from_components(se_values, zeros, config.power.w)?)
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
}

fn mean_stderr(values: &[f64]) -> MeanStderr {
    let n = values.len();
    let mean = compensated_sum(values.iter().copied()) / n as f64;
    if n < 2 {
        return MeanStderr { mean, stderr: 0.0 };
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    MeanStderr {
        mean,
        stderr: (ss / (n as f64 - 1.0)).sqrt() / (n as f64).sqrt(),
    }
}

/// Trial-averaged statistics for one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointStats {
    pub trials: usize,
    /// Total channel redraws forced by rank rejections across all trials.
    pub rejected_trials: u64,
    /// Sum of per-user spectral efficiencies, bit/s/Hz.
    pub se_total: MeanStderr,
    /// Delivered rate, bit/s.
    pub r_total: MeanStderr,
    /// Energy efficiency as the mean of per-trial ratios, bit/Joule.
    pub ee: MeanStderr,
    /// Diagnostic alternative: mean rate divided by mean power.
    pub ee_ratio_of_means: f64,
    pub p_total: MeanStderr,
    pub p_c: MeanStderr,
    /// Component-wise mean power breakdown.
    pub power_mean: PowerBreakdown,
}

/// One (sweep value, mode) cell of a report. Infeasible combinations carry
/// a skip reason instead of statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: usize,
    pub mode: Mode,
    pub stats: Option<PointStats>,
    pub skip_reason: Option<String>,
}

/// The swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Users,
    RfChains,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Users => "users",
            SweepVariable::RfChains => "rf_chains",
        }
    }
}

impl std::fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sweep results: one entry per (value, mode) in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct EeReport {
    pub variable: SweepVariable,
    pub points: Vec<SweepPoint>,
}

impl EeReport {
    /// Statistics for one (value, mode) cell, if it ran.
    pub fn stats(&self, value: usize, mode: Mode) -> Option<&PointStats> {
        self.points
            .iter()
            .find(|p| p.value == value && p.mode == mode)
            .and_then(|p| p.stats.as_ref())
    }
}

/// Run a sweep of `variable` over `values` for each mode. Every point gets
/// its own derived seed; infeasible points are reported as skipped.
pub fn sweep(
    template: &SystemConfig,
    variable: SweepVariable,
    values: &[usize],
    modes: &[Mode],
) -> Result<EeReport, SimError> {
    if values.is_empty() || modes.is_empty() {
        return Err(SimError::EmptySweep);
    }
    let mut points = Vec::with_capacity(values.len() * modes.len());
    for (point_index, &value) in values.iter().enumerate() {
        let point_seed = derive_seed(
            template.seed,
            &[stream_id::SWEEP_POINT, point_index as u64],
        );
        for &mode in modes {
            let mut config = template.clone();
            config.seed = point_seed;
            config.mode = mode;
            match variable {
                SweepVariable::Users => config.users = value,
                SweepVariable::RfChains => config.n_rf = value,
            }
            match config.validate() {
                Err(reason) => points.push(SweepPoint {
                    value,
                    mode,
                    stats: None,
                    skip_reason: Some(reason.to_string()),
                }),
                Ok(()) => points.push(SweepPoint {
                    value,
                    mode,
                    stats: Some(run_point(&config)?),
                    skip_reason: None,
                }),
            }
        }
    }
    Ok(EeReport { variable, points })
}

fn run_point(config: &SystemConfig) -> Result<PointStats, SimError> {
    let codebook = match config.mode {
        Mode::Gsm => Some(GsmCodebook::build(config.n_m, config.n_k, config.n_rf)?),
        Mode::Baseline => None,
    };
    // ordered collection keeps aggregation independent of scheduling
    let outputs: Vec<TrialOutput> = (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| run_trial_inner(config, codebook.as_ref(), trial))
        .collect::<Result<_, _>>()?;
    Ok(aggregate(&outputs))
}

fn aggregate(outputs: &[TrialOutput]) -> PointStats {
    let n = outputs.len();
    let collect = |f: &dyn Fn(&TrialOutput) -> f64| -> Vec<f64> {
        outputs.iter().map(f).collect()
    };
    let se_total = mean_stderr(&collect(&|t| t.se.se_total()));
    let r_total = mean_stderr(&collect(&|t| t.se.total_rate));
    let ee = mean_stderr(&collect(&|t| t.ee));
    let p_total = mean_stderr(&collect(&|t| t.power.p_total));
    let p_c = mean_stderr(&collect(&|t| t.power.p_c));
    let mean_of = |f: &dyn Fn(&TrialOutput) -> f64| -> f64 {
        compensated_sum(outputs.iter().map(f)) / n as f64
    };
    let power_mean = PowerBreakdown {
        p_pa: mean_of(&|t| t.power.p_pa),
        p_rf_chains: mean_of(&|t| t.power.p_rf_chains),
        p_switch: mean_of(&|t| t.power.p_switch),
        p_ce: mean_of(&|t| t.power.p_ce),
        p_cd: mean_of(&|t| t.power.p_cd),
        p_lp: mean_of(&|t| t.power.p_lp),
        p_fix: mean_of(&|t| t.power.p_fix),
        p_t: mean_of(&|t| t.power.p_t),
        p_c: p_c.mean,
        p_total: p_total.mean,
    };
    PointStats {
        trials: n,
        rejected_trials: outputs.iter().map(|t| t.rejected_draws as u64).sum(),
        se_total,
        r_total,
        ee,
        ee_ratio_of_means: r_total.mean / p_total.mean,
        p_total,
        p_c,
        power_mean,
    }
}
