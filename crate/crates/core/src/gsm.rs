//! GSM codebook construction: the set of valid antenna-group combinations
//! and their normalized selection matrices.
//!
//! With `N_m` antenna groups of `N_k` antennas each and `N_RF` RF chains,
//! the scheme uses `M = 2^floor(log2(C(N_m, N_RF)))` combinations so the
//! group index carries a whole number of bits. Which `M` of the
//! `C(N_m, N_RF)` subsets count as valid is not pinned down anywhere
//! authoritative; this crate takes the lexicographically first `M`, which is
//! deterministic and statistically exchangeable under an i.i.d. channel.

use crate::linalg::CMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Hard cap on the number of enumerated combinations. Configurations beyond
/// this are rejected rather than silently exhausting memory.
pub const MAX_COMBINATIONS: u64 = 1 << 24;

/// Eagerly cache dense selection matrices only while the total entry count
/// stays small; the trial loop never needs them.
const EAGER_MATRIX_ENTRY_LIMIT: u64 = 1 << 21;

#[derive(Debug, Error, PartialEq)]
pub enum GsmError {
    #[error("RF chain count {n_rf} exceeds antenna group count {n_m}")]
    RfChainsExceedGroups { n_m: usize, n_rf: usize },
    #[error("antenna counts must be at least 1 (N_m = {n_m}, N_k = {n_k}, N_RF = {n_rf})")]
    ZeroSize { n_m: usize, n_k: usize, n_rf: usize },
    #[error("group count {n_m} exceeds the supported maximum of 64")]
    TooManyGroups { n_m: usize },
    #[error("binomial({n}, {k}) overflows 64-bit integer range")]
    BinomialOverflow { n: usize, k: usize },
    #[error("requested {requested} combinations but only {available} exist")]
    NotEnoughCombinations { requested: u64, available: u64 },
    #[error("combination count {requested} exceeds the enumeration cap {cap}")]
    TooManyCombinations { requested: u64, cap: u64 },
    #[error("group index {index} out of range 1..={n_m}")]
    GroupIndexOutOfRange { index: usize, n_m: usize },
    #[error("group indices must be strictly increasing, got {a} then {b}")]
    NotStrictlyIncreasing { a: usize, b: usize },
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
}

/// Exact binomial coefficient, or `None` on 64-bit overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) / i is exact at every step
        acc = acc.checked_mul((n - k + i) as u128)? / i as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Number of valid antenna-group combinations:
/// `2^floor(log2(C(n_m, n_rf)))`.
pub fn valid_combination_count(n_m: usize, n_rf: usize) -> Result<u64, GsmError> {
    if n_m == 0 || n_rf == 0 {
        return Err(GsmError::ZeroSize { n_m, n_k: 1, n_rf });
    }
    if n_m > 64 {
        return Err(GsmError::TooManyGroups { n_m });
    }
    if n_rf > n_m {
        return Err(GsmError::RfChainsExceedGroups { n_m, n_rf });
    }
    let total = binomial(n_m as u64, n_rf as u64)
        .ok_or(GsmError::BinomialOverflow { n: n_m, k: n_rf })?;
    Ok(1u64 << (63 - total.leading_zeros()))
}

/// First `m_count` size-`n_rf` subsets of `{1..n_m}` in lexicographic order,
/// each sorted ascending (1-based group indices).
pub fn enumerate_combinations(
    n_m: usize,
    n_rf: usize,
    m_count: u64,
) -> Result<Vec<Vec<usize>>, GsmError> {
    if n_m == 0 || n_rf == 0 {
        return Err(GsmError::ZeroSize { n_m, n_k: 1, n_rf });
    }
    if n_rf > n_m {
        return Err(GsmError::RfChainsExceedGroups { n_m, n_rf });
    }
    let available = binomial(n_m as u64, n_rf as u64)
        .ok_or(GsmError::BinomialOverflow { n: n_m, k: n_rf })?;
    if m_count > available {
        return Err(GsmError::NotEnoughCombinations {
            requested: m_count,
            available,
        });
    }
    if m_count > MAX_COMBINATIONS {
        return Err(GsmError::TooManyCombinations {
            requested: m_count,
            cap: MAX_COMBINATIONS,
        });
    }

    let mut out = Vec::with_capacity(m_count as usize);
    let mut current: Vec<usize> = (1..=n_rf).collect();
    for _ in 0..m_count {
        out.push(current.clone());
        // lexicographic successor
        let mut i = n_rf;
        while i > 0 {
            i -= 1;
            if current[i] < n_m - (n_rf - 1 - i) {
                current[i] += 1;
                for j in i + 1..n_rf {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
    Ok(out)
}

/// Selection matrix for one combination `u`: column `i` holds `1/sqrt(n_k)`
/// in the `n_k` rows of group `u[i]` and zero elsewhere, so every column has
/// unit norm and distinct columns have disjoint support.
pub fn build_gsm_matrix(u: &[usize], n_m: usize, n_k: usize) -> Result<CMatrix, GsmError> {
    if n_m == 0 || n_k == 0 || u.is_empty() {
        return Err(GsmError::ZeroSize {
            n_m,
            n_k,
            n_rf: u.len(),
        });
    }
    for pair in u.windows(2) {
        if pair[1] <= pair[0] {
            return Err(GsmError::NotStrictlyIncreasing {
                a: pair[0],
                b: pair[1],
            });
        }
    }
    for &g in u {
        if g < 1 || g > n_m {
            return Err(GsmError::GroupIndexOutOfRange { index: g, n_m });
        }
    }
    let n_t = n_m * n_k;
    let gain = Complex64::new(1.0 / (n_k as f64).sqrt(), 0.0);
    let mut m = CMatrix::zeros(n_t, u.len())?;
    for (col, &g) in u.iter().enumerate() {
        for r in (g - 1) * n_k..g * n_k {
            m.set(r, col, gain);
        }
    }
    Ok(m)
}

/// The full GSM codebook for one antenna configuration.
#[derive(Debug, Clone)]
pub struct GsmCodebook {
    n_t: usize,
    n_m: usize,
    n_k: usize,
    n_rf: usize,
    combinations: Vec<Vec<usize>>,
    cached_matrices: Option<Vec<CMatrix>>,
}

impl GsmCodebook {
    /// Build the codebook for `n_m` groups of `n_k` antennas and `n_rf` RF
    /// chains. `N_T = n_m * n_k` follows.
    pub fn build(n_m: usize, n_k: usize, n_rf: usize) -> Result<Self, GsmError> {
        if n_k == 0 {
            return Err(GsmError::ZeroSize { n_m, n_k, n_rf });
        }
        let m_count = valid_combination_count(n_m, n_rf)?;
        let combinations = enumerate_combinations(n_m, n_rf, m_count)?;
        let n_t = n_m * n_k;
        let entries = m_count * (n_t as u64) * (n_rf as u64);
        let cached_matrices = if entries <= EAGER_MATRIX_ENTRY_LIMIT {
            Some(
                combinations
                    .iter()
                    .map(|u| build_gsm_matrix(u, n_m, n_k))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        } else {
            None
        };
        Ok(Self {
            n_t,
            n_m,
            n_k,
            n_rf,
            combinations,
            cached_matrices,
        })
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_m(&self) -> usize {
        self.n_m
    }

    pub fn n_k(&self) -> usize {
        self.n_k
    }

    pub fn n_rf(&self) -> usize {
        self.n_rf
    }

    /// Number of valid combinations M.
    pub fn m_count(&self) -> usize {
        self.combinations.len()
    }

    /// The m-th combination as sorted 1-based group indices.
    pub fn combination(&self, m: usize) -> &[usize] {
        &self.combinations[m]
    }

    pub fn combinations(&self) -> &[Vec<usize>] {
        &self.combinations
    }

    /// Dense selection matrix for combination `m` (cached for small
    /// codebooks, rebuilt on demand for large ones).
    pub fn matrix(&self, m: usize) -> CMatrix {
        match &self.cached_matrices {
            Some(ms) => ms[m].clone(),
            None => build_gsm_matrix(&self.combinations[m], self.n_m, self.n_k)
                .expect("combinations validated at build time"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn combination_count_examples() {
        // binom(64, 63) = 64, floor(log2) = 6
        assert_eq!(valid_combination_count(64, 63).unwrap(), 64);
        // binom(n, n) = 1
        assert_eq!(valid_combination_count(16, 16).unwrap(), 1);
        // binom(16, 4) = 1820, floor(log2) = 10
        assert_eq!(valid_combination_count(16, 4).unwrap(), 1024);
    }

    #[test]
    fn combination_count_rejects_bad_inputs() {
        assert!(matches!(
            valid_combination_count(4, 5),
            Err(GsmError::RfChainsExceedGroups { .. })
        ));
        assert!(matches!(
            valid_combination_count(65, 2),
            Err(GsmError::TooManyGroups { .. })
        ));
    }

    #[test]
    fn binomial_basics() {
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(64, 32), Some(1_832_624_140_942_590_534));
        assert_eq!(binomial(5, 6), Some(0));
        // binom(128, 64) overflows u64
        assert_eq!(binomial(128, 64), None);
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(
            enumerate_combinations(2, 1, 2).unwrap(),
            vec![vec![1], vec![2]]
        );
        assert_eq!(
            enumerate_combinations(3, 2, 2).unwrap(),
            vec![vec![1, 2], vec![1, 3]]
        );
        // binom(64, 63) = 64 = M: every subset omits exactly one group
        let all = enumerate_combinations(64, 63, 64).unwrap();
        assert_eq!(all.len(), 64);
        for (i, u) in all.iter().enumerate() {
            let omitted: Vec<usize> = (1..=64).filter(|g| !u.contains(g)).collect();
            assert_eq!(omitted, vec![64 - i]);
        }
    }

    #[test]
    fn enumeration_rejects_overflow_requests() {
        assert!(matches!(
            enumerate_combinations(3, 2, 4),
            Err(GsmError::NotEnoughCombinations { .. })
        ));
    }

    #[test]
    fn gsm_matrix_examples() {
        // u = [1], n_m = 2, n_k = 2: 4x1 column (1/sqrt(2))[1,1,0,0]^T
        let m = build_gsm_matrix(&[1], 2, 2).unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 1));
        let s = 1.0 / 2.0_f64.sqrt();
        for (row, expect) in [(0, s), (1, s), (2, 0.0), (3, 0.0)] {
            assert!((m.get(row, 0).re - expect).abs() < 1e-15);
            assert_eq!(m.get(row, 0).im, 0.0);
        }

        // n_k = 1 reduces to plain antenna selection
        let m = build_gsm_matrix(&[2], 2, 1).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 1));
        assert_eq!(m.get(0, 0).re, 0.0);
        assert_eq!(m.get(1, 0).re, 1.0);

        // u = [2, 3], n_m = 3, n_k = 2: support in rows 3-4 and 5-6 (1-based)
        let m = build_gsm_matrix(&[2, 3], 3, 2).unwrap();
        assert_eq!((m.rows(), m.cols()), (6, 2));
        for r in 0..6 {
            for c in 0..2 {
                let expect = match (r, c) {
                    (2, 0) | (3, 0) | (4, 1) | (5, 1) => s,
                    _ => 0.0,
                };
                assert!((m.get(r, c).re - expect).abs() < 1e-15, "({r},{c})");
            }
        }
    }

    #[test]
    fn gsm_matrix_rejects_bad_indices() {
        assert!(matches!(
            build_gsm_matrix(&[1, 1], 3, 2),
            Err(GsmError::NotStrictlyIncreasing { .. })
        ));
        assert!(matches!(
            build_gsm_matrix(&[0], 3, 2),
            Err(GsmError::GroupIndexOutOfRange { .. })
        ));
        assert!(matches!(
            build_gsm_matrix(&[4], 3, 2),
            Err(GsmError::GroupIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn codebook_is_deterministic_and_distinct() {
        let a = GsmCodebook::build(8, 2, 3).unwrap();
        let b = GsmCodebook::build(8, 2, 3).unwrap();
        assert_eq!(a.combinations(), b.combinations());
        assert_eq!(a.m_count(), 32); // binom(8,3) = 56 -> 2^5
        let set: std::collections::HashSet<_> = a.combinations().iter().collect();
        assert_eq!(set.len(), a.m_count());
        assert!(a.m_count().is_power_of_two());
    }

    #[test]
    fn codebook_columns_are_orthonormal() {
        let cb = GsmCodebook::build(6, 3, 2).unwrap();
        let identity = CMatrix::identity(cb.n_rf()).unwrap();
        for m in 0..cb.m_count() {
            let c = cb.matrix(m);
            let gram = c.hermitian().matmul(&c).unwrap();
            assert!(gram.max_abs_diff(&identity) < 1e-12);
        }
    }

    #[test]
    fn large_codebook_builds_matrices_on_demand() {
        // binom(16, 8) = 12870 -> M = 8192; 8192 * 128 * 8 entries exceeds the
        // eager cache limit
        let cb = GsmCodebook::build(16, 8, 8).unwrap();
        assert_eq!(cb.m_count(), 8192);
        assert!(cb.cached_matrices.is_none());
        let c = cb.matrix(8191);
        assert_eq!((c.rows(), c.cols()), (128, 8));
        let gram = c.hermitian().matmul(&c).unwrap();
        assert!(gram.max_abs_diff(&CMatrix::identity(8).unwrap()) < 1e-12);
    }

    proptest! {
        #[test]
        fn codebook_invariants(n_m in 2usize..10, n_k in 1usize..4, n_rf in 1usize..6) {
            prop_assume!(n_rf <= n_m);
            let cb = GsmCodebook::build(n_m, n_k, n_rf).unwrap();
            prop_assert!(cb.m_count().is_power_of_two());
            prop_assert!(cb.m_count() as u64
                <= binomial(n_m as u64, n_rf as u64).unwrap());
            let identity = CMatrix::identity(n_rf).unwrap();
            for m in 0..cb.m_count() {
                let c = cb.matrix(m);
                // orthonormal columns
                let gram = c.hermitian().matmul(&c).unwrap();
                prop_assert!(gram.max_abs_diff(&identity) < 1e-12);
                // unit column power
                for j in 0..n_rf {
                    let power: f64 = (0..c.rows()).map(|i| c.get(i, j).norm_sqr()).sum();
                    prop_assert!((power - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
