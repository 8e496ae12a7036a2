//! Distance learning from sorted SNR samples.
//!
//! Every sample has its median at the SNR a user at the true MBS distance
//! would produce, so the map `f(x) = d1·10^((x-γ_T)/37.6)` turns the sorted
//! samples into distance thresholds whose coverage follows a Binomial(K, 1/2)
//! law.

use crate::channel::PATH_LOSS_SLOPE_DB;
use crate::error::{Error, Result};

/// The `K` SNR samples in dB, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrSampleSet {
    sorted: Vec<f64>,
}

impl SnrSampleSet {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("SNR sample set"));
        }
        if let Some(bad) = samples.iter().find(|s| s.is_nan()) {
            return Err(Error::domain(
                "SNR sample",
                *bad,
                "finite or infinite dB value",
            ));
        }
        samples.sort_by(f64::total_cmp);
        Ok(SnrSampleSet { sorted: samples })
    }

    /// Number of samples `K`.
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted_db(&self) -> &[f64] {
        &self.sorted
    }

    /// Locate `distance` among the learned thresholds `f(γ̄(k))`.
    pub fn boundary_index(&self, distance: f64, d1: f64, gamma_t_db: f64) -> BoundaryIndex {
        BoundaryIndex::locate(&self.sorted, distance, |x| f_map(x, d1, gamma_t_db))
    }

    /// Probability bounds on `{d0 >= d0e}`.
    pub fn bounds(&self, d0e: f64, d1: f64, gamma_t_db: f64) -> ProbBounds {
        theorem_bounds(self.len(), self.boundary_index(d0e, d1, gamma_t_db))
    }
}

/// Learned distance corresponding to an SNR sample.
pub fn f_map(x_db: f64, d1: f64, gamma_t_db: f64) -> f64 {
    d1 * 10f64.powf((x_db - gamma_t_db) / PATH_LOSS_SLOPE_DB)
}

/// Where a boundary distance falls relative to the sorted thresholds
/// `f(γ̄(1)) ≤ … ≤ f(γ̄(K))`. Intervals are closed on the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryIndex {
    /// `d < f(γ̄(1))`.
    Below,
    /// `f(γ̄(k)) ≤ d < f(γ̄(k+1))`, `1 ≤ k ≤ K-1`.
    Between(usize),
    /// `d ≥ f(γ̄(K))`.
    Above,
}

impl BoundaryIndex {
    /// Binary search over ascending `sorted`, mapped through the increasing `map`.
    pub fn locate(sorted: &[f64], distance: f64, map: impl Fn(f64) -> f64) -> Self {
        let count = sorted.partition_point(|&x| map(x) <= distance);
        Self::from_count(count, sorted.len())
    }

    /// Build from the number of thresholds at or below the boundary.
    pub fn from_count(count: usize, k_total: usize) -> Self {
        match count {
            0 => BoundaryIndex::Below,
            c if c >= k_total => BoundaryIndex::Above,
            c => BoundaryIndex::Between(c),
        }
    }

    /// Number of thresholds at or below the boundary, in `0..=K`.
    pub fn count(self, k_total: usize) -> usize {
        match self {
            BoundaryIndex::Below => 0,
            BoundaryIndex::Between(k) => k,
            BoundaryIndex::Above => k_total,
        }
    }
}

/// Closed probability interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Bounds on `Pr{d0 >= d0e}` for a boundary located at `index` among `K` samples.
pub fn theorem_bounds(k_total: usize, index: BoundaryIndex) -> ProbBounds {
    let c = index.count(k_total);
    ProbBounds {
        lower: binom_tail_half(k_total, c + 1),
        upper: binom_tail_half(k_total, c),
    }
}

/// `Pr{Binomial(K, 1/2) >= k}`.
pub fn binom_tail_half(k_total: usize, k: usize) -> f64 {
    binom_range_half(k_total, k, k_total)
}

/// `Pr{Binomial(K, 1/2) <= k}`.
pub fn binom_cdf_half(k_total: usize, k: usize) -> f64 {
    binom_range_half(k_total, 0, k)
}

/// Largest `K` for which the coefficient sums stay below 2^53 and the
/// integer path is exact.
const EXACT_MAX_K: usize = 53;

/// `Pr{lo <= Binomial(K, 1/2) <= hi}` without forming `2^K` or raw
/// coefficients once `K` leaves the exactly representable range.
pub fn binom_range_half(k_total: usize, lo: usize, hi: usize) -> f64 {
    let hi = hi.min(k_total);
    if lo > hi {
        return 0.0;
    }
    if lo == 0 && hi == k_total {
        return 1.0;
    }
    if k_total <= EXACT_MAX_K {
        exact_range(k_total, lo, hi)
    } else {
        scaled_range(k_total, lo, hi)
    }
}

fn exact_range(k_total: usize, lo: usize, hi: usize) -> f64 {
    let n = k_total as u64;
    let mut coeff: u64 = 1;
    let mut sum: u64 = 0;
    for i in 0..=hi as u64 {
        if i >= lo as u64 {
            sum += coeff;
        }
        coeff = coeff * (n - i) / (i + 1);
    }
    sum as f64 * 0.5f64.powi(k_total as i32)
}

/// Terms are scaled so the central coefficient is one; the ratio of the
/// in-range mass to the total mass is the probability.
fn scaled_range(k_total: usize, lo: usize, hi: usize) -> f64 {
    let n = k_total as f64;
    let mode = k_total / 2;
    let mut terms = vec![0.0f64; k_total + 1];
    terms[mode] = 1.0;
    for i in mode..k_total {
        terms[i + 1] = terms[i] * (n - i as f64) / (i as f64 + 1.0);
    }
    for i in (1..=mode).rev() {
        terms[i - 1] = terms[i] * i as f64 / (n - i as f64 + 1.0);
    }
    let total = compensated_sum(terms.iter().copied());
    let part = compensated_sum(terms[lo..=hi].iter().copied());
    (part / total).clamp(0.0, 1.0)
}

/// Neumaier summation.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
