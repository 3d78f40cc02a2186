//! Exact variance-weighted interval scan.
//!
//! Every distinct value of `E_n[Y I(s < X < s + t)]` is produced by some
//! contiguous range of tie groups, so enumerating the `G (G + 1) / 2` group
//! ranges evaluates the infimum over all real `(s, t)` exactly. One-sided
//! intervals correspond to ranges touching either end of the sample.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sample::{IntervalMoments, Sample};

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Infimum of `mean / sd` over feasible ranges, `+inf` when none is feasible.
    pub inf_value: f64,
    /// Negative part of `inf_value`.
    pub t_n: f64,
    /// Group range `[lo, hi)` attaining the infimum. Ranges within
    /// [`TIE_RTOL`] of the infimum count as ties, and the lexicographically
    /// smallest one is reported.
    pub argmin: Option<(usize, usize)>,
    /// Number of ranges with `sd >= sigma_min`.
    pub feasible_count: u64,
}

impl ScanResult {
    pub fn no_feasible_interval(&self) -> bool {
        self.feasible_count == 0
    }
}

/// Relative tolerance under which two ratios are treated as tied.
///
/// Ranges with equal exact ratios are common (every single-observation range
/// has ratio `sign(y) / sqrt(n - 1)`), and rounding would otherwise decide
/// which one is reported.
pub const TIE_RTOL: f64 = 1e-12;

/// `|v|_- = max(-v, 0)`.
pub fn negative_part(v: f64) -> f64 {
    if v < 0.0 {
        -v
    } else {
        0.0
    }
}

fn check_sigma(sigma_min: f64) -> Result<()> {
    if sigma_min.is_finite() && sigma_min > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSigmaMin(sigma_min))
    }
}

#[inline]
fn ratio(m: IntervalMoments, sigma_min: f64) -> Option<f64> {
    (m.sd >= sigma_min).then(|| m.mean / m.sd)
}

/// Minimum ratio and feasible count over the ranges starting at one group.
fn row_summary(groups: usize, lo: usize, ratio_at: impl Fn(usize) -> Option<f64>) -> (f64, u64) {
    let mut min = f64::INFINITY;
    let mut feasible = 0;
    for hi in lo + 1..=groups {
        if let Some(v) = ratio_at(hi) {
            feasible += 1;
            min = min.min(v);
        }
    }
    (min, feasible)
}

/// Picks the lexicographically smallest range within tolerance of the
/// overall minimum, revisiting only rows whose minimum qualifies.
fn settle(
    groups: usize,
    rows: &[(f64, u64)],
    ratio_at: impl Fn(usize, usize) -> Option<f64>,
) -> ScanResult {
    let feasible_count = rows.iter().map(|r| r.1).sum();
    let inf_value = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    if feasible_count == 0 {
        return ScanResult {
            inf_value,
            t_n: 0.0,
            argmin: None,
            feasible_count,
        };
    }
    let threshold = inf_value + TIE_RTOL * inf_value.abs().max(1.0);
    let argmin = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.0 <= threshold)
        .find_map(|(lo, _)| {
            (lo + 1..=groups)
                .find(|&hi| ratio_at(lo, hi).is_some_and(|v| v <= threshold))
                .map(|hi| (lo, hi))
        });
    ScanResult {
        inf_value,
        t_n: negative_part(inf_value),
        argmin,
        feasible_count,
    }
}

/// Infimum of `mean / sd` over all group ranges with `sd >= sigma_min`, using
/// prefix sums. Rows run in parallel and are combined in index order, so the
/// result does not depend on the thread count.
pub fn scan_statistic(sample: &Sample, sigma_min: f64) -> Result<ScanResult> {
    check_sigma(sigma_min)?;
    let starts = sample.group_starts();
    let groups = sample.group_count();
    let ratio_at =
        |lo: usize, hi: usize| ratio(sample.moments_unchecked(starts[lo], starts[hi]), sigma_min);
    let rows: Vec<(f64, u64)> = (0..groups)
        .into_par_iter()
        .with_min_len(16)
        .map(|lo| row_summary(groups, lo, |hi| ratio_at(lo, hi)))
        .collect();
    Ok(settle(groups, &rows, ratio_at))
}

/// Same contract as [`scan_statistic`], computed by re-summing every range
/// directly. Cubic in the number of groups; intended for verification.
pub fn scan_statistic_oracle(sample: &Sample, sigma_min: f64) -> Result<ScanResult> {
    check_sigma(sigma_min)?;
    let groups = sample.group_count();
    let y = sample.y();
    let n = sample.len();
    let ratio_at = |lo: usize, hi: usize| {
        let r = sample
            .observation_range(lo, hi)
            .expect("range within bounds");
        let (mut s1, mut s2) = (0.0, 0.0);
        for &v in &y[r.clone()] {
            s1 += v;
            s2 += v * v;
        }
        ratio(IntervalMoments::from_sums(s1, s2, r.len(), n), sigma_min)
    };
    let rows: Vec<(f64, u64)> = (0..groups)
        .map(|lo| row_summary(groups, lo, |hi| ratio_at(lo, hi)))
        .collect();
    Ok(settle(groups, &rows, ratio_at))
}
