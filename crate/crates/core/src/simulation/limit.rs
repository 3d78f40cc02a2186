//! Extremes of standardized Brownian increments.
//!
//! For a Brownian path `B` on `[0, T]` this simulates
//!
//! ```text
//! M = -min { (B(s + t) - B(s)) / sqrt(t) : 0 <= s <= s + t <= T, t >= 1 }
//! ```
//!
//! on a grid of step `step`, and normalizes it as `a_T (M - b_T)` with
//! `a_T = (2 log T)^{1/2}` and
//! `b_T = a_T + (3/2 log log T - log(2 sqrt(pi))) / a_T`, whose limit law is
//! the standard Gumbel distribution.
//!
//! The grid minimum covers a subset of the continuum pairs, so it can only
//! understate `M`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::critical::gumbel_cdf;
use crate::error::{Error, Result};
use crate::simulation::montecarlo::replication_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitSimConfig {
    /// Horizon `T`.
    pub horizon: f64,
    /// Grid step in both `s` and `t`.
    pub step: f64,
    /// Shortest admissible increment length.
    pub min_t: f64,
    pub reps: u64,
    pub seed: u64,
}

impl LimitSimConfig {
    pub fn new(horizon: f64, step: f64, reps: u64, seed: u64) -> Self {
        Self {
            horizon,
            step,
            min_t: 1.0,
            reps,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.step > 0.0 && self.step <= 0.5) {
            return bad(format!("step must lie in (0, 0.5], got {}", self.step));
        }
        if !(self.min_t > 0.0 && self.min_t.is_finite()) {
            return bad(format!("min_t must be positive, got {}", self.min_t));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.min_t + self.step - 1e-12) {
            return bad(format!(
                "horizon must be at least min_t + step = {}, got {}",
                self.min_t + self.step,
                self.horizon
            ));
        }
        if self.horizon.is_nan() || self.horizon <= 1.0 {
            return bad(format!(
                "horizon must exceed 1 for the normalization, got {}",
                self.horizon
            ));
        }
        if self.reps == 0 {
            return bad("reps must be positive".into());
        }
        Ok(())
    }

    /// Number of grid steps covering `[0, T]`.
    pub fn steps(&self) -> usize {
        (self.horizon / self.step + 1e-9).floor() as usize
    }

    /// Smallest lag, in grid steps, with `lag * step >= min_t`.
    pub fn min_lag(&self) -> usize {
        (self.min_t / self.step - 1e-9).ceil().max(1.0) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitSummary {
    /// Raw maxima `M`, in replication order.
    pub maxima: Vec<f64>,
    /// `a_T (M - b_T)`, sorted ascending.
    pub normalized: Vec<f64>,
    /// Kolmogorov-Smirnov distance of `normalized` to the standard Gumbel.
    pub ks_distance: f64,
    pub a_t: f64,
    pub b_t: f64,
}

/// `(a_T, b_T)` for horizon `T > 1`.
pub fn normalizing_constants(horizon: f64) -> (f64, f64) {
    let a = (2.0 * horizon.ln()).sqrt();
    let b = a + (1.5 * horizon.ln().ln() - (2.0 * PI.sqrt()).ln()) / a;
    (a, b)
}

/// Brownian path at `0, step, ..., steps * step`, starting at 0.
pub fn brownian_path(steps: usize, step: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = step.sqrt();
    let mut path = Vec::with_capacity(steps + 1);
    let mut b = 0.0;
    path.push(b);
    for _ in 0..steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        b += sd * z;
        path.push(b);
    }
    path
}

/// Scratch buffers for [`min_increment`].
#[derive(Default)]
struct SlidingMax {
    /// Running max from the end of each block back to each index.
    suffix: Vec<f64>,
    /// Running max from the start of each block up to each index.
    prefix: Vec<f64>,
}

/// Smallest increment `path[j] - path[i]` with `j - i` in `[lag_lo, lag_hi]`,
/// returned with the pair attaining it.
///
/// The window maximum of `path[i]` uses the van Herk/Gil-Werman block
/// decomposition; the start index is recovered afterwards by a scan of the
/// winning window.
fn min_increment(
    path: &[f64],
    lag_lo: usize,
    lag_hi: usize,
    buf: &mut SlidingMax,
) -> (f64, usize, usize) {
    let last = path.len() - 1;
    let starts = &path[..=last - lag_lo];
    let m = starts.len();
    let w = (lag_hi - lag_lo + 1).min(m);

    buf.prefix.clear();
    buf.prefix.resize(m, f64::NEG_INFINITY);
    buf.suffix.clear();
    buf.suffix.resize(m, f64::NEG_INFINITY);
    for (block, (pre, suf)) in starts
        .chunks(w)
        .zip(buf.prefix.chunks_mut(w).zip(buf.suffix.chunks_mut(w)))
    {
        let mut run = f64::NEG_INFINITY;
        for (v, out) in block.iter().zip(pre.iter_mut()) {
            run = run.max(*v);
            *out = run;
        }
        let mut run = f64::NEG_INFINITY;
        for (v, out) in block.iter().zip(suf.iter_mut()).rev() {
            run = run.max(*v);
            *out = run;
        }
    }

    let (prefix, suffix) = (&buf.prefix, &buf.suffix);
    let mut best = f64::INFINITY;
    let mut best_end = 0;
    // windows shorter than w at the left edge lie inside the first block
    for end in 0..w.min(m) {
        let inc = path[end + lag_lo] - prefix[end];
        if inc < best {
            best = inc;
            best_end = end;
        }
    }
    for end in w..m {
        let top = suffix[end + 1 - w].max(prefix[end]);
        let inc = path[end + lag_lo] - top;
        if inc < best {
            best = inc;
            best_end = end;
        }
    }
    let j = best_end + lag_lo;
    let first = (best_end + 1).saturating_sub(w);
    let top = path[j] - best;
    let i = (first..=best_end)
        .find(|&i| path[i] == top)
        .unwrap_or_else(|| {
            // rounding in `path[j] - best` can miss the exact value
            (first..=best_end)
                .max_by(|&a, &b| path[a].total_cmp(&path[b]))
                .expect("nonempty window")
        });
    (path[j] - path[i], i, j)
}

#[derive(Debug, PartialEq)]
struct Block {
    bound: f64,
    lag_lo: usize,
    lag_hi: usize,
}

impl Eq for Block {}

impl Ord for Block {
    // Min-heap on the lower bound.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.lag_lo.cmp(&self.lag_lo))
    }
}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact minimum of `(path[j] - path[i]) / sqrt((j - i) step)` over
/// `j - i >= min_lag`, returned with the attaining pair.
///
/// Lag ranges are searched best-first. For lags in `[lo, hi]` the smallest
/// raw increment `d` is found in linear time, giving the lower bound
/// `d / sqrt(lo step)` (or `d / sqrt(hi step)` when `d >= 0`) for the whole
/// range; ranges whose bound cannot beat the incumbent are discarded.
pub fn min_standardized_increment(path: &[f64], step: f64, min_lag: usize) -> (f64, usize, usize) {
    let last = path.len().saturating_sub(1);
    assert!(
        min_lag >= 1 && min_lag <= last,
        "need at least one admissible pair"
    );
    let ratio = |inc: f64, i: usize, j: usize| inc / ((j - i) as f64 * step).sqrt();
    let mut best = (f64::INFINITY, 0, 0);
    let mut heap = BinaryHeap::new();

    let mut scratch = SlidingMax::default();
    let evaluate = |lo: usize,
                    hi: usize,
                    best: &mut (f64, usize, usize),
                    buf: &mut SlidingMax|
     -> Option<Block> {
        let (inc, i, j) = min_increment(path, lo, hi, buf);
        let cand = ratio(inc, i, j);
        if cand < best.0 || (cand == best.0 && (i, j) < (best.1, best.2)) {
            *best = (cand, i, j);
        }
        let bound = if inc < 0.0 {
            inc / (lo as f64 * step).sqrt()
        } else {
            inc / (hi as f64 * step).sqrt()
        };
        (lo < hi && bound < best.0).then_some(Block {
            bound,
            lag_lo: lo,
            lag_hi: hi,
        })
    };

    if let Some(b) = evaluate(min_lag, last, &mut best, &mut scratch) {
        heap.push(b);
    }
    while let Some(block) = heap.pop() {
        if block.bound >= best.0 {
            break;
        }
        let mid = block.lag_lo + (block.lag_hi - block.lag_lo) / 2;
        for (lo, hi) in [(block.lag_lo, mid), (mid + 1, block.lag_hi)] {
            if let Some(b) = evaluate(lo, hi, &mut best, &mut scratch) {
                heap.push(b);
            }
        }
    }
    best
}

/// Brute-force counterpart of [`min_standardized_increment`], quadratic in
/// the path length.
pub fn min_standardized_increment_brute(path: &[f64], step: f64, min_lag: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..path.len() {
        for j in i + min_lag..path.len() {
            best = best.min((path[j] - path[i]) / ((j - i) as f64 * step).sqrt());
        }
    }
    best
}

/// `M` for one replication seed.
pub fn simulate_maximum(config: &LimitSimConfig, seed: u64) -> f64 {
    let path = brownian_path(config.steps(), config.step, seed);
    -min_standardized_increment(&path, config.step, config.min_lag()).0
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `sorted` and `cdf`.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0f64, |d, (i, &v)| {
        let f = cdf(v);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    })
}

/// Simulates `reps` normalized maxima and their distance to the Gumbel law.
pub fn simulate_limit_infimum(config: &LimitSimConfig) -> Result<LimitSummary> {
    config.validate()?;
    let maxima: Vec<f64> = (0..config.reps)
        .into_par_iter()
        .map(|i| simulate_maximum(config, replication_seed(config.seed, i)))
        .collect();
    let (a_t, b_t) = normalizing_constants(config.horizon);
    let mut normalized: Vec<f64> = maxima.iter().map(|m| a_t * (m - b_t)).collect();
    normalized.sort_by(f64::total_cmp);
    let ks = ks_distance(&normalized, gumbel_cdf);
    Ok(LimitSummary {
        maxima,
        normalized,
        ks_distance: ks,
        a_t,
        b_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn pruned_search_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..60 {
            let steps = rng.random_range(12..400);
            let step = [0.05, 0.1, 0.25, 0.5][trial % 4];
            let path = brownian_path(steps, step, rng.random());
            let lag = ((1.0 / step) - 1e-9).ceil() as usize;
            if lag > steps {
                continue;
            }
            let (fast, i, j) = min_standardized_increment(&path, step, lag);
            let brute = min_standardized_increment_brute(&path, step, lag);
            assert_eq!(fast, brute, "trial {trial}");
            assert!(j - i >= lag);
            assert_eq!(fast, (path[j] - path[i]) / ((j - i) as f64 * step).sqrt());
        }
    }

    #[test]
    fn monotone_path_is_handled() {
        let path: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let (v, _, _) = min_standardized_increment(&path, 0.1, 10);
        assert_eq!(v, min_standardized_increment_brute(&path, 0.1, 10));
        assert!(v > 0.0);
    }

    #[test]
    fn min_lag_and_steps() {
        let c = LimitSimConfig::new(1.1, 0.1, 1, 0);
        assert_eq!(c.steps(), 11);
        assert_eq!(c.min_lag(), 10);
        assert!(c.validate().is_ok());
        let c = LimitSimConfig::new(1e4, 0.1, 1, 0);
        assert_eq!(c.steps(), 100_000);
    }

    #[test]
    fn invalid_configs() {
        assert!(LimitSimConfig::new(100.0, 0.6, 10, 0).validate().is_err());
        assert!(LimitSimConfig::new(1.05, 0.1, 10, 0).validate().is_err());
        assert!(LimitSimConfig::new(100.0, 0.1, 0, 0).validate().is_err());
        assert!(simulate_limit_infimum(&LimitSimConfig::new(100.0, 0.0, 10, 0)).is_err());
    }

    #[test]
    fn refinement_can_only_raise_the_maximum() {
        for seed in 0..20 {
            let fine = brownian_path(4000, 0.05, seed);
            let coarse: Vec<f64> = fine.iter().step_by(2).copied().collect();
            let m_fine = -min_standardized_increment(&fine, 0.05, 20).0;
            let m_coarse = -min_standardized_increment(&coarse, 0.1, 10).0;
            assert!(m_fine >= m_coarse, "seed {seed}");
        }
    }

    #[test]
    fn ks_distance_basics() {
        // uniform CDF against evenly placed points
        let pts: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        let d = ks_distance(&pts, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.05).abs() < 1e-12);
    }

    #[test]
    fn summary_is_reproducible() {
        let c = LimitSimConfig::new(50.0, 0.1, 20, 4);
        let a = simulate_limit_infimum(&c).unwrap();
        assert_eq!(a, simulate_limit_infimum(&c).unwrap());
        assert!(a.normalized.windows(2).all(|w| w[0] <= w[1]));
        assert!(a.ks_distance > 0.0 && a.ks_distance <= 1.0);
    }
}
