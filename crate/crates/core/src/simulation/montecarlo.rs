//! Size and power studies.
//!
//! Replication `i` of a study with master seed `s` draws its data from
//! [`replication_seed`]`(s, i)`, so a study gives identical results whether
//! its replications run serially or in parallel, and two studies sharing a
//! master seed see identical data.

use rayon::prelude::*;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::critical::realize_truncation;
use crate::error::{Error, Result};
use crate::inference::{decide, run_test, TestConfig, TestReport};
use crate::scan::{scan_statistic, ScanResult};
use crate::simulation::dgp::{draw_dgp, DgpSpec};

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of replication `index`: the `index`-th output of a SplitMix64 stream
/// started at `master`, i.e. `mix64(master + (index + 1) * GOLDEN_GAMMA)`.
pub fn replication_seed(master: u64, index: u64) -> u64 {
    mix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Reject,
    Accept,
    /// Degenerate calibration or failed draw; counted as a non-rejection.
    Flagged,
}

impl Outcome {
    pub fn from_report(report: &TestReport) -> Self {
        if report.reject {
            Outcome::Reject
        } else if !report.flags.is_empty() {
            Outcome::Flagged
        } else {
            Outcome::Accept
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub rejections: u64,
    pub reps: u64,
    pub flagged: u64,
    pub rate: f64,
    /// Exact (Clopper-Pearson) 95% interval for the rejection probability.
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl McSummary {
    pub fn from_counts(rejections: u64, reps: u64, flagged: u64) -> Self {
        let rate = if reps == 0 {
            0.0
        } else {
            rejections as f64 / reps as f64
        };
        let (ci_lo, ci_hi) = clopper_pearson(rejections, reps, 0.05);
        Self {
            rejections,
            reps,
            flagged,
            rate,
            ci_lo,
            ci_hi,
        }
    }

    /// Binomial standard error `sqrt(p (1 - p) / R)` at the observed rate.
    pub fn std_error(&self) -> f64 {
        (self.rate * (1.0 - self.rate) / self.reps as f64).sqrt()
    }
}

/// Exact binomial `1 - level` confidence interval for `k` successes in `n`.
pub fn clopper_pearson(k: u64, n: u64, level: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 {
        0.0
    } else {
        Beta::new(kf, nf - kf + 1.0)
            .expect("positive shapes")
            .inverse_cdf(level / 2.0)
    };
    let hi = if k == n {
        1.0
    } else {
        Beta::new(kf + 1.0, nf - kf)
            .expect("positive shapes")
            .inverse_cdf(1.0 - level / 2.0)
    };
    (lo, hi)
}

/// Runs `reps` replications of `trial`, each returning one outcome per
/// tracked procedure, and summarizes each procedure separately.
pub fn monte_carlo_multi<F>(reps: u64, seed: u64, procedures: usize, trial: F) -> Vec<McSummary>
where
    F: Fn(u64) -> Vec<Outcome> + Sync,
{
    let counts = (0..reps)
        .into_par_iter()
        .map(|i| {
            let out = trial(replication_seed(seed, i));
            debug_assert_eq!(out.len(), procedures);
            out
        })
        .fold(
            || vec![(0u64, 0u64); procedures],
            |mut acc, out| {
                for (a, o) in acc.iter_mut().zip(out) {
                    match o {
                        Outcome::Reject => a.0 += 1,
                        Outcome::Flagged => a.1 += 1,
                        Outcome::Accept => {}
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![(0u64, 0u64); procedures],
            |a, b| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x.0 + y.0, x.1 + y.1))
                    .collect()
            },
        );
    counts
        .into_iter()
        .map(|(r, f)| McSummary::from_counts(r, reps, f))
        .collect()
}

pub fn monte_carlo<F>(reps: u64, seed: u64, trial: F) -> McSummary
where
    F: Fn(u64) -> Outcome + Sync,
{
    monte_carlo_multi(reps, seed, 1, |s| vec![trial(s)]).remove(0)
}

/// Rejection rates of several test configurations on the same draws.
///
/// The scan is shared between configurations whose truncation levels
/// coincide on a draw.
pub fn mc_rejections(
    spec: &DgpSpec,
    configs: &[TestConfig],
    reps: u64,
    seed: u64,
) -> Result<Vec<McSummary>> {
    spec.validate()?;
    for c in configs {
        c.rule.validate()?;
        c.contact.validate()?;
        crate::critical::gumbel_r(c.alpha)?;
    }
    Ok(monte_carlo_multi(reps, seed, configs.len(), |s| {
        let Ok(sample) = draw_dgp(&spec.with_seed(s)) else {
            return vec![Outcome::Flagged; configs.len()];
        };
        let mut scans: Vec<(f64, ScanResult)> = Vec::new();
        configs
            .iter()
            .map(|cfg| {
                let Ok(sigma) = realize_truncation(&cfg.rule, &sample) else {
                    return Outcome::Flagged;
                };
                let scan = match scans.iter().find(|(v, _)| *v == sigma) {
                    Some((_, scan)) => scan.clone(),
                    None => match scan_statistic(&sample, sigma) {
                        Ok(scan) => {
                            scans.push((sigma, scan.clone()));
                            scan
                        }
                        Err(_) => return Outcome::Flagged,
                    },
                };
                decide(&sample, cfg, sigma, &scan)
                    .map_or(Outcome::Flagged, |r| Outcome::from_report(&r))
            })
            .collect()
    }))
}

/// Empirical size under a null-satisfying process.
pub fn mc_size(spec: &DgpSpec, config: &TestConfig, reps: u64, seed: u64) -> Result<McSummary> {
    if !spec.mean.satisfies_null() {
        return Err(Error::InvalidSpec(format!(
            "size study needs a null-satisfying mean, got {:?}",
            spec.mean
        )));
    }
    Ok(mc_rejections(spec, std::slice::from_ref(config), reps, seed)?.remove(0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerPoint {
    /// Index into the alternatives passed to [`mc_power`].
    pub alternative: usize,
    pub n: usize,
    pub summary: McSummary,
}

/// Rejection rates for each alternative at each sample size.
///
/// Every `(alternative, n)` cell uses the same master seed.
pub fn mc_power(
    alternatives: &[DgpSpec],
    n_grid: &[usize],
    config: &TestConfig,
    reps: u64,
    seed: u64,
) -> Result<Vec<PowerPoint>> {
    let mut out = Vec::with_capacity(alternatives.len() * n_grid.len());
    for (a, spec) in alternatives.iter().enumerate() {
        for &n in n_grid {
            let spec = DgpSpec { n, ..*spec };
            let summary = mc_rejections(&spec, std::slice::from_ref(config), reps, seed)?.remove(0);
            out.push(PowerPoint {
                alternative: a,
                n,
                summary,
            });
        }
    }
    Ok(out)
}

/// Single test on one draw, exposed for harnesses that need the full report.
pub fn run_on_draw(spec: &DgpSpec, config: &TestConfig) -> Result<TestReport> {
    run_test(&draw_dgp(spec)?, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::dgp::MeanFn;

    #[test]
    fn seed_stream_is_fixed() {
        // SplitMix64 reference outputs for state 0
        assert_eq!(replication_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(replication_seed(0, 1), 0x6E78_9E6A_A1B9_65F4);
        assert_ne!(replication_seed(1, 0), replication_seed(0, 0));
    }

    #[test]
    fn clopper_pearson_edges() {
        let (lo, hi) = clopper_pearson(0, 1, 0.05);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.975).abs() < 1e-9);
        let (lo, hi) = clopper_pearson(1, 1, 0.05);
        assert!((lo - 0.025).abs() < 1e-9);
        assert_eq!(hi, 1.0);
        // k = 5 of 100: reference (0.016431, 0.112835)
        let (lo, hi) = clopper_pearson(5, 100, 0.05);
        assert!((lo - 0.016_431).abs() < 1e-5, "{lo}");
        assert!((hi - 0.112_835).abs() < 1e-5, "{hi}");
    }

    #[test]
    fn single_rep_summary() {
        let spec = DgpSpec::new(MeanFn::Zero, 50, 0);
        let s = mc_size(&spec, &TestConfig::default(), 1, 9).unwrap();
        assert_eq!(s.reps, 1);
        assert!(s.rate == 0.0 || s.rate == 1.0);
        assert!(s.ci_lo <= s.rate && s.rate <= s.ci_hi);
    }

    #[test]
    fn size_requires_null() {
        let spec = DgpSpec::new(MeanFn::Constant(-0.1), 50, 0);
        assert!(mc_size(&spec, &TestConfig::default(), 10, 0).is_err());
    }

    #[test]
    fn deterministic_studies() {
        let spec = DgpSpec::new(MeanFn::Zero, 100, 0);
        let cfg = TestConfig::default();
        let a = mc_size(&spec, &cfg, 50, 42).unwrap();
        let b = mc_size(&spec, &cfg, 50, 42).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let c = pool.install(|| mc_size(&spec, &cfg, 50, 42).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn slack_null_rarely_rejects() {
        let spec = DgpSpec::new(MeanFn::Constant(1.0), 200, 0);
        let s = mc_size(&spec, &TestConfig::default(), 100, 3).unwrap();
        assert_eq!(s.rejections, 0);
    }

    #[test]
    fn identical_alternative_matches_size() {
        let spec = DgpSpec::new(MeanFn::Zero, 150, 0);
        let cfg = TestConfig::default();
        let size = mc_size(&spec, &cfg, 100, 5).unwrap();
        let power = mc_power(&[spec], &[150], &cfg, 100, 5).unwrap();
        assert_eq!(power[0].summary, size);
    }
}
