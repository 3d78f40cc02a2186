//! End-to-end test of `E(Y | X) >= 0` and its Bonferroni extension to
//! vector-valued outcomes.

use rayon::prelude::*;

use crate::critical::{
    c_hat, critical_value, first_order_critical_value, gumbel_r, realize_truncation, CExponent,
    TruncationRule,
};
use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::scan::{scan_statistic, ScanResult};

/// Where the moment inequality is taken to bind when computing `c_hat`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ContactSetSpec {
    /// `[min x, max x]`; conservative.
    #[default]
    FullSupport,
    Explicit {
        lo: f64,
        hi: f64,
    },
    /// First-stage estimate from [`estimate_contact_set`]. `None` fields take
    /// the defaults `h = n^(-1/5) * range(x)` and `C = 2`.
    Estimated {
        bandwidth: Option<f64>,
        multiplier: Option<f64>,
    },
}

impl ContactSetSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ContactSetSpec::FullSupport => Ok(()),
            ContactSetSpec::Explicit { lo, hi } => {
                if lo.is_finite() && hi.is_finite() && lo <= hi {
                    Ok(())
                } else {
                    Err(Error::InvalidContactSet(format!("bounds [{lo}, {hi}]")))
                }
            }
            ContactSetSpec::Estimated {
                bandwidth,
                multiplier,
            } => {
                for (name, v) in [("bandwidth", bandwidth), ("multiplier", multiplier)] {
                    if let Some(v) = v {
                        if !(v.is_finite() && v > 0.0) {
                            return Err(Error::InvalidContactSet(format!(
                                "{name} must be positive, got {v}"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Contact bounds for this sample.
    pub fn resolve(&self, sample: &Sample) -> Result<(f64, f64)> {
        self.validate()?;
        Ok(match *self {
            ContactSetSpec::FullSupport => (sample.x_min(), sample.x_max()),
            ContactSetSpec::Explicit { lo, hi } => (lo, hi),
            ContactSetSpec::Estimated {
                bandwidth,
                multiplier,
            } => {
                let h = bandwidth.unwrap_or_else(|| default_bandwidth(sample));
                estimate_contact_set(sample, h, multiplier.unwrap_or(DEFAULT_MULTIPLIER))?
            }
        })
    }
}

pub const DEFAULT_MULTIPLIER: f64 = 2.0;

/// `n^(-1/5) * range(x)`, or 1 when all `x` coincide.
pub fn default_bandwidth(sample: &Sample) -> f64 {
    let range = sample.x_max() - sample.x_min();
    let h = (sample.len() as f64).powf(-0.2) * range;
    if h > 0.0 {
        h
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestConfig {
    pub alpha: f64,
    pub rule: TruncationRule,
    pub contact: ContactSetSpec,
    pub exponent: CExponent,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            rule: TruncationRule::default(),
            contact: ContactSetSpec::FullSupport,
            exponent: CExponent::Squared,
        }
    }
}

/// Conditions under which the test declines to reject regardless of the
/// statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flag {
    NoFeasibleInterval,
    ScaleTooSmall,
    EmptyContactSet,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::NoFeasibleInterval => "NoFeasibleInterval",
            Flag::ScaleTooSmall => "ScaleTooSmall",
            Flag::EmptyContactSet => "EmptyContactSet",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub n: usize,
    pub sigma_min: f64,
    pub contact: (f64, f64),
    /// `None` when the contact set holds no observations.
    pub c_hat: Option<f64>,
    pub r: f64,
    /// Level the decision is taken at (overall level for Bonferroni reports).
    pub alpha: f64,
    pub inf_value: f64,
    pub t_n: f64,
    /// `sqrt(n) * T_n`.
    pub statistic: f64,
    /// `None` when `log(c_hat) <= 1` or `c_hat` is undefined.
    pub cv: Option<f64>,
    pub first_order: f64,
    pub reject: bool,
    /// Group range attaining the infimum, mapped to `[x_lo, x_hi]`.
    pub argmin_x: Option<(f64, f64)>,
    pub feasible_count: u64,
    pub flags: Vec<Flag>,
    pub config: TestConfig,
    /// Per-coordinate reports, each at level `alpha / K`. Empty for scalar tests.
    pub coordinates: Vec<TestReport>,
    /// Coordinate whose fields populate the top-level summary.
    pub driving_coordinate: Option<usize>,
}

impl TestReport {
    /// `statistic - cv`, when the critical value is defined.
    pub fn margin(&self) -> Option<f64> {
        self.cv.map(|cv| self.statistic - cv)
    }
}

/// Runs the test on a scalar outcome.
///
/// Degenerate calibrations (no feasible interval, an empty contact set, or
/// `log(c_hat) <= 1`) are reported as flagged non-rejections. Invalid
/// configuration is an error.
pub fn run_test(sample: &Sample, config: &TestConfig) -> Result<TestReport> {
    let sigma_min = realize_truncation(&config.rule, sample)?;
    let scan = scan_statistic(sample, sigma_min)?;
    decide(sample, config, sigma_min, &scan)
}

/// Decision step of [`run_test`] given a precomputed scan at `sigma_min`.
pub fn decide(
    sample: &Sample,
    config: &TestConfig,
    sigma_min: f64,
    scan: &ScanResult,
) -> Result<TestReport> {
    let r = gumbel_r(config.alpha)?;
    let contact = config.contact.resolve(sample)?;
    let mut flags = Vec::new();
    if scan.no_feasible_interval() {
        flags.push(Flag::NoFeasibleInterval);
    }
    let c = match c_hat(sample, contact.0, contact.1, sigma_min, config.exponent) {
        Ok(c) => Some(c),
        Err(Error::EmptyContactSet { .. }) => {
            flags.push(Flag::EmptyContactSet);
            None
        }
        Err(e) => return Err(e),
    };
    let cv = match c.map(|c| critical_value(c, r)) {
        Some(Ok(v)) => Some(v),
        Some(Err(Error::ScaleTooSmall { .. })) => {
            flags.push(Flag::ScaleTooSmall);
            None
        }
        Some(Err(e)) => return Err(e),
        None => None,
    };
    let statistic = (sample.len() as f64).sqrt() * scan.t_n;
    let reject = flags.is_empty() && cv.is_some_and(|cv| statistic > cv);
    let argmin_x = scan.argmin.map(|(lo, hi)| {
        let obs = sample
            .observation_range(lo, hi)
            .expect("argmin within sample");
        (sample.x()[obs.start], sample.x()[obs.end - 1])
    });
    Ok(TestReport {
        n: sample.len(),
        sigma_min,
        contact,
        c_hat: c,
        r,
        alpha: config.alpha,
        inf_value: scan.inf_value,
        t_n: scan.t_n,
        statistic,
        cv,
        first_order: first_order_critical_value(sigma_min),
        reject,
        argmin_x,
        feasible_count: scan.feasible_count,
        flags,
        config: *config,
        coordinates: Vec::new(),
        driving_coordinate: None,
    })
}

/// Tests each coordinate at level `alpha / K` and rejects if any coordinate
/// does. With `K = 1` this is exactly [`run_test`].
///
/// The top-level fields of a `K >= 2` report are copied from the coordinate
/// with the largest `statistic - cv` (largest statistic if no coordinate has
/// a defined critical value), with `alpha` and `reject` replaced by the
/// overall level and decision.
pub fn run_test_bonferroni(samples: &[Sample], config: &TestConfig) -> Result<TestReport> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidSpec("need at least one outcome coordinate".into()))?;
    if let Some(index) = samples.iter().position(|s| s.x() != first.x()) {
        return Err(Error::MismatchedCovariates { index });
    }
    if samples.len() == 1 {
        return run_test(first, config);
    }
    gumbel_r(config.alpha)?;
    let per = TestConfig {
        alpha: config.alpha / samples.len() as f64,
        ..*config
    };
    let coordinates = samples
        .par_iter()
        .map(|s| run_test(s, &per))
        .collect::<Result<Vec<_>>>()?;

    let key = |r: &TestReport| match r.margin() {
        Some(m) => (1u8, m),
        None => (0u8, r.statistic),
    };
    let mut driving = 0;
    for (i, rep) in coordinates.iter().enumerate().skip(1) {
        let (a, b) = (key(rep), key(&coordinates[driving]));
        if a.0 > b.0 || (a.0 == b.0 && a.1 > b.1) {
            driving = i;
        }
    }
    let mut top = coordinates[driving].clone();
    top.alpha = config.alpha;
    top.config = *config;
    top.reject = coordinates.iter().any(|c| c.reject);
    top.driving_coordinate = Some(driving);
    top.coordinates = coordinates;
    Ok(top)
}

/// First-stage estimate of the region where `E(Y | X)` is near zero.
///
/// Computes local averages `m(x)` over windows `|X - x| <= h` at each
/// distinct covariate value and returns the smallest and largest `x` with
/// `m(x) <= C sqrt(log n / (n h))`. Falls back to the full support if no
/// point qualifies.
pub fn estimate_contact_set(sample: &Sample, h: f64, multiplier: f64) -> Result<(f64, f64)> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidContactSet(format!(
            "bandwidth must be positive, got {h}"
        )));
    }
    if !(multiplier.is_finite() && multiplier > 0.0) {
        return Err(Error::InvalidContactSet(format!(
            "multiplier must be positive, got {multiplier}"
        )));
    }
    let n = sample.len() as f64;
    let threshold = multiplier * (n.ln() / (n * h)).sqrt();
    let x = sample.x();
    let p1 = sample.p1();
    let mut bounds: Option<(f64, f64)> = None;
    for g in 0..sample.group_count() {
        let at = sample.group_x(g);
        let start = x.partition_point(|&v| v < at - h);
        let end = x.partition_point(|&v| v <= at + h);
        let local = (p1[end] - p1[start]) / (end - start) as f64;
        if local <= threshold {
            bounds = Some(match bounds {
                None => (at, at),
                Some((lo, _)) => (lo, at),
            });
        }
    }
    Ok(bounds.unwrap_or((sample.x_min(), sample.x_max())))
}
