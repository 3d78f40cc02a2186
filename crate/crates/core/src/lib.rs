//! Variance-weighted Kolmogorov-Smirnov tests of the conditional moment
//! inequality `E(Y | X) >= 0` for a scalar covariate.
//!
//! The statistic is the infimum, over all intervals `(s, s + t)` whose
//! estimated standard deviation exceeds a truncation level `sigma_min`, of the
//! interval mean of `Y` divided by that standard deviation. Its negative part,
//! scaled by `sqrt(n)`, is compared against an analytic Gumbel-type critical
//! value, so no resampling is required.
//!
//! Module map:
//!
//! * [`sample`]: sorted observations with prefix sums and tie groups.
//! * [`scan`]: the exact interval scan and its brute-force oracle.
//! * [`critical`]: Gumbel quantiles, the plug-in scale and critical values.
//! * [`inference`]: the end-to-end test and Bonferroni aggregation.
//! * [`simulation`]: data generating processes, size/power studies and the
//!   Brownian increment limit simulator.

pub mod critical;
pub mod error;
pub mod inference;
pub mod sample;
pub mod scan;
pub mod simulation;

pub use critical::{
    c_hat, critical_value, first_order_critical_value, gumbel_cdf, gumbel_r, realize_truncation,
    CExponent, CriticalValue, TruncationRule,
};
pub use error::{Error, Result};
pub use inference::{
    estimate_contact_set, run_test, run_test_bonferroni, ContactSetSpec, Flag, TestConfig,
    TestReport,
};
pub use sample::{build_sample, interval_moments, IntervalMoments, Sample};
pub use scan::{scan_statistic, scan_statistic_oracle, ScanResult};
