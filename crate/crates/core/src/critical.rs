//! Analytic extreme-value critical values.
//!
//! With `c` the effective number of independent scales and `r` a Gumbel
//! quantile, the critical value for `sqrt(n) T_n` is
//!
//! ```text
//! (2 log c)^{1/2} + (3/2 log log c - log(2 sqrt(pi)) + r) / (2 log c)^{1/2}
//! ```
//!
//! and the limit law of the normalized statistic is `exp(-exp(-r))`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sample::Sample;

/// Truncation level `sigma_min` for the scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationRule {
    Explicit(f64),
    /// `sigma_min = kappa * sd(y) * n^(-delta)`, `0 < delta < 1/2`.
    Schedule {
        kappa: f64,
        delta: f64,
    },
}

impl Default for TruncationRule {
    fn default() -> Self {
        TruncationRule::Schedule {
            kappa: 1.0,
            delta: 0.25,
        }
    }
}

impl TruncationRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TruncationRule::Explicit(v) if v.is_finite() && v > 0.0 => Ok(()),
            TruncationRule::Explicit(v) => Err(Error::InvalidSigmaMin(v)),
            TruncationRule::Schedule { kappa, delta } => {
                if !(kappa.is_finite() && kappa > 0.0) {
                    Err(Error::InvalidSchedule(format!(
                        "kappa must be positive, got {kappa}"
                    )))
                } else if !(delta > 0.0 && delta < 0.5) {
                    Err(Error::InvalidSchedule(format!(
                        "delta must lie in (0, 1/2), got {delta}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Power of `sigma_min` dividing the contact-set second moment in `c_hat`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CExponent {
    /// `E_n[Y^2 I] / sigma_min^2`: a ratio of variances.
    #[default]
    Squared,
    /// `E_n[Y^2 I] / sigma_min`, kept for sensitivity checks.
    Linear,
}

impl CExponent {
    pub fn power(self) -> i32 {
        match self {
            CExponent::Squared => 2,
            CExponent::Linear => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValue {
    pub c_hat: f64,
    pub r: f64,
    pub alpha: f64,
    pub cv: f64,
    pub first_order: f64,
}

impl CriticalValue {
    /// Assembles the critical value for level `alpha` at scale `c_hat`.
    pub fn new(c_hat: f64, alpha: f64, sigma_min: f64) -> Result<Self> {
        let r = gumbel_r(alpha)?;
        let cv = critical_value(c_hat, r)?;
        Ok(Self {
            c_hat,
            r,
            alpha,
            cv,
            first_order: first_order_critical_value(sigma_min),
        })
    }
}

/// Standard Gumbel CDF `exp(-exp(-r))`.
pub fn gumbel_cdf(r: f64) -> f64 {
    (-(-r).exp()).exp()
}

/// Solves `exp(-exp(-r)) = 1 - alpha`.
pub fn gumbel_r(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    // -ln(-ln(1 - a)) with ln_1p keeps precision for small alpha
    Ok(-(-(-alpha).ln_1p()).ln())
}

/// Critical value for `sqrt(n) T_n` at scale `c` and Gumbel quantile `r`.
pub fn critical_value(c: f64, r: f64) -> Result<f64> {
    let log_c = c.ln();
    if !(log_c.is_finite() && log_c > 1.0) {
        return Err(Error::ScaleTooSmall { c });
    }
    let a = (2.0 * log_c).sqrt();
    let shift = 1.5 * log_c.ln() - (2.0 * PI.sqrt()).ln() + r;
    Ok(a + shift / a)
}

/// First-order approximation `(2 log(1 / sigma_min^2))^{1/2}` to the critical
/// value for `sqrt(n) T_n`. NaN when `sigma_min >= 1`.
pub fn first_order_critical_value(sigma_min: f64) -> f64 {
    (-2.0 * (sigma_min * sigma_min).ln()).sqrt()
}

/// Plug-in scale `E_n[Y^2 I(lo <= X <= hi)] / sigma_min^p`.
pub fn c_hat(
    sample: &Sample,
    contact_lo: f64,
    contact_hi: f64,
    sigma_min: f64,
    exponent: CExponent,
) -> Result<f64> {
    if contact_lo.is_nan() || contact_hi.is_nan() || contact_lo > contact_hi {
        return Err(Error::InvalidContactSet(format!(
            "lower bound {contact_lo} exceeds upper bound {contact_hi}"
        )));
    }
    if !(sigma_min.is_finite() && sigma_min > 0.0) {
        return Err(Error::InvalidSigmaMin(sigma_min));
    }
    let x = sample.x();
    let start = x.partition_point(|&v| v < contact_lo);
    let end = x.partition_point(|&v| v <= contact_hi);
    if start >= end {
        return Err(Error::EmptyContactSet {
            lo: contact_lo,
            hi: contact_hi,
        });
    }
    let second = (sample.p2()[end] - sample.p2()[start]) / sample.len() as f64;
    Ok(second / sigma_min.powi(exponent.power()))
}

/// Realized `sigma_min` for the sample.
pub fn realize_truncation(rule: &TruncationRule, sample: &Sample) -> Result<f64> {
    rule.validate()?;
    let sigma = match *rule {
        TruncationRule::Explicit(v) => v,
        TruncationRule::Schedule { kappa, delta } => {
            kappa * sample.y_sd() * (sample.len() as f64).powf(-delta)
        }
    };
    if sigma.is_finite() && sigma > 0.0 {
        Ok(sigma)
    } else {
        Err(Error::InvalidSchedule(format!(
            "realized sigma_min {sigma} is not positive (is y constant?)"
        )))
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::sample::build_sample;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    #[test]
    fn gumbel_unit_case() {
        let r = gumbel_r(1.0 - (-1.0f64).exp()).unwrap();
        assert!(r.abs() < 1e-15);
    }

    #[test]
    fn gumbel_five_percent() {
        // mpmath at 40 digits: 2.9701952490421645591
        assert_relative_eq!(
            gumbel_r(0.05).unwrap(),
            2.970_195_249_042_164_6,
            max_relative = 1e-14
        );
    }

    #[test]
    fn gumbel_round_trip() {
        for a in [0.01, 0.05, 0.1] {
            let back = 1.0 - gumbel_cdf(gumbel_r(a).unwrap());
            assert!((back - a).abs() < 1e-12, "{a} -> {back}");
        }
    }

    #[test]
    fn alpha_bounds() {
        for a in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(matches!(gumbel_r(a), Err(Error::AlphaOutOfRange(_))));
        }
    }

    #[test]
    fn closed_form_values() {
        // mpmath at 40 digits
        let ee = E.exp();
        assert_relative_eq!(
            critical_value(ee, 0.0).unwrap(),
            2.432_211_597_565_122_7,
            max_relative = 1e-13
        );
        let r = gumbel_r(0.05).unwrap();
        assert_relative_eq!(
            critical_value(ee, r).unwrap(),
            3.706_074_705_520_243_3,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            critical_value(100.0, r).unwrap(),
            4.351_376_313_403_752_3,
            max_relative = 1e-13
        );
    }

    #[test]
    fn scale_too_small_at_boundary() {
        assert_eq!(critical_value(E, 0.0), Err(Error::ScaleTooSmall { c: E }));
        assert!(critical_value(1.0, 0.0).is_err());
        assert!(critical_value(0.0, 0.0).is_err());
        assert!(critical_value(f64::NAN, 0.0).is_err());
        assert!(critical_value(f64::INFINITY, 0.0).is_err());
        let msg = Error::ScaleTooSmall { c: E }.to_string();
        assert!(msg.contains("decrease sigma_min"));
    }

    #[test]
    fn c_hat_constant_data() {
        let s = build_sample(&[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).unwrap();
        assert_eq!(c_hat(&s, 0.0, 3.0, 0.5, CExponent::Squared).unwrap(), 4.0);
        assert_eq!(c_hat(&s, 0.0, 3.0, 0.5, CExponent::Linear).unwrap(), 2.0);
        // closed interval: endpoints count
        assert_eq!(c_hat(&s, 1.0, 1.0, 0.5, CExponent::Squared).unwrap(), 1.0);
        assert_eq!(
            c_hat(&s, 1.2, 1.8, 0.5, CExponent::Squared),
            Err(Error::EmptyContactSet { lo: 1.2, hi: 1.8 })
        );
        assert!(c_hat(&s, 2.0, 1.0, 0.5, CExponent::Squared).is_err());
    }

    #[test]
    fn truncation_rules() {
        let s = build_sample(
            &(0..16)
                .map(|i| (i as f64, if i % 2 == 0 { 2.0 } else { -2.0 }))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(s.y_sd(), 2.0);
        assert_eq!(
            realize_truncation(&TruncationRule::Explicit(0.2), &s).unwrap(),
            0.2
        );
        let sched = TruncationRule::Schedule {
            kappa: 1.0,
            delta: 0.25,
        };
        assert_relative_eq!(
            realize_truncation(&sched, &s).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        for bad in [
            TruncationRule::Schedule {
                kappa: 1.0,
                delta: 0.5,
            },
            TruncationRule::Schedule {
                kappa: 1.0,
                delta: 0.0,
            },
            TruncationRule::Schedule {
                kappa: 0.0,
                delta: 0.25,
            },
        ] {
            assert!(matches!(
                realize_truncation(&bad, &s),
                Err(Error::InvalidSchedule(_))
            ));
        }
        assert!(realize_truncation(&TruncationRule::Explicit(-1.0), &s).is_err());
    }

    #[test]
    fn constant_outcome_schedule_fails() {
        let s = build_sample(&[(0.0, 1.0), (1.0, 1.0)]).unwrap();
        assert!(realize_truncation(&TruncationRule::default(), &s).is_err());
    }

    #[test]
    fn increasing_in_r_and_large_c() {
        let mut prev = f64::NEG_INFINITY;
        for k in 0..50 {
            let v = critical_value(1e4, -3.0 + 0.2 * k as f64).unwrap();
            assert!(v > prev);
            prev = v;
        }
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=38 {
            let c = (2.0 + k as f64).exp();
            let v = critical_value(c, 2.97).unwrap();
            assert!(v > prev, "c = e^{}", 2 + k);
            prev = v;
        }
    }
}
