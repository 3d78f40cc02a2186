//! Sorted observations and the range queries the scan is built on.

use std::ops::Range;

use crate::error::{Error, Result};

/// Observations `(x, y)` sorted by `x`, with prefix sums of `y` and `y^2`.
///
/// Observations with equal `x` form a tie group. An open interval
/// `s < X < s + t` either contains every member of a group or none of them, so
/// ranges are always addressed in whole groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    x: Vec<f64>,
    y: Vec<f64>,
    p1: Vec<f64>,
    p2: Vec<f64>,
    /// `group_starts[g]` is the first observation of group `g`; the final
    /// entry is `n`.
    group_starts: Vec<usize>,
}

/// Sample moments of `Y * I(s < X < s + t)` over the full sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalMoments {
    pub mean: f64,
    pub sd: f64,
    pub count: usize,
}

impl IntervalMoments {
    /// Moments from the raw sums over the range, with `n` the full sample size.
    #[inline]
    pub(crate) fn from_sums(sum_y: f64, sum_y2: f64, count: usize, n: usize) -> Self {
        if count == 0 {
            return Self {
                mean: 0.0,
                sd: 0.0,
                count: 0,
            };
        }
        let nf = n as f64;
        let mean = sum_y / nf;
        let var = sum_y2 / nf - mean * mean;
        Self {
            mean,
            sd: var.max(0.0).sqrt(),
            count,
        }
    }

    /// `E_n[Y^2 I]`, recovered from the mean and standard deviation.
    pub fn second_moment(&self) -> f64 {
        self.sd * self.sd + self.mean * self.mean
    }
}

/// Sorts the pairs by `x` (stably) and precomputes prefix sums and tie groups.
pub fn build_sample(pairs: &[(f64, f64)]) -> Result<Sample> {
    if pairs.len() < 2 {
        return Err(Error::TooFewObservations(pairs.len()));
    }
    if let Some(index) = pairs
        .iter()
        .position(|(x, y)| !x.is_finite() || !y.is_finite())
    {
        return Err(Error::NonFiniteInput { index });
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (x, y): (Vec<f64>, Vec<f64>) = sorted.into_iter().unzip();
    Ok(Sample::from_sorted(x, y))
}

impl Sample {
    /// Builds a sample from columns already sorted by `x`.
    pub(crate) fn from_sorted(x: Vec<f64>, y: Vec<f64>) -> Self {
        debug_assert_eq!(x.len(), y.len());
        let n = x.len();
        let mut p1 = Vec::with_capacity(n + 1);
        let mut p2 = Vec::with_capacity(n + 1);
        let (mut s1, mut s2) = (0.0, 0.0);
        p1.push(0.0);
        p2.push(0.0);
        for &v in &y {
            s1 += v;
            s2 += v * v;
            p1.push(s1);
            p2.push(s2);
        }
        let mut group_starts = Vec::with_capacity(n + 1);
        for i in 0..n {
            if i == 0 || x[i] != x[i - 1] {
                group_starts.push(i);
            }
        }
        group_starts.push(n);
        Self {
            x,
            y,
            p1,
            p2,
            group_starts,
        }
    }

    /// Same covariate with a different outcome column.
    ///
    /// `y` must be aligned with the sorted order of `self`.
    pub fn with_outcome(&self, y: Vec<f64>) -> Result<Self> {
        if y.len() != self.len() {
            return Err(Error::InvalidSpec(format!(
                "outcome length {} does not match covariate length {}",
                y.len(),
                self.len()
            )));
        }
        if let Some(index) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { index });
        }
        Ok(Self::from_sorted(self.x.clone(), y))
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Prefix sums of `y`; `p1()[k]` is the sum of the first `k` outcomes.
    pub fn p1(&self) -> &[f64] {
        &self.p1
    }

    /// Prefix sums of `y^2`.
    pub fn p2(&self) -> &[f64] {
        &self.p2
    }

    pub fn group_count(&self) -> usize {
        self.group_starts.len() - 1
    }

    pub(crate) fn group_starts(&self) -> &[usize] {
        &self.group_starts
    }

    /// Observation index ranges of the tie groups, in ascending `x`.
    pub fn tie_groups(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.group_starts.windows(2).map(|w| w[0]..w[1])
    }

    /// Covariate value shared by the members of group `g`.
    pub fn group_x(&self, g: usize) -> f64 {
        self.x[self.group_starts[g]]
    }

    /// Observation range covered by groups `[lo, hi)`.
    pub fn observation_range(&self, lo: usize, hi: usize) -> Result<Range<usize>> {
        let groups = self.group_count();
        if lo > hi || hi > groups {
            return Err(Error::IndexOutOfRange { lo, hi, groups });
        }
        Ok(self.group_starts[lo]..self.group_starts[hi])
    }

    /// Moments of `Y * I` for the observations in groups `[lo, hi)`.
    pub fn interval_moments(&self, lo: usize, hi: usize) -> Result<IntervalMoments> {
        let r = self.observation_range(lo, hi)?;
        Ok(self.moments_unchecked(r.start, r.end))
    }

    #[inline]
    pub(crate) fn moments_unchecked(&self, start: usize, end: usize) -> IntervalMoments {
        IntervalMoments::from_sums(
            self.p1[end] - self.p1[start],
            self.p2[end] - self.p2[start],
            end - start,
            self.len(),
        )
    }

    /// Population standard deviation of `y` (divisor `n`).
    pub fn y_sd(&self) -> f64 {
        let n = self.len() as f64;
        let mean = self.p1[self.len()] / n;
        let ss: f64 = self.y.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / n).sqrt()
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        self.x[self.len() - 1]
    }
}

/// Free-function form of [`Sample::interval_moments`].
pub fn interval_moments(sample: &Sample, lo: usize, hi: usize) -> Result<IntervalMoments> {
    sample.interval_moments(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_sort() {
        let s = build_sample(&[(2.0, 5.0), (1.0, 3.0)]).unwrap();
        assert_eq!(s.x(), &[1.0, 2.0]);
        assert_eq!(s.y(), &[3.0, 5.0]);
        assert_eq!(s.p1(), &[0.0, 3.0, 8.0]);
        assert_eq!(s.p2(), &[0.0, 9.0, 34.0]);
    }

    #[test]
    fn ties_share_a_group() {
        let s = build_sample(&[(1.0, 1.0), (1.0, 2.0), (3.0, 0.0)]).unwrap();
        let groups: Vec<_> = s.tie_groups().collect();
        assert_eq!(groups, vec![0..2, 2..3]);
        assert_eq!(s.group_x(1), 3.0);
    }

    #[test]
    fn stable_sort_keeps_tie_order() {
        let s = build_sample(&[(2.0, 9.0), (1.0, 1.0), (2.0, 7.0), (1.0, 2.0)]).unwrap();
        assert_eq!(s.y(), &[1.0, 2.0, 9.0, 7.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            build_sample(&[(1.0, f64::NAN)]),
            Err(Error::TooFewObservations(1))
        );
        assert_eq!(
            build_sample(&[(1.0, 0.0), (1.0, f64::NAN)]),
            Err(Error::NonFiniteInput { index: 1 })
        );
        assert_eq!(
            build_sample(&[(f64::INFINITY, 0.0), (1.0, 0.0)]),
            Err(Error::NonFiniteInput { index: 0 })
        );
        assert_eq!(build_sample(&[]), Err(Error::TooFewObservations(0)));
    }

    #[test]
    fn moments_of_negative_pair() {
        let s = build_sample(&[(1.0, -1.0), (2.0, -1.0), (3.0, 1.0), (4.0, 1.0)]).unwrap();
        let m = s.interval_moments(0, 2).unwrap();
        // direct: sum y = -2, sum y^2 = 2 over n = 4
        assert_eq!(m.mean, -0.5);
        assert_eq!(m.second_moment(), 0.5);
        assert_eq!(m.sd, 0.5);
        assert_eq!(m.count, 2);
    }

    #[test]
    fn empty_and_constant_ranges() {
        let s = build_sample(&[(1.0, 3.0), (2.0, 3.0), (3.0, 3.0)]).unwrap();
        let e = s.interval_moments(1, 1).unwrap();
        assert_eq!(
            e,
            IntervalMoments {
                mean: 0.0,
                sd: 0.0,
                count: 0
            }
        );
        let full = s.interval_moments(0, 3).unwrap();
        assert_eq!(full.mean, 3.0);
        assert_eq!(full.sd, 0.0);
        assert!(matches!(
            s.interval_moments(2, 4),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            s.interval_moments(2, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn y_sd_is_population_sd() {
        let s = build_sample(&[(0.0, 1.0), (1.0, 3.0)]).unwrap();
        assert_eq!(s.y_sd(), 1.0);
    }
}
