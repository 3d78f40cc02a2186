use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::sample::{build_sample, Sample};

/// Conditional mean `m(x) = E(Y | X = x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanFn {
    Zero,
    Constant(f64),
    /// `max(0, x - knot)`: binding below the knot, slack above.
    Hinge {
        knot: f64,
    },
    /// `amplitude` on `[lo, hi]`, zero elsewhere.
    Bump {
        lo: f64,
        hi: f64,
        amplitude: f64,
    },
}

impl MeanFn {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            MeanFn::Zero => 0.0,
            MeanFn::Constant(c) => c,
            MeanFn::Hinge { knot } => (x - knot).max(0.0),
            MeanFn::Bump { lo, hi, amplitude } => {
                if (lo..=hi).contains(&x) {
                    amplitude
                } else {
                    0.0
                }
            }
        }
    }

    /// Whether `m(x) >= 0` everywhere, i.e. the null holds.
    pub fn satisfies_null(&self) -> bool {
        match *self {
            MeanFn::Zero | MeanFn::Hinge { .. } => true,
            MeanFn::Constant(c) => c >= 0.0,
            MeanFn::Bump { amplitude, .. } => amplitude >= 0.0,
        }
    }
}

/// Centered noise `Y - m(X)`; every variant has bounded support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    /// `+scale` or `-scale` with equal probability.
    Rademacher {
        scale: f64,
    },
    Uniform {
        half_width: f64,
    },
    /// Normal with standard deviation `sd`, truncated to `[-bound, bound]`.
    TruncatedNormal {
        sd: f64,
        bound: f64,
    },
}

impl Noise {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Noise::Rademacher { scale } => scale.is_finite() && scale >= 0.0,
            Noise::Uniform { half_width } => half_width.is_finite() && half_width >= 0.0,
            Noise::TruncatedNormal { sd, bound } => {
                sd.is_finite() && sd > 0.0 && bound.is_finite() && bound > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("noise parameters {self:?}")))
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Noise::Rademacher { scale } => {
                if rng.random::<bool>() {
                    scale
                } else {
                    -scale
                }
            }
            Noise::Uniform { half_width } => half_width * (2.0 * rng.random::<f64>() - 1.0),
            Noise::TruncatedNormal { sd, bound } => loop {
                let z: f64 = StandardNormal.sample(rng);
                let v = sd * z;
                if v.abs() <= bound {
                    break v;
                }
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DgpSpec {
    /// `X ~ Uniform[x_lo, x_hi]`.
    pub x_lo: f64,
    pub x_hi: f64,
    pub mean: MeanFn,
    pub noise: Noise,
    pub n: usize,
    pub seed: u64,
}

impl DgpSpec {
    /// Unit-interval covariate with `+-1` noise.
    pub fn new(mean: MeanFn, n: usize, seed: u64) -> Self {
        Self {
            x_lo: 0.0,
            x_hi: 1.0,
            mean,
            noise: Noise::Rademacher { scale: 1.0 },
            n,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_lo.is_finite() && self.x_hi.is_finite() && self.x_lo < self.x_hi) {
            return Err(Error::InvalidSpec(format!(
                "covariate support [{}, {}] must be a finite nondegenerate interval",
                self.x_lo, self.x_hi
            )));
        }
        if self.n < 2 {
            return Err(Error::InvalidSpec(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        self.noise.validate()
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }
}

fn draw_covariate<R: Rng>(spec: &DgpSpec, rng: &mut R) -> f64 {
    spec.x_lo + (spec.x_hi - spec.x_lo) * rng.random::<f64>()
}

/// `n` iid draws from the spec; deterministic given `spec.seed`.
pub fn draw_dgp(spec: &DgpSpec) -> Result<Sample> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pairs: Vec<(f64, f64)> = (0..spec.n)
        .map(|_| {
            let x = draw_covariate(spec, &mut rng);
            (x, spec.mean.eval(x) + spec.noise.draw(&mut rng))
        })
        .collect();
    build_sample(&pairs)
}

/// One sample per mean function, sharing covariate draws and the noise law.
/// The covariate support, `n` and seed are taken from `spec`; its own mean is
/// ignored.
pub fn draw_dgp_multi(spec: &DgpSpec, means: &[MeanFn]) -> Result<Vec<Sample>> {
    spec.validate()?;
    if means.is_empty() {
        return Err(Error::InvalidSpec("need at least one mean function".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut x: Vec<f64> = (0..spec.n)
        .map(|_| draw_covariate(spec, &mut rng))
        .collect();
    x.sort_by(f64::total_cmp);
    let first_y: Vec<f64> = x
        .iter()
        .map(|&x| means[0].eval(x) + spec.noise.draw(&mut rng))
        .collect();
    let pairs: Vec<(f64, f64)> = x.iter().copied().zip(first_y).collect();
    let base = build_sample(&pairs)?;
    let mut out = Vec::with_capacity(means.len());
    out.push(base.clone());
    for m in &means[1..] {
        let y = base
            .x()
            .iter()
            .map(|&x| m.eval(x) + spec.noise.draw(&mut rng))
            .collect();
        out.push(base.with_outcome(y)?);
    }
    Ok(out)
}
