//! Command-line flags and their translation into core configuration.
//!
//! Precedence: `--sigma-min` overrides `--kappa`/`--delta`; explicit
//! `--contact lo,hi` bounds override estimation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cmi_core::simulation::{
    mc_power, mc_size, simulate_limit_infimum, DgpSpec, LimitSimConfig, MeanFn, Noise,
};
use cmi_core::{run_test_bonferroni, CExponent, ContactSetSpec, TestConfig, TruncationRule};

use crate::ingest::ingest_csv;
use crate::report::{
    limit_document, mc_summary_document, push_config, push_mc_summary, test_report_document,
    Document, Value,
};
use crate::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "cmi",
    version,
    about = "Variance-weighted KS tests of E(Y|X) >= 0"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a CSV dataset (`x` column plus one or more `y*` columns).
    Test {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        test: TestArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rejection rate under a null-satisfying process.
    Size {
        #[command(flatten)]
        test: TestArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Conditional mean: zero, const:V, hinge:KNOT or bump:LO:HI:AMP.
        #[arg(long, default_value = "zero")]
        mean: String,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rejection rates for alternatives over a grid of sample sizes.
    Power {
        #[command(flatten)]
        test: TestArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Alternative mean (repeatable); same syntax as `size --mean`.
        #[arg(long = "mean", default_value = "bump:0.4:0.6:-0.5")]
        means: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "200,2000")]
        n: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalized extremes of standardized Brownian increments.
    Limit {
        #[arg(long, default_value_t = 1e4)]
        horizon: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, default_value_t = 2000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Explicit truncation level; overrides --kappa and --delta.
    #[arg(long)]
    pub sigma_min: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// `full`, `estimate`, or explicit bounds `lo,hi`.
    #[arg(long, default_value = "full", allow_hyphen_values = true)]
    pub contact: String,
    /// Window half-width for `--contact estimate`.
    #[arg(long)]
    pub contact_bandwidth: Option<f64>,
    /// Threshold multiplier for `--contact estimate`.
    #[arg(long)]
    pub contact_multiplier: Option<f64>,
    /// Power of sigma_min in the plug-in scale (2 or 1).
    #[arg(long, default_value_t = 2)]
    pub c_exponent: u8,
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub reps: u64,
    /// Noise law: rademacher:S, uniform:W or tnorm:SD:BOUND.
    #[arg(long, default_value = "rademacher:1")]
    pub noise: String,
}

fn parse_nums(s: &str, sep: char, what: &str) -> Result<Vec<f64>> {
    s.split(sep)
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad number {p:?} in {what} {s:?}")))
        })
        .collect()
}

impl TestArgs {
    pub fn to_config(&self) -> Result<TestConfig> {
        let rule = match self.sigma_min {
            Some(v) => TruncationRule::Explicit(v),
            None => TruncationRule::Schedule {
                kappa: self.kappa,
                delta: self.delta,
            },
        };
        rule.validate()?;
        let contact = match self.contact.as_str() {
            "full" => ContactSetSpec::FullSupport,
            "estimate" => ContactSetSpec::Estimated {
                bandwidth: self.contact_bandwidth,
                multiplier: self.contact_multiplier,
            },
            other => match parse_nums(other, ',', "--contact")?.as_slice() {
                [lo, hi] => ContactSetSpec::Explicit { lo: *lo, hi: *hi },
                _ => {
                    return Err(CliError::Usage(format!(
                        "--contact expects full, estimate or lo,hi; got {other:?}"
                    )))
                }
            },
        };
        contact.validate()?;
        let exponent = match self.c_exponent {
            2 => CExponent::Squared,
            1 => CExponent::Linear,
            e => {
                return Err(CliError::Usage(format!(
                    "--c-exponent must be 1 or 2, got {e}"
                )))
            }
        };
        cmi_core::gumbel_r(self.alpha)?;
        Ok(TestConfig {
            alpha: self.alpha,
            rule,
            contact,
            exponent,
        })
    }
}

pub fn parse_mean(s: &str) -> Result<MeanFn> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let nums = if rest.is_empty() {
        Vec::new()
    } else {
        parse_nums(rest, ':', "--mean")?
    };
    match (name, nums.as_slice()) {
        ("zero", []) => Ok(MeanFn::Zero),
        ("const", [c]) => Ok(MeanFn::Constant(*c)),
        ("hinge", [k]) => Ok(MeanFn::Hinge { knot: *k }),
        ("bump", [lo, hi, a]) => Ok(MeanFn::Bump {
            lo: *lo,
            hi: *hi,
            amplitude: *a,
        }),
        _ => Err(CliError::Usage(format!("unrecognized mean {s:?}"))),
    }
}

pub fn parse_noise(s: &str) -> Result<Noise> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let nums = if rest.is_empty() {
        Vec::new()
    } else {
        parse_nums(rest, ':', "--noise")?
    };
    match (name, nums.as_slice()) {
        ("rademacher", [s]) => Ok(Noise::Rademacher { scale: *s }),
        ("uniform", [w]) => Ok(Noise::Uniform { half_width: *w }),
        ("tnorm", [sd, b]) => Ok(Noise::TruncatedNormal { sd: *sd, bound: *b }),
        _ => Err(CliError::Usage(format!("unrecognized noise {s:?}"))),
    }
}

fn dgp(mean: MeanFn, n: usize, sim: &SimArgs) -> Result<DgpSpec> {
    let spec = DgpSpec {
        noise: parse_noise(&sim.noise)?,
        ..DgpSpec::new(mean, n, sim.seed)
    };
    spec.validate()?;
    Ok(spec)
}

/// Runs a parsed command, returning the report document (without timestamp)
/// and the requested output path.
pub fn execute(command: &Command) -> Result<(Document, Option<PathBuf>)> {
    match command {
        Command::Test { input, test, out } => {
            let config = test.to_config()?;
            let samples = ingest_csv(input)?;
            let report = run_test_bonferroni(&samples, &config)?;
            let mut doc = test_report_document(&report);
            doc.push("input", Value::Str(input.display().to_string()));
            Ok((doc, out.clone()))
        }
        Command::Size {
            test,
            sim,
            mean,
            n,
            out,
        } => {
            let config = test.to_config()?;
            let spec = dgp(parse_mean(mean)?, *n, sim)?;
            let summary = mc_size(&spec, &config, sim.reps, sim.seed)?;
            let mut doc = mc_summary_document("size", &summary, &config, sim.seed);
            doc.push("n", Value::Int(*n as u64));
            doc.push("mean", Value::Str(mean.clone()));
            doc.push("noise", Value::Str(sim.noise.clone()));
            Ok((doc, out.clone()))
        }
        Command::Power {
            test,
            sim,
            means,
            n,
            out,
        } => {
            let config = test.to_config()?;
            let specs = means
                .iter()
                .map(|m| dgp(parse_mean(m)?, n.first().copied().unwrap_or(2), sim))
                .collect::<Result<Vec<_>>>()?;
            let points = mc_power(&specs, n, &config, sim.reps, sim.seed)?;
            if points.is_empty() {
                return Err(CliError::Usage(
                    "power needs at least one mean and one n".into(),
                ));
            }
            let mut doc = Document::new("power");
            doc.push("seed", Value::Int(sim.seed));
            doc.push("reps", Value::Int(sim.reps));
            push_config(&mut doc, "", &config);
            doc.push("noise", Value::Str(sim.noise.clone()));
            doc.push("points", Value::Int(points.len() as u64));
            for (k, p) in points.iter().enumerate() {
                let prefix = format!("point.{}.", k + 1);
                doc.push(
                    format!("{prefix}mean"),
                    Value::Str(means[p.alternative].clone()),
                );
                doc.push(format!("{prefix}n"), Value::Int(p.n as u64));
                push_mc_summary(&mut doc, &prefix, &p.summary);
            }
            Ok((doc, out.clone()))
        }
        Command::Limit {
            horizon,
            step,
            reps,
            seed,
            out,
        } => {
            let cfg = LimitSimConfig::new(*horizon, *step, *reps, *seed);
            let summary = simulate_limit_infimum(&cfg)?;
            Ok((limit_document(&summary, &cfg), out.clone()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_args(extra: &[&str]) -> TestArgs {
        let mut argv = vec!["cmi", "test", "--input", "d.csv"];
        argv.extend_from_slice(extra);
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Test { test, .. } => test,
            _ => unreachable!(),
        }
    }

    #[test]
    fn defaults_match_module_defaults() {
        assert_eq!(test_args(&[]).to_config().unwrap(), TestConfig::default());
    }

    #[test]
    fn sigma_min_overrides_schedule() {
        let cfg = test_args(&["--sigma-min", "0.2", "--delta", "0.3"])
            .to_config()
            .unwrap();
        assert_eq!(cfg.rule, TruncationRule::Explicit(0.2));
    }

    #[test]
    fn contact_forms() {
        let cfg = test_args(&["--contact", "-1,2.5"]).to_config().unwrap();
        assert_eq!(cfg.contact, ContactSetSpec::Explicit { lo: -1.0, hi: 2.5 });
        let cfg = test_args(&["--contact", "estimate", "--contact-bandwidth", "0.1"])
            .to_config()
            .unwrap();
        assert_eq!(
            cfg.contact,
            ContactSetSpec::Estimated {
                bandwidth: Some(0.1),
                multiplier: None
            }
        );
        assert!(test_args(&["--contact", "1,2,3"]).to_config().is_err());
        assert!(test_args(&["--contact", "2,1"]).to_config().is_err());
        assert!(test_args(&["--c-exponent", "3"]).to_config().is_err());
        assert!(test_args(&["--delta", "0.5"]).to_config().is_err());
        assert!(test_args(&["--alpha", "1"]).to_config().is_err());
        assert_eq!(
            test_args(&["--c-exponent", "1"])
                .to_config()
                .unwrap()
                .exponent,
            CExponent::Linear
        );
    }

    #[test]
    fn mean_and_noise_syntax() {
        assert_eq!(parse_mean("zero").unwrap(), MeanFn::Zero);
        assert_eq!(parse_mean("const:-0.3").unwrap(), MeanFn::Constant(-0.3));
        assert_eq!(
            parse_mean("hinge:0.5").unwrap(),
            MeanFn::Hinge { knot: 0.5 }
        );
        assert_eq!(
            parse_mean("bump:0.4:0.6:-0.5").unwrap(),
            MeanFn::Bump {
                lo: 0.4,
                hi: 0.6,
                amplitude: -0.5
            }
        );
        assert!(parse_mean("bump:1").is_err());
        assert_eq!(
            parse_noise("uniform:0.5").unwrap(),
            Noise::Uniform { half_width: 0.5 }
        );
        assert_eq!(
            parse_noise("tnorm:1:2").unwrap(),
            Noise::TruncatedNormal {
                sd: 1.0,
                bound: 2.0
            }
        );
        assert!(parse_noise("gauss").is_err());
    }
}
