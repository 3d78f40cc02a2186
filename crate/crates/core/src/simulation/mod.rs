//! Monte Carlo validation: data generating processes, size and power
//! studies, and the Brownian increment limit simulator.

pub mod dgp;
pub mod limit;
pub mod montecarlo;

pub use dgp::{draw_dgp, draw_dgp_multi, DgpSpec, MeanFn, Noise};
pub use limit::{simulate_limit_infimum, LimitSimConfig, LimitSummary};
pub use montecarlo::{
    clopper_pearson, mc_power, mc_rejections, mc_size, monte_carlo, monte_carlo_multi,
    replication_seed, McSummary, Outcome, PowerPoint,
};
