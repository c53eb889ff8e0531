//! Generative models, quadrature oracles and a Monte Carlo harness for
//! validating the partially-observed-response estimators: seeded simulators
//! for every sampling design, closed-form functionals computed by adaptive
//! quadrature, and first-order bias/variance formulas for the truncation
//! sub-distribution estimators.

pub mod dist;
pub mod error;
pub mod monte_carlo;
pub mod moments;
pub mod oracle;
pub mod quad;
pub mod scenarios;
pub mod simulate;
pub mod truth;

pub use dist::Marginal;
pub use error::{SimError, SimResult};
pub use monte_carlo::{
    monte_carlo, BandwidthSpec, Binding, EstimatorReport, McConfig, Query, ReportRow,
    SmoothingSpec,
};
pub use moments::{theoretical_moments, TheoreticalMoments};
pub use oracle::{alpha_a_b, apparent_mean, population_odds, truncation_lambdas, AbValues};
pub use simulate::{derive_seed, simulate_design, Design, DesignSample, Simulated};
pub use truth::DesignTruth;
