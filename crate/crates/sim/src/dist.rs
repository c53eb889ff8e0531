//! Closed-form marginal distribution handles for the generative models:
//! CDF, density, quantile, mean and seeded sampling.

use rand::Rng;
use rand_distr::Distribution as _;
use statrs::distribution::{Continuous, ContinuousCDF};

use crate::error::{SimError, SimResult};

/// Quantile level treated as the numerical edge of an unbounded support.
const SUPPORT_EDGE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal {
    Normal { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
    PointMass { at: f64 },
}

impl Marginal {
    pub fn normal(mean: f64, sd: f64) -> Self {
        Marginal::Normal { mean, sd }
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        Marginal::Uniform { lo, hi }
    }

    pub fn point_mass(at: f64) -> Self {
        Marginal::PointMass { at }
    }

    pub fn cdf(&self, v: f64) -> f64 {
        match *self {
            Marginal::Normal { mean, sd } => {
                statrs::distribution::Normal::new(mean, sd).unwrap().cdf(v)
            }
            Marginal::Uniform { lo, hi } => ((v - lo) / (hi - lo)).clamp(0.0, 1.0),
            Marginal::PointMass { at } => {
                if v >= at {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn survival(&self, v: f64) -> f64 {
        1.0 - self.cdf(v)
    }

    /// Density; errors for point masses, which have none.
    pub fn pdf(&self, v: f64) -> SimResult<f64> {
        match *self {
            Marginal::Normal { mean, sd } => {
                Ok(statrs::distribution::Normal::new(mean, sd).unwrap().pdf(v))
            }
            Marginal::Uniform { lo, hi } => {
                Ok(if (lo..=hi).contains(&v) { 1.0 / (hi - lo) } else { 0.0 })
            }
            Marginal::PointMass { .. } => {
                Err(SimError::Config("point-mass distribution has no density".into()))
            }
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&u));
        match *self {
            Marginal::Normal { mean, sd } => {
                statrs::distribution::Normal::new(mean, sd).unwrap().inverse_cdf(u)
            }
            Marginal::Uniform { lo, hi } => lo + u * (hi - lo),
            Marginal::PointMass { at } => at,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Marginal::Normal { mean, .. } => mean,
            Marginal::Uniform { lo, hi } => 0.5 * (lo + hi),
            Marginal::PointMass { at } => at,
        }
    }

    pub fn sd(&self) -> f64 {
        match *self {
            Marginal::Normal { sd, .. } => sd,
            Marginal::Uniform { lo, hi } => (hi - lo) / 12f64.sqrt(),
            Marginal::PointMass { .. } => 0.0,
        }
    }

    /// Numerical lower/upper edge of the support, for quadrature ranges and
    /// support-condition checks.
    pub fn lower(&self) -> f64 {
        self.quantile(SUPPORT_EDGE)
    }

    pub fn upper(&self) -> f64 {
        self.quantile(1.0 - SUPPORT_EDGE)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Marginal::Normal { mean, sd } => {
                rand_distr::Normal::new(mean, sd).unwrap().sample(rng)
            }
            Marginal::Uniform { lo, hi } => rng.random_range(lo..hi),
            Marginal::PointMass { at } => at,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn normal_roundtrips_cdf_quantile() {
        let d = Marginal::normal(1.0, 0.5);
        for u in [0.05, 0.3, 0.5, 0.9] {
            assert!((d.cdf(d.quantile(u)) - u).abs() < 1e-10);
        }
        assert_eq!(d.mean(), 1.0);
    }

    #[test]
    fn uniform_shapes() {
        let d = Marginal::uniform(0.0, 2.0);
        assert_eq!(d.cdf(1.0), 0.5);
        assert_eq!(d.pdf(1.0).unwrap(), 0.5);
        assert_eq!(d.pdf(3.0).unwrap(), 0.0);
        assert_eq!(d.quantile(0.25), 0.5);
    }

    #[test]
    fn sampling_matches_moments() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let d = Marginal::normal(-1.0, 2.0);
        let n = 20_000;
        let mean: f64 = (0..n).map(|_| d.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean + 1.0).abs() < 0.05, "mean = {mean}");
    }

    #[test]
    fn point_mass_has_no_density() {
        assert!(Marginal::point_mass(0.0).pdf(0.0).is_err());
        assert_eq!(Marginal::point_mass(2.0).cdf(2.0), 1.0);
        assert_eq!(Marginal::point_mass(2.0).cdf(1.9), 0.0);
    }
}
