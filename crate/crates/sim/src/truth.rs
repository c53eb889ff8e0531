//! Generative models: the regression truth Y = m(X) + ε with optional
//! truncation/censoring variables, and the Bernoulli truth p(x) with an
//! optional response-biased sampling mechanism.

use std::fmt;
use std::sync::Arc;

use crate::dist::Marginal;
use crate::error::{SimError, SimResult};
use crate::quad;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// All model ingredients a design can need. The regression pieces (m, ε, X)
/// are always present; truncation, censoring and the Bernoulli pieces are
/// optional and checked per design.
#[derive(Clone)]
pub struct DesignTruth {
    pub m: RealFn,
    pub eps: Marginal,
    pub x: Marginal,
    pub t: Option<Marginal>,
    pub c: Option<Marginal>,
    /// Bernoulli success probability p(x) for the indicator-response designs.
    pub p: Option<RealFn>,
    /// Case-control inclusion rates (λ₀ for controls, λ₁ for cases).
    pub sampling_rates: Option<(f64, f64)>,
    /// Fixed covariate truncation interval [a, b].
    pub x_interval: Option<(f64, f64)>,
}

impl fmt::Debug for DesignTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DesignTruth")
            .field("eps", &self.eps)
            .field("x", &self.x)
            .field("t", &self.t)
            .field("c", &self.c)
            .field("sampling_rates", &self.sampling_rates)
            .field("x_interval", &self.x_interval)
            .finish_non_exhaustive()
    }
}

impl DesignTruth {
    pub fn regression(m: impl Fn(f64) -> f64 + Send + Sync + 'static, eps: Marginal, x: Marginal) -> Self {
        DesignTruth {
            m: Arc::new(m),
            eps,
            x,
            t: None,
            c: None,
            p: None,
            sampling_rates: None,
            x_interval: None,
        }
    }

    pub fn bernoulli(p: impl Fn(f64) -> f64 + Send + Sync + 'static, x: Marginal) -> Self {
        DesignTruth {
            m: Arc::new(|_| 0.0),
            eps: Marginal::point_mass(0.0),
            x,
            t: None,
            c: None,
            p: Some(Arc::new(p)),
            sampling_rates: None,
            x_interval: None,
        }
    }

    pub fn with_truncation(mut self, t: Marginal) -> Self {
        self.t = Some(t);
        self
    }

    pub fn with_censoring(mut self, c: Marginal) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_sampling_rates(mut self, lambda0: f64, lambda1: f64) -> Self {
        self.sampling_rates = Some((lambda0, lambda1));
        self
    }

    pub fn with_x_interval(mut self, lo: f64, hi: f64) -> Self {
        self.x_interval = Some((lo, hi));
        self
    }

    pub fn m_at(&self, x: f64) -> f64 {
        (self.m)(x)
    }

    pub fn p_at(&self, x: f64) -> SimResult<f64> {
        match &self.p {
            Some(p) => Ok(p(x).clamp(0.0, 1.0)),
            None => Err(SimError::Config("no Bernoulli probability model set".into())),
        }
    }

    /// θ = λ₀/λ₁ of the sampling mechanism.
    pub fn theta(&self) -> SimResult<f64> {
        match self.sampling_rates {
            Some((l0, l1)) if l1 > 0.0 => Ok(l0 / l1),
            Some(_) => Err(SimError::Config("lambda1 must be positive".into())),
            None => Err(SimError::Config("no sampling rates set".into())),
        }
    }

    /// True conditional CDF F(y | x) = F_ε(y - m(x)).
    pub fn conditional_cdf(&self, y: f64, x: f64) -> f64 {
        self.eps.cdf(y - self.m_at(x))
    }

    /// True conditional density f(y | x) = f_ε(y - m(x)).
    pub fn conditional_pdf(&self, y: f64, x: f64) -> SimResult<f64> {
        self.eps.pdf(y - self.m_at(x))
    }

    /// Marginal CDF of Y by quadrature over the covariate distribution.
    pub fn marginal_y_cdf(&self, y: f64) -> SimResult<f64> {
        let xd = self.x;
        if let Marginal::PointMass { at } = xd {
            return Ok(self.conditional_cdf(y, at));
        }
        let m = self.m.clone();
        let eps = self.eps;
        let f = move |s: f64| eps.cdf(y - m(s)) * xd.pdf(s).unwrap();
        Ok(quad::integrate(&f, xd.lower(), xd.upper(), 1e-9))
    }

    /// E of the response, ∫ m dF_X (the error has mean zero).
    pub fn mean_y(&self) -> SimResult<f64> {
        let xd = self.x;
        if let Marginal::PointMass { at } = xd {
            return Ok(self.m_at(at) + self.eps.mean());
        }
        let m = self.m.clone();
        let f = move |s: f64| m(s) * xd.pdf(s).unwrap();
        Ok(quad::integrate(&f, xd.lower(), xd.upper(), 1e-9) + self.eps.mean())
    }

    /// Verifies Eε = 0 numerically (quadrature of v·f_ε for continuous
    /// handles, the point location otherwise).
    pub fn check_centered_error(&self) -> SimResult<()> {
        let mean = match self.eps {
            Marginal::PointMass { at } => at,
            _ => {
                let eps = self.eps;
                quad::integrate(
                    &|v: f64| v * eps.pdf(v).unwrap_or(0.0),
                    eps.lower(),
                    eps.upper(),
                    1e-10,
                )
            }
        };
        if mean.abs() > 1e-6 {
            return Err(SimError::Config(format!("error distribution has mean {mean:.3e}, not 0")));
        }
        Ok(())
    }

    /// Verifies the left-truncation support condition: the truncation
    /// distribution must put mass below the conditional response support,
    /// i.e. F_T > 0 at the lower edge of supp(Y | X = x) for every x.
    pub fn check_truncation_support(&self) -> SimResult<()> {
        let t = match self.t {
            Some(t) => t,
            None => return Ok(()),
        };
        for i in 0..=32 {
            let x = self.x.lower() + (self.x.upper() - self.x.lower()) * i as f64 / 32.0;
            let y_lower = self.m_at(x) + self.eps.lower();
            if t.cdf(y_lower) <= 0.0 {
                return Err(SimError::Config(format!(
                    "support condition violated at x = {x}: F_T vanishes at the lower \
                     response edge {y_lower}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conditional_and_marginal_shapes() {
        let truth = DesignTruth::regression(
            |x| 1.0 + 2.0 * x,
            Marginal::normal(0.0, 0.5),
            Marginal::uniform(0.0, 1.0),
        );
        assert!((truth.conditional_cdf(2.0, 0.5) - 0.5).abs() < 1e-12);
        // EY = 1 + 2·E X = 2.
        assert!((truth.mean_y().unwrap() - 2.0).abs() < 1e-8);
        // F_Y(2) for the symmetric design is 1/2.
        assert!((truth.marginal_y_cdf(2.0).unwrap() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn centered_error_check() {
        let ok = DesignTruth::regression(
            |x| x,
            Marginal::normal(0.0, 1.0),
            Marginal::uniform(0.0, 1.0),
        );
        assert!(ok.check_centered_error().is_ok());
        let bad = DesignTruth::regression(
            |x| x,
            Marginal::normal(0.3, 1.0),
            Marginal::uniform(0.0, 1.0),
        );
        assert!(bad.check_centered_error().is_err());
    }

    #[test]
    fn support_condition_check() {
        let ok = DesignTruth::regression(
            |x| 1.0 + 2.0 * x,
            Marginal::normal(0.0, 0.5),
            Marginal::uniform(0.0, 1.0),
        )
        .with_truncation(Marginal::normal(-1.0, 1.0));
        assert!(ok.check_truncation_support().is_ok());

        let bad = DesignTruth::regression(
            |x| x,
            Marginal::uniform(-0.5, 0.5),
            Marginal::uniform(0.0, 1.0),
        )
        .with_truncation(Marginal::uniform(0.0, 1.0));
        assert!(bad.check_truncation_support().is_err());
    }
}
