//! Canonical generative scenarios for each design: the configurations the
//! validation subcommand and the acceptance suite run.

use crate::dist::Marginal;
use crate::simulate::Design;
use crate::truth::DesignTruth;

/// The standard regression line used across the continuous designs.
pub fn line(x: f64) -> f64 {
    1.0 + 2.0 * x
}

pub fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// The canonical truth for a design.
pub fn scenario(design: Design) -> DesignTruth {
    match design {
        Design::Plain => {
            DesignTruth::bernoulli(|x| logistic(2.0 * x - 1.0), Marginal::uniform(0.0, 1.0))
        }
        // θ = λ₀/λ₁ = 3: cases are undersampled relative to controls.
        Design::CaseControl => {
            DesignTruth::bernoulli(|x| logistic(2.0 * x - 1.0), Marginal::uniform(0.0, 1.0))
                .with_sampling_rates(0.9, 0.3)
        }
        Design::XTruncated => DesignTruth::bernoulli(|x| x, Marginal::uniform(0.0, 1.0))
            .with_x_interval(0.0, 0.5),
        Design::LeftTruncated => DesignTruth::regression(
            line,
            Marginal::normal(0.0, 0.5),
            Marginal::uniform(0.0, 1.0),
        )
        .with_truncation(Marginal::normal(-1.0, 1.0)),
        // C ~ N(2.9, 1) censors roughly a fifth of the responses.
        Design::Ltrc => DesignTruth::regression(
            line,
            Marginal::normal(0.0, 0.5),
            Marginal::uniform(0.0, 1.0),
        )
        .with_truncation(Marginal::normal(-1.0, 1.0))
        .with_censoring(Marginal::normal(2.9, 1.0)),
        Design::RightTruncated => DesignTruth::regression(
            line,
            Marginal::normal(0.0, 0.5),
            Marginal::uniform(0.0, 1.0),
        )
        .with_censoring(Marginal::normal(3.0, 1.0)),
        Design::DoubleTruncated => DesignTruth::regression(
            line,
            Marginal::normal(0.0, 0.5),
            Marginal::uniform(0.0, 1.0),
        )
        .with_truncation(Marginal::uniform(-2.0, -1.0))
        .with_censoring(Marginal::uniform(3.0, 4.0)),
        Design::CurrentStatus => DesignTruth::regression(
            |x| x,
            Marginal::normal(0.0, 1.0),
            Marginal::uniform(-1.0, 1.0),
        )
        .with_censoring(Marginal::uniform(-3.0, 3.0)),
    }
}
