//! First-order bias and variance of the left-truncation sub-distribution
//! estimators, evaluated from the generative truth by quadrature and
//! numerical differentiation.
//!
//! Variances: var Â(y;x) = (nh)⁻¹ κ₂ A(1-A)(y;x) / α(x), and the same form
//! with B for B̂. Biases are h²κ₁/(2α) combinations of the second
//! x-derivative of the conditional law integrated against F_T; the mixed
//! term of the B display is read pointwise in x.

use partreg_core::Kernel;

use crate::error::{SimError, SimResult};
use crate::oracle::{alpha_a_b, QUAD_TOL};
use crate::quad::integrate;
use crate::simulate::Design;
use crate::truth::DesignTruth;

/// Central-difference step of the x-derivatives.
const DIFF_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy)]
pub struct TheoreticalMoments {
    pub bias_a: f64,
    pub bias_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    /// ∂F(y|x)/∂x by central differences.
    pub f_dot_x: f64,
    /// ∂²F(y|x)/∂x² by central differences.
    pub f_ddot_x: f64,
    /// ∂F(y|x)/∂y by central differences.
    pub f_dot_y: f64,
}

/// Moments of Â and B̂ at (y, x) for sample size n and bandwidth h, under
/// the left-truncation design.
pub fn theoretical_moments(
    truth: &DesignTruth,
    kernel: &Kernel,
    n: usize,
    h: f64,
    y: f64,
    x: f64,
) -> SimResult<TheoreticalMoments> {
    let t = truth
        .t
        .ok_or_else(|| SimError::Config("moments require the truncation distribution".into()))?;
    let v = alpha_a_b(truth, Design::LeftTruncated, y, x)?;
    let nh = n as f64 * h;
    let var_a = kernel.kappa2() * v.a * (1.0 - v.a) / (v.alpha * nh);
    let var_b = kernel.kappa2() * v.b * (1.0 - v.b) / (v.alpha * nh);

    // d²/dx² of the conditional density at v, by central differences.
    let eps = truth.eps;
    let m = truth.m.clone();
    let ddot_pdf = move |v: f64| {
        let at = |xx: f64| eps.pdf(v - m(xx)).unwrap();
        (at(x + DIFF_STEP) - 2.0 * at(x) + at(x - DIFF_STEP)) / (DIFF_STEP * DIFF_STEP)
    };
    let lo = truth.m_at(x) + truth.eps.lower() - 2.0 * DIFF_STEP;
    let hi = truth.m_at(x) + truth.eps.upper() + 2.0 * DIFF_STEP;
    let weighted = |upto: f64| {
        integrate(&|vv: f64| t.cdf(vv) * ddot_pdf(vv), lo, hi.min(upto), QUAD_TOL)
    };
    let partial = weighted(y);
    let total = weighted(f64::INFINITY);
    let unweighted_total = integrate(&ddot_pdf, lo, hi, QUAD_TOL);

    let scale = 0.5 * h * h * kernel.kappa1() / v.alpha;
    let bias_a = scale * (partial - v.a * total);
    let bias_b = scale * (t.cdf(y) * unweighted_total - v.b * total);

    let cdf_at = |yy: f64, xx: f64| truth.conditional_cdf(yy, xx);
    let f_dot_x = (cdf_at(y, x + DIFF_STEP) - cdf_at(y, x - DIFF_STEP)) / (2.0 * DIFF_STEP);
    let f_ddot_x = (cdf_at(y, x + DIFF_STEP) - 2.0 * cdf_at(y, x) + cdf_at(y, x - DIFF_STEP))
        / (DIFF_STEP * DIFF_STEP);
    let f_dot_y = (cdf_at(y + DIFF_STEP, x) - cdf_at(y - DIFF_STEP, x)) / (2.0 * DIFF_STEP);

    let out = TheoreticalMoments { bias_a, bias_b, var_a, var_b, f_dot_x, f_ddot_x, f_dot_y };
    for (name, value) in [
        ("bias_a", out.bias_a),
        ("bias_b", out.bias_b),
        ("var_a", out.var_a),
        ("var_b", out.var_b),
    ] {
        if !value.is_finite() {
            return Err(SimError::Config(format!("non-finite moment {name} at (y={y}, x={x})")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Marginal;
    use partreg_core::KernelKind;

    fn truth() -> DesignTruth {
        DesignTruth::regression(
            |x| 1.0 + 2.0 * x,
            Marginal::normal(0.0, 0.5),
            Marginal::uniform(0.0, 1.0),
        )
        .with_truncation(Marginal::normal(-1.0, 1.0))
    }

    #[test]
    fn variance_vanishes_at_extreme_levels() {
        let k = Kernel::new(KernelKind::Epanechnikov);
        // Far below the conditional support: A = 0.
        let low = theoretical_moments(&truth(), &k, 2000, 0.05, -10.0, 0.5).unwrap();
        assert!(low.var_a.abs() < 1e-10);
        // Far above: A = 1.
        let high = theoretical_moments(&truth(), &k, 2000, 0.05, 10.0, 0.5).unwrap();
        assert!(high.var_a.abs() < 1e-8);
    }

    #[test]
    fn variance_is_inverse_linear_in_n() {
        let k = Kernel::new(KernelKind::Epanechnikov);
        let m1 = theoretical_moments(&truth(), &k, 1000, 0.05, 2.0, 0.5).unwrap();
        let m2 = theoretical_moments(&truth(), &k, 2000, 0.05, 2.0, 0.5).unwrap();
        assert!((m1.var_a / m2.var_a - 2.0).abs() < 1e-10);
        assert!((m1.var_b / m2.var_b - 2.0).abs() < 1e-10);
    }

    #[test]
    fn bias_follows_the_h_squared_law() {
        let k = Kernel::new(KernelKind::Epanechnikov);
        let m1 = theoretical_moments(&truth(), &k, 2000, 0.08, 2.0, 0.5).unwrap();
        let m2 = theoretical_moments(&truth(), &k, 2000, 0.04, 2.0, 0.5).unwrap();
        assert!((m1.bias_a / m2.bias_a - 4.0).abs() < 1e-6, "{} {}", m1.bias_a, m2.bias_a);
        assert!((m1.bias_b / m2.bias_b - 4.0).abs() < 1e-6);
    }

    #[test]
    fn numerical_partials_match_closed_forms() {
        // F(y|x) = Φ((y - 1 - 2x)/σ): ∂/∂x = -2φ(z)/σ, ∂/∂y = φ(z)/σ.
        let k = Kernel::new(KernelKind::Epanechnikov);
        let m = theoretical_moments(&truth(), &k, 2000, 0.05, 2.0, 0.4).unwrap();
        let sigma: f64 = 0.5;
        let z: f64 = (2.0 - 1.0 - 2.0 * 0.4) / sigma;
        let phi = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((m.f_dot_x - (-2.0 * phi / sigma)).abs() < 1e-5);
        assert!((m.f_dot_y - phi / sigma).abs() < 1e-5);
    }
}
