//! Kernel functions, bandwidth rules and the kernel evaluation window.
//!
//! Every estimator in this crate smooths with weights `K_h(x - x_i)` where
//! `K_h(u) = K(u/h)/h`. The kernel carries its second moment `kappa1 = ∫u²K`
//! and roughness `kappa2 = ∫K²`, which the asymptotic bias and variance
//! formulas of the moment oracle consume.

use crate::error::{Error, Result};

const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;

/// Normal-reference constant of the default bandwidth rule.
pub const NORMAL_REFERENCE_SCALE: f64 = 1.06;

/// Default bandwidth exponent: midpoint of the admissible window (1/5, 1/3).
pub const DEFAULT_EXPONENT: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Epanechnikov,
    Triangular,
    Gaussian,
    Uniform,
}

impl KernelKind {
    pub const ALL: [KernelKind; 4] = [
        KernelKind::Epanechnikov,
        KernelKind::Triangular,
        KernelKind::Gaussian,
        KernelKind::Uniform,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Epanechnikov => "epanechnikov",
            KernelKind::Triangular => "triangular",
            KernelKind::Gaussian => "gaussian",
            KernelKind::Uniform => "uniform",
        }
    }
}

/// A symmetric density kernel together with its moment constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    kind: KernelKind,
    kappa1: f64,
    kappa2: f64,
}

impl Kernel {
    pub fn new(kind: KernelKind) -> Self {
        let (kappa1, kappa2) = match kind {
            KernelKind::Epanechnikov => (0.2, 0.6),
            KernelKind::Triangular => (1.0 / 6.0, 2.0 / 3.0),
            KernelKind::Gaussian => (1.0, 0.5 / std::f64::consts::PI.sqrt()),
            KernelKind::Uniform => (1.0 / 3.0, 0.5),
        };
        Kernel { kind, kappa1, kappa2 }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// Second moment `∫ u² K(u) du`.
    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }

    /// Roughness `∫ K(u)² du`.
    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }

    /// Evaluate the kernel density at `u`; zero outside the support for the
    /// compactly supported kinds.
    pub fn evaluate(&self, u: f64) -> f64 {
        match self.kind {
            KernelKind::Epanechnikov => {
                let a = u.abs();
                if a >= 1.0 {
                    0.0
                } else {
                    0.75 * (1.0 - a * a)
                }
            }
            KernelKind::Triangular => {
                let a = u.abs();
                if a >= 1.0 {
                    0.0
                } else {
                    1.0 - a
                }
            }
            KernelKind::Gaussian => (-0.5 * u * u).exp() / SQRT_TWO_PI,
            KernelKind::Uniform => {
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    0.5
                }
            }
        }
    }

    /// Half-width of the support, `None` for the Gaussian.
    pub fn support(&self) -> Option<f64> {
        match self.kind {
            KernelKind::Gaussian => None,
            _ => Some(1.0),
        }
    }
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::new(KernelKind::Epanechnikov)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthRule {
    Fixed,
    /// h = c · sd(x) · n^(-a) with the exponent a in (1/5, 1/3).
    ScaledPower { exponent: f64 },
}

/// A validated positive bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidth {
    value: f64,
    rule: BandwidthRule,
}

impl Bandwidth {
    pub fn fixed(h: f64) -> Result<Self> {
        if h <= 0.0 || !h.is_finite() {
            return Err(Error::NonpositiveBandwidth(h));
        }
        Ok(Bandwidth { value: h, rule: BandwidthRule::Fixed })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn rule(&self) -> BandwidthRule {
        self.rule
    }
}

/// `K_h(x - xi) = K((x - xi)/h) / h`.
///
/// Scales exactly as `h⁻¹`: `kernel_weight(k, h, x, xi)` equals
/// `kernel_weight(k, 1, (x-xi)/h, 0) / h`.
pub fn kernel_weight(kernel: &Kernel, bandwidth: &Bandwidth, x: f64, xi: f64) -> f64 {
    let h = bandwidth.value();
    kernel.evaluate((x - xi) / h) / h
}

fn sample_sd(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (ss / (n - 1.0)).sqrt()
}

/// `h = 1.06 · sd(xs) · n^(-a)` with `a` in the open interval (1/5, 1/3).
pub fn default_bandwidth(xs: &[f64], exponent: f64) -> Result<Bandwidth> {
    if xs.len() < 2 {
        return Err(Error::Degenerate(format!(
            "need at least 2 observations for a bandwidth, got {}",
            xs.len()
        )));
    }
    if !(exponent > 0.2 && exponent < 1.0 / 3.0) {
        return Err(Error::BandwidthExponent(exponent));
    }
    let sd = sample_sd(xs);
    if sd <= 0.0 || sd.is_nan() {
        return Err(Error::Degenerate("constant covariate: sample sd is zero".into()));
    }
    let h = NORMAL_REFERENCE_SCALE * sd * (xs.len() as f64).powf(-exponent);
    Ok(Bandwidth { value: h, rule: BandwidthRule::ScaledPower { exponent } })
}

/// A closed interval on the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    /// `count` equispaced points spanning the interval (endpoints included).
    pub fn grid(&self, count: usize) -> Vec<f64> {
        if count == 0 {
            return Vec::new();
        }
        if count == 1 {
            return vec![0.5 * (self.lo + self.hi)];
        }
        let step = (self.hi - self.lo) / (count - 1) as f64;
        (0..count)
            .map(|i| if i == count - 1 { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

/// The window `[min x + h, max x - h]` on which kernel estimators are defined.
pub fn evaluation_window(xs: &[f64], bandwidth: &Bandwidth) -> Result<Interval> {
    if xs.is_empty() {
        return Err(Error::EmptyData);
    }
    let h = bandwidth.value();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in xs {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    let span = hi - lo;
    if span <= 2.0 * h {
        return Err(Error::EmptyWindow { span, twice_h: 2.0 * h });
    }
    Ok(Interval::new(lo + h, hi - h))
}

pub(crate) fn check_in_window(x: f64, window: &Interval) -> Result<()> {
    if window.contains(x) {
        Ok(())
    } else {
        Err(Error::OutsideWindow { x, lo: window.lo, hi: window.hi })
    }
}

/// Window guard shared by the kernel-smoothed estimators: enforced whenever
/// the window is nonempty. When the bandwidth reaches half the covariate
/// span the window is vacuous (the kernel can cover every record from
/// everywhere) and evaluation degenerates to global ratios, which is
/// permitted; the empirical-reduction identities rely on this regime.
pub(crate) fn window_guard(xs: &[f64], bandwidth: &Bandwidth, x: f64) -> Result<()> {
    match evaluation_window(xs, bandwidth) {
        Ok(w) => check_in_window(x, &w),
        Err(Error::EmptyWindow { .. }) => Ok(()),
        Err(e) => Err(e),
    }
}

/// Kernel weights of every record at x, after the window guard; errors when
/// the total mass vanishes.
pub(crate) fn kernel_weights(
    xs: &[f64],
    kernel: &Kernel,
    bandwidth: &Bandwidth,
    x: f64,
) -> Result<Vec<f64>> {
    window_guard(xs, bandwidth, x)?;
    let w: Vec<f64> = xs.iter().map(|&xi| kernel_weight(kernel, bandwidth, x, xi)).collect();
    if w.iter().sum::<f64>() <= 0.0 {
        return Err(Error::NotEstimable { x });
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Midpoint rule: exact for the uniform kernel's discontinuity at the
    // support edge, O(h²) elsewhere.
    fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
    }

    fn integration_range(k: &Kernel) -> (f64, f64) {
        match k.support() {
            Some(w) => (-w, w),
            None => (-12.0, 12.0),
        }
    }

    #[test]
    fn kernels_integrate_to_one() {
        for kind in KernelKind::ALL {
            let k = Kernel::new(kind);
            let (a, b) = integration_range(&k);
            let total = midpoint(|u| k.evaluate(u), a, b, 200_000);
            assert!((total - 1.0).abs() < 1e-9, "{}: ∫K = {total}", kind.name());
        }
    }

    #[test]
    fn kernels_are_symmetric_nonnegative_and_centered() {
        for kind in KernelKind::ALL {
            let k = Kernel::new(kind);
            for i in 0..200 {
                let u = -3.0 + 6.0 * (i as f64) / 199.0;
                assert!(k.evaluate(u) >= 0.0);
                assert_eq!(k.evaluate(u), k.evaluate(-u), "{}", kind.name());
            }
            let (a, b) = integration_range(&k);
            let first = midpoint(|u| u * k.evaluate(u), a, b, 200_000);
            assert!(first.abs() < 1e-9, "{}: ∫uK = {first}", kind.name());
        }
    }

    #[test]
    fn moment_constants_match_numerical_integrals() {
        for kind in KernelKind::ALL {
            let k = Kernel::new(kind);
            let (a, b) = integration_range(&k);
            let kappa1 = midpoint(|u| u * u * k.evaluate(u), a, b, 400_000);
            let kappa2 = midpoint(|u| k.evaluate(u) * k.evaluate(u), a, b, 400_000);
            assert!((kappa1 - k.kappa1()).abs() < 1e-9, "{}: kappa1", kind.name());
            assert!((kappa2 - k.kappa2()).abs() < 1e-9, "{}: kappa2", kind.name());
        }
    }

    #[test]
    fn closed_form_moments() {
        let cases = [
            (KernelKind::Epanechnikov, 0.2, 0.6),
            (KernelKind::Triangular, 1.0 / 6.0, 2.0 / 3.0),
            (KernelKind::Gaussian, 1.0, 0.5 / std::f64::consts::PI.sqrt()),
            (KernelKind::Uniform, 1.0 / 3.0, 0.5),
        ];
        for (kind, k1, k2) in cases {
            let k = Kernel::new(kind);
            assert!((k.kappa1() - k1).abs() < 1e-12);
            assert!((k.kappa2() - k2).abs() < 1e-12);
        }
    }

    #[test]
    fn weight_at_center_epanechnikov() {
        let k = Kernel::new(KernelKind::Epanechnikov);
        let h = Bandwidth::fixed(1.0).unwrap();
        assert_eq!(kernel_weight(&k, &h, 2.0, 2.0), 0.75);
    }

    #[test]
    fn weight_outside_uniform_support() {
        let k = Kernel::new(KernelKind::Uniform);
        let h = Bandwidth::fixed(2.0).unwrap();
        assert_eq!(kernel_weight(&k, &h, 3.0, 0.0), 0.0);
    }

    #[test]
    fn gaussian_weight_matches_direct_density() {
        // K_h with h = 1/2 at distance 1/2 equals 2·φ(1).
        let k = Kernel::new(KernelKind::Gaussian);
        let h = Bandwidth::fixed(0.5).unwrap();
        let phi_one = (-0.5f64).exp() / SQRT_TWO_PI;
        let w = kernel_weight(&k, &h, 0.5, 0.0);
        assert!((w - 2.0 * phi_one).abs() < 1e-15);
        assert!((w - 0.48394).abs() < 1e-5);
    }

    #[test]
    fn weight_scales_as_inverse_bandwidth() {
        let unit = Bandwidth::fixed(1.0).unwrap();
        for kind in KernelKind::ALL {
            let k = Kernel::new(kind);
            for &h in &[0.1, 0.5, 2.0, 7.3] {
                let bw = Bandwidth::fixed(h).unwrap();
                for &(x, xi) in &[(0.3, 0.1), (1.0, -0.4), (5.0, 5.0)] {
                    let lhs = kernel_weight(&k, &bw, x, xi);
                    let rhs = kernel_weight(&k, &unit, (x - xi) / h, 0.0) / h;
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn nonpositive_bandwidth_rejected() {
        assert!(Bandwidth::fixed(0.0).is_err());
        assert!(Bandwidth::fixed(-1.0).is_err());
        assert!(Bandwidth::fixed(f64::NAN).is_err());
    }

    #[test]
    fn default_bandwidth_arithmetic() {
        // sd = 1 by construction: 16 points at ±1 around the mean.
        let xs: Vec<f64> = (0..16).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let sd = sample_sd(&xs);
        let bw = default_bandwidth(&xs, 0.25).unwrap();
        assert!((bw.value() - 1.06 * sd * 0.5).abs() < 1e-12);
        // With sd exactly 1 the rule gives 1.06 · 16^(-1/4) = 0.53.
        assert!((bw.value() / sd - 0.53).abs() < 1e-12);
    }

    #[test]
    fn default_bandwidth_rejects_constant_input() {
        assert!(matches!(
            default_bandwidth(&[0.0, 0.0, 0.0], 0.25),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn default_bandwidth_rejects_bad_exponent() {
        let xs = [0.0, 1.0, 2.0];
        assert!(matches!(default_bandwidth(&xs, 0.2), Err(Error::BandwidthExponent(_))));
        assert!(matches!(default_bandwidth(&xs, 1.0 / 3.0), Err(Error::BandwidthExponent(_))));
        assert!(default_bandwidth(&xs, 0.21).is_ok());
    }

    #[test]
    fn default_bandwidth_uniform_sample_range() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let xs: Vec<f64> = (0..1000).map(|_| rng.random_range(0.0..1.0)).collect();
        let bw = default_bandwidth(&xs, 0.25).unwrap();
        // sd → 1/√12, so h ≈ 1.06·0.2887·1000^(-1/4) ≈ 0.054.
        assert!(bw.value() > 0.04 && bw.value() < 0.08, "h = {}", bw.value());
    }

    #[test]
    fn window_examples() {
        let h1 = Bandwidth::fixed(1.0).unwrap();
        let w = evaluation_window(&[0.0, 10.0], &h1).unwrap();
        assert_eq!((w.lo, w.hi), (1.0, 9.0));

        match evaluation_window(&[0.0, 1.0], &h1) {
            Err(Error::EmptyWindow { span, twice_h }) => {
                assert_eq!(span, 1.0);
                assert_eq!(twice_h, 2.0);
            }
            other => panic!("expected empty window, got {other:?}"),
        }

        let h = Bandwidth::fixed(0.5).unwrap();
        let w = evaluation_window(&[2.0, 3.0, 7.0], &h).unwrap();
        assert_eq!((w.lo, w.hi), (2.5, 6.5));
    }
}
