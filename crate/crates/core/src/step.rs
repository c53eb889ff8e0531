//! Right-continuous step distributions: the common output of every
//! product-limit estimator in this crate.
//!
//! A `StepDistribution` is the CDF `F(y) = floor + Σ_{loc ≤ y} mass`. The
//! `floor` is the mass sitting below every jump; it is zero for forward
//! (survival-type) products and carries the unidentifiable bottom mass of
//! reverse-time products. Total mass may be below one: such defective
//! estimates are returned as-is and flagged, never renormalized.

/// Tolerance below which a distribution is not considered defective.
const DEFECT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    jumps: Vec<(f64, f64)>,
    floor: f64,
}

/// A value returned by a generalized-inverse query, flagged when the level
/// was never attained inside the supported range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileValue {
    pub value: f64,
    pub at_boundary: bool,
}

impl StepDistribution {
    /// Build from raw jumps. Locations are sorted, ties merged, nonpositive
    /// masses dropped.
    pub fn new(mut jumps: Vec<(f64, f64)>, floor: f64) -> Self {
        jumps.retain(|&(_, m)| m > 0.0);
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(jumps.len());
        for (loc, mass) in jumps {
            match merged.last_mut() {
                Some(last) if last.0 == loc => last.1 += mass,
                _ => merged.push((loc, mass)),
            }
        }
        debug_assert!(floor >= -DEFECT_TOL);
        debug_assert!(
            floor + merged.iter().map(|j| j.1).sum::<f64>() <= 1.0 + 1e-9,
            "total mass above one"
        );
        StepDistribution { jumps: merged, floor: floor.max(0.0) }
    }

    pub fn point_mass(at: f64) -> Self {
        StepDistribution { jumps: vec![(at, 1.0)], floor: 0.0 }
    }

    pub fn jumps(&self) -> &[(f64, f64)] {
        &self.jumps
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// `F(y)`, right-continuous.
    pub fn cdf(&self, y: f64) -> f64 {
        let k = self.jumps.partition_point(|&(loc, _)| loc <= y);
        self.floor + self.jumps[..k].iter().map(|j| j.1).sum::<f64>()
    }

    /// Left limit `F(y⁻)`.
    pub fn cdf_left(&self, y: f64) -> f64 {
        let k = self.jumps.partition_point(|&(loc, _)| loc < y);
        self.floor + self.jumps[..k].iter().map(|j| j.1).sum::<f64>()
    }

    pub fn survival(&self, y: f64) -> f64 {
        1.0 - self.cdf(y)
    }

    /// Mass carried by located jumps (excludes the floor).
    pub fn jump_mass(&self) -> f64 {
        self.jumps.iter().map(|j| j.1).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.floor + self.jump_mass()
    }

    /// Unassigned mass, `1 - total_mass`, clamped at zero.
    pub fn defect(&self) -> f64 {
        (1.0 - self.total_mass()).max(0.0)
    }

    pub fn is_defective(&self) -> bool {
        self.defect() > DEFECT_TOL || self.floor > DEFECT_TOL
    }

    /// Generalized inverse `inf{loc: F(loc) ≥ u}` over the jump locations.
    /// Levels above the attainable mass return the last jump, flagged;
    /// levels inside the floor (mass below every jump) return the first
    /// jump, flagged, since the true inverse lies below the identifiable
    /// range.
    pub fn quantile(&self, u: f64) -> QuantileValue {
        debug_assert!((0.0..=1.0).contains(&u));
        if self.jumps.is_empty() {
            return QuantileValue { value: f64::NAN, at_boundary: true };
        }
        if u <= self.floor {
            return QuantileValue { value: self.jumps[0].0, at_boundary: true };
        }
        let mut acc = self.floor;
        for &(loc, mass) in &self.jumps {
            acc += mass;
            if acc >= u {
                return QuantileValue { value: loc, at_boundary: false };
            }
        }
        QuantileValue { value: self.jumps.last().unwrap().0, at_boundary: true }
    }

    /// Jump-sum mean `Σ loc·mass` over the identified mass; the defect (and
    /// floor, which has no location) contributes nothing.
    pub fn mean(&self) -> f64 {
        self.jumps.iter().map(|&(loc, mass)| loc * mass).sum()
    }

    /// Translate every jump location by `c`.
    pub fn shift(&self, c: f64) -> StepDistribution {
        StepDistribution {
            jumps: self.jumps.iter().map(|&(loc, m)| (loc + c, m)).collect(),
            floor: self.floor,
        }
    }

    /// Largest absolute difference to `other` evaluated at both jump sets.
    pub fn sup_distance(&self, other: &StepDistribution) -> f64 {
        let mut sup: f64 = 0.0;
        for &(loc, _) in self.jumps.iter().chain(other.jumps.iter()) {
            sup = sup.max((self.cdf(loc) - other.cdf(loc)).abs());
            sup = sup.max((self.cdf_left(loc) - other.cdf_left(loc)).abs());
        }
        sup
    }
}
