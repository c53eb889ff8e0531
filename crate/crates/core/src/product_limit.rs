//! Shared machinery for product-limit estimators.
//!
//! Every estimator of this family is a product over event records of
//! `1 - w_i / R(v_i)`, where `w_i` is the record's kernel weight and `R(v)`
//! is the weighted mass of records whose observation interval brackets `v`.
//! Records with zero weight contribute a unit factor (the 0/0 = 0
//! convention: a zero denominator can only occur together with a zero
//! numerator because every record is in its own risk set).

use crate::step::StepDistribution;

/// Values sorted ascending with the permutation that sorts them, so that
/// per-evaluation weight vectors can be prefix-summed without re-sorting.
#[derive(Debug, Clone)]
pub(crate) struct SortedValues {
    pub order: Vec<usize>,
    pub values: Vec<f64>,
}

impl SortedValues {
    pub fn new(raw: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
        let values = order.iter().map(|&i| raw[i]).collect();
        SortedValues { order, values }
    }
}

/// Prefix-summed weights over a sorted value axis.
#[derive(Debug)]
pub(crate) struct WeightedPrefix<'a> {
    sorted: &'a SortedValues,
    // cum[k] = total weight of the k smallest records
    cum: Vec<f64>,
}

impl<'a> WeightedPrefix<'a> {
    pub fn new(sorted: &'a SortedValues, weights: &[f64]) -> Self {
        let mut cum = Vec::with_capacity(sorted.order.len() + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for &i in &sorted.order {
            acc += weights[i];
            cum.push(acc);
        }
        WeightedPrefix { sorted, cum }
    }

    /// Total weight of records with value ≤ v.
    pub fn sum_le(&self, v: f64) -> f64 {
        let k = self.sorted.values.partition_point(|&x| x <= v);
        self.cum[k]
    }

    /// Total weight of records with value < v.
    pub fn sum_lt(&self, v: f64) -> f64 {
        let k = self.sorted.values.partition_point(|&x| x < v);
        self.cum[k]
    }
}

/// Risk mass `R(v) = Σ_j w_j · 1{entry_j ≤ v ≤ exit_j}` with prefix sums over
/// both axes.
pub(crate) struct RiskMass<'a> {
    entry: WeightedPrefix<'a>,
    exit: WeightedPrefix<'a>,
}

impl<'a> RiskMass<'a> {
    pub fn new(
        entry_sorted: &'a SortedValues,
        exit_sorted: &'a SortedValues,
        weights: &[f64],
    ) -> Self {
        RiskMass {
            entry: WeightedPrefix::new(entry_sorted, weights),
            exit: WeightedPrefix::new(exit_sorted, weights),
        }
    }

    pub fn at(&self, v: f64) -> f64 {
        self.entry.sum_le(v) - self.exit.sum_lt(v)
    }
}

/// One event record: the event value, the record's weight and the risk mass
/// at the event value.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PlEvent {
    pub value: f64,
    pub weight: f64,
    pub risk: f64,
}

fn group_factors(events: &mut [PlEvent]) -> Vec<(f64, f64)> {
    // (distinct value, factor), ascending in value. Tied events are
    // processed jointly against the shared risk set, the standard
    // product-limit convention: factor(v) = 1 - (Σ tied weights) / R(v).
    events.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut grouped: Vec<(f64, f64, f64)> = Vec::new(); // value, weight sum, risk
    for ev in events.iter() {
        if ev.weight <= 0.0 {
            continue;
        }
        match grouped.last_mut() {
            Some(last) if last.0 == ev.value => {
                last.1 += ev.weight;
                debug_assert!((last.2 - ev.risk).abs() <= 1e-9 * ev.risk.abs().max(1.0));
            }
            _ => grouped.push((ev.value, ev.weight, ev.risk)),
        }
    }
    grouped
        .into_iter()
        .map(|(value, weight, risk)| {
            debug_assert!(risk >= weight - 1e-9 * weight.abs().max(1.0));
            let factor = if risk > 0.0 { 1.0 - weight / risk } else { 1.0 };
            (value, factor.max(0.0))
        })
        .collect()
}

/// Forward product: survival `S(y) = Π_{v ≤ y} factor(v)`, returned as the
/// CDF `1 - S` with jumps at the event values. Any survival left at the top
/// is the defect.
pub(crate) fn forward_product(events: &mut [PlEvent]) -> StepDistribution {
    let grouped = group_factors(events);
    let mut jumps = Vec::with_capacity(grouped.len());
    let mut survival = 1.0;
    for (value, factor) in grouped {
        let mass = survival * (1.0 - factor);
        if mass > 0.0 {
            jumps.push((value, mass));
        }
        survival *= factor;
    }
    StepDistribution::new(jumps, 0.0)
}

/// Reverse-time product: CDF `F(y) = Π_{v > y} factor(v)`, with jumps at the
/// event values and the bottom remainder `Π_all factor` as the floor.
pub(crate) fn reverse_product(events: &mut [PlEvent]) -> StepDistribution {
    let grouped = group_factors(events);
    let mut jumps = Vec::with_capacity(grouped.len());
    let mut above = 1.0;
    for &(value, factor) in grouped.iter().rev() {
        let mass = above * (1.0 - factor);
        if mass > 0.0 {
            jumps.push((value, mass));
        }
        above *= factor;
    }
    StepDistribution::new(jumps, above)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn risk_mass_counts_bracketing_records() {
        let entries = [0.0, 0.5, 1.5];
        let exits = [1.0, 2.0, 3.0];
        let se = SortedValues::new(&entries);
        let sx = SortedValues::new(&exits);
        let risk = RiskMass::new(&se, &sx, &[1.0, 1.0, 1.0]);
        assert_eq!(risk.at(1.0), 2.0);
        assert_eq!(risk.at(2.0), 2.0);
        assert_eq!(risk.at(3.0), 1.0);
        assert_eq!(risk.at(-0.1), 0.0);
    }

    #[test]
    fn forward_product_is_empirical_cdf_without_truncation() {
        // Entry below everything: risk at the k-th smallest value is n-k+1.
        let ys = [3.0, 1.0, 2.0];
        let sy = SortedValues::new(&ys);
        let entries = [-10.0, -10.0, -10.0];
        let se = SortedValues::new(&entries);
        let risk = RiskMass::new(&se, &sy, &[1.0; 3]);
        let mut events: Vec<PlEvent> = ys
            .iter()
            .map(|&y| PlEvent { value: y, weight: 1.0, risk: risk.at(y) })
            .collect();
        let d = forward_product(&mut events);
        assert_eq!(d.jumps().len(), 3);
        for (k, &(loc, _)) in d.jumps().iter().enumerate() {
            assert!((d.cdf(loc) - (k + 1) as f64 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn reverse_product_is_empirical_cdf_without_truncation() {
        // Exit above everything: risk at the k-th smallest value is k.
        let ys = [3.0, 1.0, 2.0];
        let sy = SortedValues::new(&ys);
        let exits = [10.0, 10.0, 10.0];
        let sx = SortedValues::new(&exits);
        let risk = RiskMass::new(&sy, &sx, &[1.0; 3]);
        let mut events: Vec<PlEvent> = ys
            .iter()
            .map(|&y| PlEvent { value: y, weight: 1.0, risk: risk.at(y) })
            .collect();
        let d = reverse_product(&mut events);
        assert_eq!(d.floor(), 0.0);
        for (k, &(loc, _)) in d.jumps().iter().enumerate() {
            assert!((d.cdf(loc) - (k + 1) as f64 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_weight_events_contribute_nothing() {
        let mut events = vec![
            PlEvent { value: 1.0, weight: 0.0, risk: 0.0 },
            PlEvent { value: 2.0, weight: 1.0, risk: 1.0 },
        ];
        let d = forward_product(&mut events);
        assert_eq!(d.jumps(), &[(2.0, 1.0)]);
    }
}
