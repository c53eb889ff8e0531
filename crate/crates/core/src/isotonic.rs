//! Weighted pool-adjacent-violators regression.
//!
//! This is the greatest-convex-minorant / smallest-concave-majorant
//! monotonization step for fitted probability curves and the monotone
//! maximum-likelihood fit for current-status data: the weighted least-squares
//! projection onto monotone vectors coincides with the binomial MLE over
//! monotone curves.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Weighted isotonic fit of `values` in the requested direction.
///
/// Idempotent; inputs already monotone come back unchanged. Weights must be
/// positive and of equal length.
pub fn isotonic_fit(values: &[f64], weights: &[f64], direction: Direction) -> Vec<f64> {
    assert_eq!(values.len(), weights.len());
    match direction {
        Direction::Increasing => pava_increasing(values, weights),
        Direction::Decreasing => {
            let negated: Vec<f64> = values.iter().map(|v| -v).collect();
            pava_increasing(&negated, weights).into_iter().map(|v| -v).collect()
        }
    }
}

fn pava_increasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    // Blocks of pooled indices: (pooled value, pooled weight, count).
    let mut level: Vec<f64> = Vec::with_capacity(n);
    let mut weight: Vec<f64> = Vec::with_capacity(n);
    let mut count: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        debug_assert!(weights[i] > 0.0, "isotonic weights must be positive");
        level.push(values[i]);
        weight.push(weights[i]);
        count.push(1);
        while level.len() > 1 {
            let j = level.len() - 1;
            if level[j - 1] <= level[j] {
                break;
            }
            let w = weight[j - 1] + weight[j];
            level[j - 1] = (weight[j - 1] * level[j - 1] + weight[j] * level[j]) / w;
            weight[j - 1] = w;
            count[j - 1] += count[j];
            level.pop();
            weight.pop();
            count.pop();
        }
    }
    let mut out = Vec::with_capacity(n);
    for (lv, c) in level.iter().zip(count.iter()) {
        out.extend(std::iter::repeat_n(*lv, *c));
    }
    out
}
