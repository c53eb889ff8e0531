//! Order-preserving map over independent work items, parallel when the
//! `parallel` feature is enabled. Results are collected in input order, so
//! parallel and sequential execution produce identical output.

#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Always-sequential variant; the benchmark suite compares this against
/// [`map`].
pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn parallel_and_sequential_agree_in_order() {
        let items: Vec<u64> = (0..257).collect();
        let a = super::map(&items, |&i| i * i + 1);
        let b = super::map_seq(&items, |&i| i * i + 1);
        assert_eq!(a, b);
    }
}
