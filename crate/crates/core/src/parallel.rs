//! Static round-robin partitioning of an index range over scoped worker threads.
//!
//! Worker `w` of `k` handles the indices `i` with `i % k == w`. Per-index results
//! are returned in index order so that any reduction performed by the caller is
//! independent of the worker count.

use std::thread;

/// Evaluates `f` on every index in `0..len` and returns the results in index order.
pub fn map_indexed<T, F>(len: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.clamp(1, len.max(1));
    if workers == 1 {
        return (0..len).map(f).collect();
    }
    let f = &f;
    let mut buckets: Vec<Vec<(usize, T)>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..len)
                        .step_by(workers)
                        .map(|i| (i, f(i)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker thread panicked"))
            .collect()
    });
    let mut slots: Vec<Option<T>> = (0..len).map(|_| None).collect();
    for bucket in buckets.iter_mut() {
        for (i, value) in bucket.drain(..) {
            slots[i] = Some(value);
        }
    }
    slots
        .into_iter()
        .map(|s| s.expect("every index is assigned to exactly one worker"))
        .collect()
}

/// Like [`map_indexed`] for fallible work; the first error in index order wins.
pub fn try_map_indexed<T, E, F>(len: usize, workers: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync,
{
    map_indexed(len, workers, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_independent_of_worker_count() {
        let one = map_indexed(37, 1, |i| i * i);
        for k in [2, 3, 4, 8, 64] {
            assert_eq!(map_indexed(37, k, |i| i * i), one);
        }
    }

    #[test]
    fn empty_range() {
        assert!(map_indexed(0, 4, |i| i).is_empty());
    }

    #[test]
    fn first_error_in_index_order() {
        let r: Result<Vec<usize>, usize> =
            try_map_indexed(10, 3, |i| if i % 4 == 3 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(3));
    }
}
