//! Fixed-partition fork/join over scoped threads.
//!
//! Work is always split into contiguous index ranges whose boundaries depend
//! only on the input and the requested part count, and results come back in
//! part order.

use std::ops::Range;

use crate::runtime::REDUCTION_CHUNK;
use crate::scalar::Scalar;

/// Boundaries splitting `0..n` into at most `parts` equal contiguous ranges.
pub(crate) fn even_bounds(n: usize, parts: usize) -> Vec<usize> {
    let parts = parts.clamp(1, n.max(1));
    (0..=parts).map(|p| p * n / parts).collect()
}

/// Boundaries splitting `0..n` so every range carries about the same weight.
/// `prefix(i)` is the cumulative weight of items `0..i` and must be
/// non-decreasing.
pub(crate) fn weighted_bounds(n: usize, parts: usize, prefix: impl Fn(usize) -> usize) -> Vec<usize> {
    let parts = parts.clamp(1, n.max(1));
    let total = prefix(n);
    let mut bounds = Vec::with_capacity(parts + 1);
    bounds.push(0);
    for p in 1..parts {
        let target = total * p / parts;
        // first i with prefix(i) >= target
        let (mut lo, mut hi) = (*bounds.last().unwrap(), n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if prefix(mid) < target {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        bounds.push(lo);
    }
    bounds.push(n);
    bounds
}

/// Runs `f` on every range `bounds[p]..bounds[p + 1]` and returns the results
/// in range order. A single range runs on the calling thread.
pub(crate) fn map_ranges<R, F>(bounds: &[usize], f: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<usize>) -> R + Sync,
{
    let ranges: Vec<Range<usize>> = bounds.windows(2).map(|w| w[0]..w[1]).collect();
    if ranges.len() <= 1 {
        return ranges.into_iter().map(&f).collect();
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|r| {
                let f = &f;
                s.spawn(move || f(r))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
            .collect()
    })
}

/// Splits `data` into consecutive chunks whose lengths are the gaps in `cuts`
/// (`cuts[0]` must be 0 and `cuts[last]` must be `data.len()`).
pub(crate) fn split_at_cuts<'a, T>(mut data: &'a mut [T], cuts: &[usize]) -> Vec<&'a mut [T]> {
    let mut out = Vec::with_capacity(cuts.len().saturating_sub(1));
    for w in cuts.windows(2) {
        let (head, tail) = std::mem::take(&mut data).split_at_mut(w[1] - w[0]);
        out.push(head);
        data = tail;
    }
    out
}

/// Runs `f(range, chunk)` for each range, where `chunk` is the slice of
/// `data` between `cuts` for that range.
pub(crate) fn for_each_split<T, F>(bounds: &[usize], data: &mut [T], cuts: &[usize], f: F)
where
    T: Send,
    F: Fn(Range<usize>, &mut [T]) + Sync,
{
    let chunks = split_at_cuts(data, cuts);
    let work: Vec<(Range<usize>, &mut [T])> = bounds
        .windows(2)
        .map(|w| w[0]..w[1])
        .zip(chunks)
        .collect();
    if work.len() <= 1 {
        for (r, c) in work {
            f(r, c);
        }
        return;
    }
    std::thread::scope(|s| {
        for (r, c) in work {
            let f = &f;
            s.spawn(move || f(r, c));
        }
    });
}

/// Sum of `term(0)..term(n - 1)`, `None` when `n == 0`.
///
/// Plain left-to-right order, or (`chunked`) serial sums over chunks of
/// [`REDUCTION_CHUNK`] terms combined pairwise. Neither grouping depends on
/// the thread count. The first term is taken as is, so a lone `-0` survives.
pub(crate) fn fold_terms<T: Scalar>(n: usize, chunked: bool, term: impl Fn(usize) -> T) -> Option<T> {
    if n == 0 {
        return None;
    }
    let serial = |r: Range<usize>| {
        let mut acc = term(r.start);
        for k in r.start + 1..r.end {
            acc = acc + term(k);
        }
        acc
    };
    if !chunked || n <= REDUCTION_CHUNK {
        return Some(serial(0..n));
    }
    let partials: Vec<T> = (0..n)
        .step_by(REDUCTION_CHUNK)
        .map(|s| serial(s..(s + REDUCTION_CHUNK).min(n)))
        .collect();
    Some(pairwise(partials))
}

/// Combines partials by adjacent pairs until one remains.
pub(crate) fn pairwise<T: Scalar>(mut level: Vec<T>) -> T {
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|p| if p.len() == 2 { p[0] + p[1] } else { p[0] })
            .collect();
    }
    level.pop().unwrap_or_else(T::zero)
}
