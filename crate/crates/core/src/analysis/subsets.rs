//! Lexicographic enumeration of size-s index subsets, with unranking so
//! the range can be partitioned across workers.

/// Exact binomial coefficient, saturating at `u128::MAX` on overflow
/// (which is already far beyond any enumerable cap).
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) / i is exact at every step.
        acc = match acc.checked_mul((n - k + i) as u128) {
            Some(v) => v / i as u128,
            None => return u128::MAX,
        };
    }
    acc
}

/// The combination of lexicographic rank `rank` among all size-s subsets
/// of `{0, .., p-1}` (combinatorial number system).
pub fn unrank(p: usize, s: usize, mut rank: u64) -> Vec<usize> {
    debug_assert!((rank as u128) < binomial(p as u64, s as u64));
    let mut subset = Vec::with_capacity(s);
    let mut value = 0usize;
    for pos in 0..s {
        loop {
            // Subsets that fix `value` at this position.
            let count = binomial((p - 1 - value) as u64, (s - 1 - pos) as u64);
            if (rank as u128) < count {
                break;
            }
            rank -= count as u64;
            value += 1;
        }
        subset.push(value);
        value += 1;
    }
    subset
}

/// Advance to the next combination in lexicographic order; `false` once
/// exhausted.
pub fn next_combination(subset: &mut [usize], p: usize) -> bool {
    let s = subset.len();
    let mut i = s;
    while i > 0 {
        i -= 1;
        if subset[i] < p - s + i {
            subset[i] += 1;
            for j in i + 1..s {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
