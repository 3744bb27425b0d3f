//! In-place MSD byte radix sort of bin records (American flag sort).

use super::bins::Record;
use super::key::RadixKey;

/// Subproblems shorter than this go to insertion sort.
pub const INSERTION_THRESHOLD: usize = 32;

/// Sorts `recs` ascending by key, in place. Not stable; equal keys are
/// summed later so their order does not matter.
pub fn sort_bin<K: RadixKey>(recs: &mut [Record<K>]) {
    if recs.len() < 2 {
        return;
    }
    let first = recs[0].key.to_u64();
    let diff = recs
        .iter()
        .fold(0u64, |acc, r| acc | (r.key.to_u64() ^ first));
    if diff == 0 {
        return;
    }
    // Bytes above the highest differing bit are equal across the bin.
    let top_byte = (63 - diff.leading_zeros()) as usize / 8;
    radix_pass(recs, top_byte);
}

fn radix_pass<K: RadixKey>(recs: &mut [Record<K>], byte: usize) {
    if recs.len() < INSERTION_THRESHOLD {
        insertion_sort(recs);
        return;
    }

    let mut counts = [0usize; 256];
    for r in recs.iter() {
        counts[r.key.byte(byte)] += 1;
    }

    if counts.contains(&recs.len()) {
        // Constant byte: nothing to move at this level.
        if byte > 0 {
            radix_pass(recs, byte - 1);
        }
        return;
    }

    let mut ends = [0usize; 256];
    let mut sum = 0usize;
    for (end, &c) in ends.iter_mut().zip(&counts) {
        sum += c;
        *end = sum;
    }
    let mut next = [0usize; 256];
    next[1..].copy_from_slice(&ends[..255]);

    // Cycle leader permutation: carry a displaced record to its bucket until
    // one belonging to the current bucket comes back.
    for bucket in 0..256 {
        while next[bucket] < ends[bucket] {
            let from = next[bucket];
            let mut carried = recs[from];
            let mut d = carried.key.byte(byte);
            while d != bucket {
                let to = next[d];
                next[d] += 1;
                std::mem::swap(&mut carried, &mut recs[to]);
                d = carried.key.byte(byte);
            }
            recs[from] = carried;
            next[bucket] += 1;
        }
    }

    if byte == 0 {
        return;
    }
    let mut start = 0;
    for &end in &ends {
        if end - start > 1 {
            radix_pass(&mut recs[start..end], byte - 1);
        }
        start = end;
    }
}

fn insertion_sort<K: RadixKey>(recs: &mut [Record<K>]) {
    for i in 1..recs.len() {
        let cur = recs[i];
        let key = cur.key;
        let mut j = i;
        while j > 0 && { recs[j - 1].key } > key {
            recs[j] = recs[j - 1];
            j -= 1;
        }
        recs[j] = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn keys<K: RadixKey>(recs: &[Record<K>]) -> Vec<K> {
        recs.iter().map(|r| r.key).collect()
    }

    /// Comparison-sort oracle over (key, value bits); equal keys may come
    /// out of the radix sort in any order, so both sides are normalized.
    fn as_pairs<K: RadixKey>(recs: &[Record<K>]) -> Vec<(K, u64)> {
        let mut v: Vec<(K, u64)> = recs.iter().map(|r| (r.key, r.value.to_bits())).collect();
        v.sort();
        v
    }

    #[test]
    fn already_sorted_unchanged() {
        let mut recs: Vec<Record<u32>> = (0..500).map(|k| Record::new(k * 3, k as f64)).collect();
        let before = recs.clone();
        sort_bin(&mut recs);
        assert_eq!(recs, before);
    }

    #[test]
    fn reverse_random_matches_comparison_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut ks: Vec<u32> = (0..1000).map(|_| rng.gen()).collect();
        ks.sort_unstable_by(|a, b| b.cmp(a));
        let mut recs: Vec<Record<u32>> = ks
            .iter()
            .enumerate()
            .map(|(i, &k)| Record::new(k, i as f64))
            .collect();
        let oracle = as_pairs(&recs);
        sort_bin(&mut recs);
        assert!(keys(&recs).windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(as_pairs(&recs), oracle);
    }

    #[test]
    fn all_equal_keys() {
        let mut recs: Vec<Record<u64>> = (0..100).map(|i| Record::new(42, i as f64)).collect();
        let before = recs.clone();
        sort_bin(&mut recs);
        assert_eq!(recs, before);
    }

    #[test]
    fn wide_keys_with_constant_middle_bytes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut recs: Vec<Record<u64>> = (0..5000)
            .map(|i| {
                let hi: u64 = rng.gen_range(0..4);
                let lo: u64 = rng.gen_range(0..300);
                Record::new(hi << 56 | 0x00ab_cd00_0000_0000 | lo, i as f64)
            })
            .collect();
        let oracle = as_pairs(&recs);
        sort_bin(&mut recs);
        assert_eq!(as_pairs(&recs), oracle);
        assert!(keys(&recs).windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn tiny_inputs() {
        let mut empty: Vec<Record<u32>> = vec![];
        sort_bin(&mut empty);
        let mut one = vec![Record::new(3u32, 1.0)];
        sort_bin(&mut one);
        let mut few = vec![
            Record::new(3u32, 1.0),
            Record::new(1, 2.0),
            Record::new(2, 3.0),
        ];
        sort_bin(&mut few);
        assert_eq!(keys(&few), vec![1, 2, 3]);
    }
}
