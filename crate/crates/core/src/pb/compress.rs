//! Compress phase: merge runs of equal keys in a sorted bin.

use super::bins::Record;
use super::key::RadixKey;

/// Two-pointer merge over a sorted bin. The read pointer walks the array
/// once; the write pointer marks the record that absorbs equal keys. Sums
/// that cancel to zero stay as structural nonzeros. Returns the number of
/// surviving records, which occupy the front of `recs`.
pub fn compress_bin<K: RadixKey>(recs: &mut [Record<K>]) -> usize {
    if recs.is_empty() {
        return 0;
    }
    let mut write = 0usize;
    for read in 1..recs.len() {
        let cur = recs[read];
        let (key, value) = (cur.key, cur.value);
        if key == { recs[write].key } {
            let merged = recs[write].value + value;
            recs[write].value = merged;
        } else {
            write += 1;
            recs[write] = cur;
        }
    }
    write + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn pairs(recs: &[Record<u32>]) -> Vec<(u32, f64)> {
        recs.iter().map(|r| (r.key, r.value)).collect()
    }

    #[test]
    fn merges_runs() {
        let mut recs = vec![
            Record::new(5u32, 2.0),
            Record::new(5, 3.0),
            Record::new(9, 1.0),
        ];
        let n = compress_bin(&mut recs);
        assert_eq!(n, 2);
        assert_eq!(pairs(&recs[..n]), vec![(5, 5.0), (9, 1.0)]);
    }

    #[test]
    fn distinct_keys_untouched() {
        let mut recs: Vec<Record<u32>> = (0..10).map(|k| Record::new(k, k as f64)).collect();
        let before = recs.clone();
        assert_eq!(compress_bin(&mut recs), 10);
        assert_eq!(recs, before);
    }

    #[test]
    fn cancellation_keeps_zero() {
        let mut recs = vec![Record::new(1u32, 2.0), Record::new(1, -2.0)];
        assert_eq!(compress_bin(&mut recs), 1);
        assert_eq!(pairs(&recs[..1]), vec![(1, 0.0)]);
    }

    #[test]
    fn empty_bin() {
        let mut recs: Vec<Record<u32>> = vec![];
        assert_eq!(compress_bin(&mut recs), 0);
    }

    #[test]
    fn matches_group_by_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut keys: Vec<u32> = (0..2000).map(|_| rng.gen_range(0..300)).collect();
        keys.sort_unstable();
        let mut recs: Vec<Record<u32>> = keys
            .iter()
            .map(|&k| Record::new(k, (k % 7) as f64 + 0.5))
            .collect();
        let mut oracle: BTreeMap<u32, f64> = BTreeMap::new();
        for r in &recs {
            *oracle.entry(r.key).or_default() += r.value;
        }
        let n = compress_bin(&mut recs);
        assert_eq!(pairs(&recs[..n]), oracle.into_iter().collect::<Vec<_>>());
    }
}
