//! Fixed-size bitset over assignment indices, used to track satisfying sets.

/// A set of indices in `[0, len)` backed by `u64` words, with a cached
/// population count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
    count: usize,
}

impl BitSet {
    /// All indices present.
    pub fn full(len: usize) -> Self {
        let n_words = len.div_ceil(64);
        let mut words = vec![u64::MAX; n_words];
        if !len.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (len % 64)) - 1;
            }
        }
        BitSet { words, len, count: len }
    }

    pub fn empty(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
            len,
            count: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Number of indices present.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn contains(&self, idx: u64) -> bool {
        debug_assert!((idx as usize) < self.len);
        self.words[(idx / 64) as usize] >> (idx % 64) & 1 == 1
    }

    pub fn insert(&mut self, idx: u64) {
        debug_assert!((idx as usize) < self.len);
        let w = &mut self.words[(idx / 64) as usize];
        let bit = 1u64 << (idx % 64);
        if *w & bit == 0 {
            *w |= bit;
            self.count += 1;
        }
    }

    pub fn remove(&mut self, idx: u64) {
        debug_assert!((idx as usize) < self.len);
        let w = &mut self.words[(idx / 64) as usize];
        let bit = 1u64 << (idx % 64);
        if *w & bit != 0 {
            *w &= !bit;
            self.count -= 1;
        }
    }

    /// Iterates present indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as u64;
                    w &= w - 1;
                    Some(wi as u64 * 64 + bit)
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_remove() {
        let mut s = BitSet::full(100);
        assert_eq!(s.count(), 100);
        assert!(s.contains(99));
        s.remove(99);
        s.remove(0);
        s.remove(0);
        assert_eq!(s.count(), 98);
        assert!(!s.contains(99));
        assert_eq!(s.iter().count(), 98);
    }

    #[test]
    fn iter_order() {
        let mut s = BitSet::empty(130);
        for idx in [128, 3, 64, 5] {
            s.insert(idx);
        }
        let got: Vec<u64> = s.iter().collect();
        assert_eq!(got, vec![3, 5, 64, 128]);
    }
}
