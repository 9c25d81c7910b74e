#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut b = BitSet {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        b.trim();
        b
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.words[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        self.words[i >> 6] &= !(1 << (i & 63));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let t = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Clears bits `lo..hi`.
    pub fn clear_range(&mut self, lo: usize, hi: usize) {
        self.apply_range(lo, hi, |w, m| *w &= !m);
    }

    /// Sets bits `lo..hi`.
    pub fn set_range(&mut self, lo: usize, hi: usize) {
        self.apply_range(lo, hi, |w, m| *w |= m);
    }

    fn apply_range(&mut self, lo: usize, hi: usize, op: impl Fn(&mut u64, u64)) {
        let hi = hi.min(self.len);
        let mut i = lo;
        while i < hi {
            let off = i & 63;
            let take = (64 - off).min(hi - i);
            let mask = if take == 64 { u64::MAX } else { ((1u64 << take) - 1) << off };
            op(&mut self.words[i >> 6], mask);
            i += take;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let mut b = BitSet::new(200);
        b.set_range(3, 150);
        assert_eq!(b.count(), 147);
        b.clear_range(60, 130);
        assert_eq!(b.count(), 77);
        assert!(b.get(59) && !b.get(60) && !b.get(129) && b.get(130));
        let f = BitSet::full(70);
        assert_eq!(f.count(), 70);
        assert!(b.is_subset(&BitSet::full(200)));
        assert_eq!(b.iter().count(), 77);
    }
}
