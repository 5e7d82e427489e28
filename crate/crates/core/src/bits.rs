/// Fixed-capacity set of small integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(capacity: usize) -> Self {
        BitSet {
            words: vec![0; capacity.div_ceil(64)],
        }
    }

    pub fn from_iter(capacity: usize, items: impl IntoIterator<Item = u32>) -> Self {
        let mut s = Self::new(capacity);
        for x in items {
            s.insert(x);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, x: u32) {
        self.words[x as usize / 64] |= 1 << (x % 64);
    }

    #[inline]
    pub fn remove(&mut self, x: u32) {
        self.words[x as usize / 64] &= !(1 << (x % 64));
    }

    #[inline]
    pub fn contains(&self, x: u32) -> bool {
        self.words[x as usize / 64] >> (x % 64) & 1 == 1
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first(&self) -> Option<u32> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| (i * 64) as u32 + w.trailing_zeros())
    }

    /// Smallest common element.
    pub fn first_common(&self, other: &BitSet) -> Option<u32> {
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find(|(_, (a, b))| *a & *b != 0)
            .map(|(i, (a, b))| (i * 64) as u32 + (a & b).trailing_zeros())
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let t = w.trailing_zeros();
                    w &= w - 1;
                    (i * 64) as u32 + t
                })
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::BitSet;

    #[test]
    fn basic_ops() {
        let mut a = BitSet::from_iter(130, [0, 5, 64, 129]);
        assert_eq!(a.len(), 4);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 5, 64, 129]);
        a.remove(0);
        assert_eq!(a.first(), Some(5));
        let b = BitSet::from_iter(130, [64, 100, 129]);
        assert_eq!(a.first_common(&b), Some(64));
        a.intersect_with(&b);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![64, 129]);
        assert!(a.contains(129) && !a.contains(100));
    }
}
