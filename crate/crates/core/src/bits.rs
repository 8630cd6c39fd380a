//! Fixed-width bit vectors packed into 64-bit words.
//!
//! Knowledge sets and boolean-matrix rows share this layout, so the
//! set-vs-matrix cross-check reduces to direct row comparisons.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, bit: usize) {
        assert!(bit < self.len, "bit {bit} out of range {}", self.len);
        self.words[bit / 64] |= 1u64 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        assert!(bit < self.len, "bit {bit} out of range {}", self.len);
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    /// In-place union; both rows must have the same width.
    pub fn union_with(&mut self, other: &BitRow) {
        assert_eq!(self.len, other.len, "width mismatch");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    /// Indices of the set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    /// True iff `self` is a (non-strict) superset of `other`.
    pub fn contains_all(&self, other: &BitRow) -> bool {
        assert_eq!(self.len, other.len, "width mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .all(|(w, o)| w & o == *o)
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitRow[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_count() {
        let mut r = BitRow::zeros(70);
        assert_eq!(r.count(), 0);
        r.set(0);
        r.set(63);
        r.set(64);
        r.set(69);
        assert!(r.get(0) && r.get(63) && r.get(64) && r.get(69));
        assert!(!r.get(1));
        assert_eq!(r.count(), 4);
        assert_eq!(r.ones().collect::<Vec<_>>(), vec![0, 63, 64, 69]);
    }

    #[test]
    fn union_and_full() {
        let mut a = BitRow::zeros(5);
        let mut b = BitRow::zeros(5);
        for i in 0..3 {
            a.set(i);
        }
        for i in 2..5 {
            b.set(i);
        }
        assert!(!a.is_full());
        a.union_with(&b);
        assert!(a.is_full());
        assert!(a.contains_all(&b));
        assert!(!b.contains_all(&a));
    }
}
