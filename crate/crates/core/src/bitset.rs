//! Fixed-width bitsets over atom indices.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

const WORD: usize = 64;

/// A subset of `{0, .., len-1}`; the element representation of every finite
/// Boolean algebra in this crate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomSet {
    len: usize,
    words: Vec<u64>,
}

impl AtomSet {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.trim();
        s
    }

    pub fn singleton(len: usize, bit: usize) -> Self {
        let mut s = Self::empty(len);
        s.insert(bit);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, bits: I) -> Self {
        let mut s = Self::empty(len);
        for b in bits {
            s.insert(b);
        }
        s
    }

    /// Interprets the low `len` bits of `mask`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= WORD);
        let mut s = Self::empty(len);
        if len > 0 {
            s.words[0] = mask;
            s.trim();
        }
        s
    }

    fn trim(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn contains(&self, bit: usize) -> bool {
        debug_assert!(bit < self.len);
        self.words[bit / WORD] >> (bit % WORD) & 1 == 1
    }

    pub fn insert(&mut self, bit: usize) -> bool {
        assert!(bit < self.len, "bit {bit} out of range {}", self.len);
        let w = &mut self.words[bit / WORD];
        let mask = 1u64 << (bit % WORD);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    pub fn remove(&mut self, bit: usize) -> bool {
        assert!(bit < self.len);
        let w = &mut self.words[bit / WORD];
        let mask = 1u64 << (bit % WORD);
        let had = *w & mask != 0;
        *w &= !mask;
        had
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.len
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn meet(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn join(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    pub fn union_with(&mut self, other: &Self) {
        self.check_len(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn sym_diff(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a ^ b)
    }

    pub fn complement(&self) -> Self {
        let mut s = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.trim();
        s
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.check_len(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.check_len(other);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * WORD + t)
                }
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// Re-expresses this set over a new index space; `map[i]` is the new index of bit `i`.
    pub fn remap(&self, new_len: usize, map: &[usize]) -> Self {
        Self::from_indices(new_len, self.iter().map(|i| map[i]))
    }

    #[inline]
    fn check_len(&self, other: &Self) {
        debug_assert_eq!(self.len, other.len, "atom set length mismatch");
    }

    fn zip(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        self.check_len(other);
        Self {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        }
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}/{}", self.len)
    }
}

#[derive(Serialize, Deserialize)]
struct AtomSetRepr {
    len: usize,
    bits: Vec<usize>,
}

impl Serialize for AtomSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AtomSetRepr {
            len: self.len,
            bits: self.iter().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AtomSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = AtomSetRepr::deserialize(d)?;
        if let Some(bad) = r.bits.iter().find(|b| **b >= r.len) {
            return Err(serde::de::Error::custom(format!(
                "bit {bad} out of range {}",
                r.len
            )));
        }
        Ok(AtomSet::from_indices(r.len, r.bits))
    }
}
