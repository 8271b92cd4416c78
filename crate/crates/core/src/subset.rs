use std::cmp::Ordering;
use std::fmt;

/// A set of pole indices stored as a bitmask; bit `i` is pole `i + 1`.
///
/// Ordering is lexicographic on the ascending list of indices, so
/// `{1} < {1,2} < {1,3} < {2}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct IndexSubset(u64);

impl IndexSubset {
    pub const fn from_mask(mask: u64) -> Self {
        Self(mask)
    }

    /// Build from 1-based indices. Returns `None` for index 0 or above 64.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Option<Self> {
        let mut mask = 0u64;
        for idx in indices {
            if idx == 0 || idx > 64 {
                return None;
            }
            mask |= 1 << (idx - 1);
        }
        Some(Self(mask))
    }

    /// `{1..n}`.
    pub fn full(n: usize) -> Self {
        Self(full_mask(n))
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// 1-based membership test.
    pub fn contains(self, idx: usize) -> bool {
        (1..=64).contains(&idx) && self.0 >> (idx - 1) & 1 == 1
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Nonempty, and a strict subset of `{1..n}`.
    pub fn is_proper(self, n: usize) -> bool {
        self.0 != 0 && self.0 & !full_mask(n) == 0 && self.0 != full_mask(n)
    }

    pub fn complement(self, n: usize) -> Self {
        Self(full_mask(n) & !self.0)
    }

    /// The member of `{self, complement}` that contains index 1.
    pub fn canonical(self, n: usize) -> Self {
        if self.0 & 1 == 1 {
            self
        } else {
            self.complement(n)
        }
    }

    /// Smallest index, 1-based.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// Ascending 1-based indices.
    pub fn indices(self) -> impl Iterator<Item = usize> + Clone {
        bits(self.0).map(|b| b + 1)
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }
}

impl Ord for IndexSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices().cmp(other.indices())
    }
}

impl PartialOrd for IndexSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, idx) in self.indices().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{idx}")?;
        }
        f.write_str("}")
    }
}

/// Mask with the low `n` bits set.
pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Ascending 0-based bit positions of `mask`.
pub fn bits(mut mask: u64) -> impl Iterator<Item = usize> + Clone {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

/// Sort key used for generator selection: cardinality, then lexicographic.
pub fn size_then_lex(a: &IndexSubset, b: &IndexSubset) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}
