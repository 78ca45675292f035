//! Subsets of the ground set `{0, .., n-1}`.
//!
//! A [`Subset`] is a sorted, duplicate-free element list. Ground sets with at
//! most 64 elements can also be handled as `u64` bit masks, which is what the
//! exhaustive routines use; both views describe the same sets.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset {
    elems: Vec<usize>,
}

impl Subset {
    pub fn empty() -> Self {
        Subset { elems: Vec::new() }
    }

    /// Builds a subset from arbitrary element order; duplicates are dropped.
    pub fn from_elems(elems: impl IntoIterator<Item = usize>) -> Self {
        let mut elems: Vec<usize> = elems.into_iter().collect();
        elems.sort_unstable();
        elems.dedup();
        Subset { elems }
    }

    /// The whole ground set of size `n`.
    pub fn full(n: usize) -> Self {
        Subset {
            elems: (0..n).collect(),
        }
    }

    pub fn from_mask(mask: u64) -> Self {
        let mut elems = Vec::with_capacity(mask.count_ones() as usize);
        let mut m = mask;
        while m != 0 {
            elems.push(m.trailing_zeros() as usize);
            m &= m - 1;
        }
        Subset { elems }
    }

    /// Bit mask view; `None` when an element does not fit in 64 bits.
    pub fn to_mask(&self) -> Option<u64> {
        let mut mask = 0u64;
        for &e in &self.elems {
            if e >= 64 {
                return None;
            }
            mask |= 1 << e;
        }
        Some(mask)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.elems.binary_search(&e).is_ok()
    }

    pub fn insert(&mut self, e: usize) -> bool {
        match self.elems.binary_search(&e) {
            Ok(_) => false,
            Err(pos) => {
                self.elems.insert(pos, e);
                true
            }
        }
    }

    pub fn remove(&mut self, e: usize) -> bool {
        match self.elems.binary_search(&e) {
            Ok(pos) => {
                self.elems.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn with(&self, e: usize) -> Subset {
        let mut s = self.clone();
        s.insert(e);
        s
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.elems.iter().copied()
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.elems.iter().all(|&e| other.contains(e))
    }

    /// Largest element plus one (0 for the empty set).
    pub fn span(&self) -> usize {
        self.elems.last().map_or(0, |&e| e + 1)
    }
}

impl From<Vec<usize>> for Subset {
    fn from(v: Vec<usize>) -> Self {
        Subset::from_elems(v)
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Subset::from_elems(iter)
    }
}

/// Lexicographic order on sorted element lists (a proper prefix sorts first).
impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.elems.cmp(&other.elems)
    }
}

/// Lexicographic comparison of two masks read as sorted element lists.
pub fn mask_lex_cmp(a: u64, b: u64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let diff = a ^ b;
    let e = diff.trailing_zeros();
    let above = if e >= 63 { 0 } else { !0u64 << (e + 1) };
    if b & (1 << e) != 0 {
        // b holds e, a does not: b < a iff a continues past e.
        if a & above != 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    } else if b & above != 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Neumaier-compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}
