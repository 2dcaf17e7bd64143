use std::cmp::Ordering;
use std::fmt;

use crate::{Error, Result};

/// Largest ambient dimension supported by the bitmask representation.
pub const MAX_DIM: usize = 16;

/// Strictly increasing set of axes, stored as a bitmask.
///
/// Ordering is lexicographic on the ascending axis lists, so `{1,2} < {1,3} < {2,3}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(u32);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    /// Builds an index from 0-based axes, which must be strictly increasing.
    pub fn new(axes: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        let mut prev: Option<usize> = None;
        for &a in axes {
            if a >= MAX_DIM {
                return Err(Error::InvalidIndex(format!("axis {} out of range", a + 1)));
            }
            if prev.is_some_and(|p| a <= p) {
                return Err(Error::InvalidIndex(format!("{axes:?} is not strictly increasing")));
            }
            prev = Some(a);
            bits |= 1 << a;
        }
        Ok(MultiIndex(bits))
    }

    pub fn from_bits(bits: u32) -> Self {
        MultiIndex(bits)
    }

    pub fn single(axis: usize) -> Self {
        MultiIndex(1 << axis)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, axis: usize) -> bool {
        self.0 >> axis & 1 == 1
    }

    pub fn axes(self) -> impl Iterator<Item = usize> {
        let mut b = self.0;
        std::iter::from_fn(move || {
            if b == 0 {
                None
            } else {
                let a = b.trailing_zeros() as usize;
                b &= b - 1;
                Some(a)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.axes().collect()
    }

    /// Largest axis plus one, i.e. the smallest dimension containing the index.
    pub fn span(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    /// Complement in `{0..n}`.
    pub fn complement(self, n: usize) -> Self {
        MultiIndex(!self.0 & low_mask(n))
    }

    /// Sign and index of `e^self ∧ e^other`, or `None` when they overlap.
    pub fn wedge(self, other: Self) -> Option<(f64, Self)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut swaps = 0u32;
        for j in other.axes() {
            swaps += (self.0 >> (j + 1)).count_ones();
        }
        let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
        Some((sign, MultiIndex(self.0 | other.0)))
    }

    /// Sign and index of `i_{e_axis} e^self`, or `None` when the axis is absent.
    pub fn remove(self, axis: usize) -> Option<(f64, Self)> {
        if !self.contains(axis) {
            return None;
        }
        let pos = (self.0 & ((1u32 << axis) - 1)).count_ones();
        let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
        Some((sign, MultiIndex(self.0 & !(1 << axis))))
    }
}

pub(crate) fn low_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.axes().cmp(other.axes())
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "-");
        }
        let labels: Vec<String> = self.axes().map(|a| (a + 1).to_string()).collect();
        write!(f, "{}", labels.join(","))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e[{self}]")
    }
}

impl std::str::FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "-" {
            return Ok(MultiIndex::EMPTY);
        }
        let axes = s
            .split(',')
            .map(|t| match t.trim().parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::InvalidIndex(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        MultiIndex::new(&axes)
    }
}
