//! Finite posets on at most 64 elements, stored as reachability bitmasks.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// Largest poset handled by the down-set dynamic programme.
pub const MAX_DP_ELEMENTS: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    size: usize,
    /// `above[a]`: elements strictly greater than `a`.
    above: Vec<u64>,
    /// `below[a]`: elements strictly smaller than `a`.
    below: Vec<u64>,
}

impl Poset {
    /// Transitive closure of the cover relations `(a, b)` meaning `a < b`.
    /// Cycles are rejected.
    pub fn from_relations(size: usize, relations: &[(usize, usize)]) -> Result<Self> {
        if size > 64 {
            return Err(Error::BoundExceeded { what: "poset size", value: size, bound: 64 });
        }
        let mut above = vec![0u64; size];
        for &(a, b) in relations {
            if a >= size || b >= size {
                return Err(Error::InvalidArgument(format!("relation ({a}, {b}) out of range")));
            }
            above[a] |= 1u64 << b;
        }
        // Warshall on bit rows
        for k in 0..size {
            let kb = 1u64 << k;
            let row = above[k];
            for row_i in above.iter_mut() {
                if *row_i & kb != 0 {
                    *row_i |= row;
                }
            }
        }
        for (a, &row) in above.iter().enumerate() {
            if row >> a & 1 == 1 {
                return Err(Error::InvalidArgument("relations contain a cycle".into()));
            }
        }
        let mut below = vec![0u64; size];
        for (a, &row) in above.iter().enumerate() {
            for b in bits(row) {
                below[b] |= 1u64 << a;
            }
        }
        Ok(Self { size, above, below })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn full(&self) -> u64 {
        if self.size == 64 {
            u64::MAX
        } else {
            (1u64 << self.size) - 1
        }
    }

    /// Strict order `a < b`.
    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.above[a] >> b & 1 == 1
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        a == b || self.lt(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.lt(a, b) || self.lt(b, a)
    }

    pub fn strictly_above(&self, a: usize) -> u64 {
        self.above[a]
    }

    pub fn strictly_below(&self, a: usize) -> u64 {
        self.below[a]
    }

    pub fn is_antichain(&self, set: u64) -> bool {
        bits(set).all(|a| self.above[a] & set == 0)
    }

    /// Elements of `set` with no strict predecessor inside `set`.
    pub fn minimal_in(&self, set: u64) -> u64 {
        bits(set).filter(|&a| self.below[a] & set == 0).fold(0, |m, a| m | 1u64 << a)
    }

    /// The poset induced on `set`, elements renumbered in increasing order.
    pub fn restrict(&self, set: u64) -> Poset {
        let members: Vec<usize> = bits(set).collect();
        let index: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let remap = |row: u64| -> u64 {
            bits(row & set).fold(0u64, |m, b| m | 1u64 << index[&b])
        };
        let above = members.iter().map(|&a| remap(self.above[a])).collect();
        let below = members.iter().map(|&a| remap(self.below[a])).collect();
        Poset { size: members.len(), above, below }
    }

    /// Number of linear extensions, by dynamic programming over the down-sets
    /// reachable by adding one minimal element at a time.
    pub fn linear_extensions(&self) -> Result<BigInt> {
        if self.size > MAX_DP_ELEMENTS {
            return Err(Error::BoundExceeded {
                what: "poset size for linear extensions",
                value: self.size,
                bound: MAX_DP_ELEMENTS,
            });
        }
        // 32! < 2^118, so u128 cannot overflow here
        let full = self.full();
        let mut layer: HashMap<u64, u128> = HashMap::from([(0u64, 1u128)]);
        for _ in 0..self.size {
            let mut next: HashMap<u64, u128> = HashMap::with_capacity(layer.len() * 2);
            for (&down, &count) in &layer {
                for a in bits(self.minimal_in(full & !down)) {
                    *next.entry(down | 1u64 << a).or_insert(0) += count;
                }
            }
            layer = next;
        }
        Ok(BigInt::from(layer.get(&full).copied().unwrap_or(0)))
    }
}

/// Indices of set bits, lowest first.
pub fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_and_antichain() {
        let chain = Poset::from_relations(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(chain.lt(0, 3));
        assert_eq!(chain.linear_extensions().unwrap(), BigInt::from(1));
        let anti = Poset::from_relations(5, &[]).unwrap();
        assert_eq!(anti.linear_extensions().unwrap(), BigInt::from(120));
        assert!(anti.is_antichain(0b11111));
        assert!(!chain.is_antichain(0b0101));
    }

    #[test]
    fn cherry_under_root() {
        let p = Poset::from_relations(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(p.linear_extensions().unwrap(), BigInt::from(2));
        assert_eq!(p.minimal_in(0b111), 0b001);
        assert_eq!(p.minimal_in(0b110), 0b110);
        let r = p.restrict(0b110);
        assert_eq!(r.len(), 2);
        assert!(!r.comparable(0, 1));
    }

    #[test]
    fn cycles_rejected() {
        assert!(Poset::from_relations(2, &[(0, 1), (1, 0)]).is_err());
    }
}
