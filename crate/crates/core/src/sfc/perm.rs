// SPDX-License-Identifier: Apache-2.0

use crate::{Error, Result};

/// A sequence order over `n` points with its inverse.
///
/// `order[p]` is the original index of the point at sequence position `p`;
/// `inverse[i]` is the sequence position of original point `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    order: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            order: (0..n).collect(),
            inverse: (0..n).collect(),
        }
    }

    /// Validates that `order` is a bijection on `0..order.len()`.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut inverse = vec![usize::MAX; n];
        for (p, &i) in order.iter().enumerate() {
            if i >= n {
                return Err(Error::invalid(format!(
                    "index {i} at position {p} is out of range for {n} points"
                )));
            }
            if inverse[i] != usize::MAX {
                return Err(Error::invalid(format!(
                    "index {i} appears at positions {} and {p}",
                    inverse[i]
                )));
            }
            inverse[i] = p;
        }
        Ok(Permutation { order, inverse })
    }

    /// For orders produced internally as bijections.
    pub(crate) fn from_order_unchecked(order: Vec<usize>) -> Self {
        let mut inverse = vec![0; order.len()];
        for (p, &i) in order.iter().enumerate() {
            inverse[i] = p;
        }
        Permutation { order, inverse }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.order.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    #[inline]
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    #[inline]
    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    /// Original index at sequence position `p`.
    #[inline]
    pub fn point_at(&self, p: usize) -> usize {
        self.order[p]
    }

    /// Sequence position of original point `i`.
    #[inline]
    pub fn position_of(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn invert(&self) -> Permutation {
        Permutation {
            order: self.inverse.clone(),
            inverse: self.order.clone(),
        }
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }
}

/// Swaps the roles of order and inverse.
pub fn invert(perm: &Permutation) -> Permutation {
    perm.invert()
}
