//! Canonical ordering of unordered vertex pairs: the `n` vertex pairs
//! `{a,a}`, then the `n` boundary edges `{a,a+1}`, then the interior
//! diagonals in lexicographic order.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSets {
    n: usize,
    pairs: Vec<(usize, usize)>,
    lookup: Vec<usize>,
}

impl IndexSets {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
        pairs.extend((0..n).map(|a| (a, a)));
        pairs.extend((0..n).map(|a| (a, (a + 1) % n)));
        for a in 0..n {
            for b in (a + 2)..n {
                if !(a == 0 && b == n - 1) {
                    pairs.push((a, b));
                }
            }
        }
        let mut lookup = vec![usize::MAX; n * n];
        for (k, &(a, b)) in pairs.iter().enumerate() {
            lookup[a * n + b] = k;
            lookup[b * n + a] = k;
        }
        Ok(IndexSets { n, pairs, lookup })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `n(n+1)/2`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn vertex_pairs(&self) -> &[(usize, usize)] {
        &self.pairs[..self.n]
    }

    /// Edge `i` is `{i, i+1 mod n}`.
    pub fn edge_pairs(&self) -> &[(usize, usize)] {
        &self.pairs[self.n..2 * self.n]
    }

    pub fn diagonal_pairs(&self) -> &[(usize, usize)] {
        &self.pairs[2 * self.n..]
    }

    /// Position of the unordered pair `{a, b}` in the canonical ordering.
    pub fn position(&self, a: usize, b: usize) -> usize {
        self.lookup[(a % self.n) * self.n + (b % self.n)]
    }

    pub fn vertex_row(&self, a: usize) -> usize {
        a % self.n
    }

    /// Row of edge `{i, i+1}`.
    pub fn edge_row(&self, i: usize) -> usize {
        self.n + i % self.n
    }
}
