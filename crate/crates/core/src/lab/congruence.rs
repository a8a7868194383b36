//! Congruences of finite lattices.

use serde::{Deserialize, Serialize};

use crate::lattice::FinLattice;

/// A partition of the universe, stored as a block index per element. Blocks
/// are numbered in order of their least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Congruence {
    pub block_of: Vec<usize>,
}

impl Congruence {
    pub fn identity(n: usize) -> Self {
        Congruence {
            block_of: (0..n).collect(),
        }
    }

    /// Normalizes an arbitrary block assignment.
    pub fn from_blocks(raw: &[usize]) -> Self {
        let mut seen = std::collections::HashMap::new();
        let block_of = raw
            .iter()
            .map(|r| {
                let next = seen.len();
                *seen.entry(*r).or_insert(next)
            })
            .collect();
        Congruence { block_of }
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn relates(&self, x: usize, y: usize) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    pub fn block_count(&self) -> usize {
        self.block_of.iter().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (x, &b) in self.block_of.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    pub fn is_full(&self) -> bool {
        self.block_count() <= 1
    }

    pub fn is_trivial(&self) -> bool {
        self.block_count() == self.len()
    }

    /// Whether the partition is compatible with both operations.
    pub fn is_congruence(&self, l: &FinLattice) -> bool {
        let n = l.len();
        for x in 0..n {
            for y in x + 1..n {
                if !self.relates(x, y) {
                    continue;
                }
                for z in 0..n {
                    if !self.relates(l.join(x, z), l.join(y, z))
                        || !self.relates(l.meet(x, z), l.meet(y, z))
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Whether every pair related here is related in `other`.
    pub fn refines(&self, other: &Congruence) -> bool {
        (0..self.len())
            .all(|x| (x + 1..self.len()).all(|y| !self.relates(x, y) || other.relates(x, y)))
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        let (lo, hi) = (rx.min(ry), rx.max(ry));
        self.parent[hi] = lo;
        true
    }
}

/// `Cg(a, b)`: close `{(a, b)}` under translations `x ↦ x ∨ z`, `x ↦ x ∧ z`
/// and equivalence. Every merged pair is translated once by every element.
pub fn principal_congruence(l: &FinLattice, a: usize, b: usize) -> Congruence {
    generated_congruence(l, &[(a, b)])
}

/// The least congruence relating every given pair.
pub fn generated_congruence(l: &FinLattice, pairs: &[(usize, usize)]) -> Congruence {
    let n = l.len();
    let mut uf = UnionFind {
        parent: (0..n).collect(),
    };
    let mut work: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in pairs {
        if uf.union(a, b) {
            work.push((a, b));
        }
    }
    while let Some((x, y)) = work.pop() {
        for z in 0..n {
            for (p, q) in [(l.join(x, z), l.join(y, z)), (l.meet(x, z), l.meet(y, z))] {
                if uf.union(p, q) {
                    work.push((p, q));
                }
            }
        }
    }
    let raw: Vec<usize> = (0..n).map(|x| uf.find(x)).collect();
    Congruence::from_blocks(&raw)
}
