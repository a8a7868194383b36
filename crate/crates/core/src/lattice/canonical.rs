//! Canonical labeling by partition refinement and individualization.
//!
//! The search is generic over the order relation; the leaf code decides what
//! "identical" means (join table for lattices, order matrix for posets).

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::poset::Poset;
use super::table::FinLattice;
use crate::error::{Error, Result};

/// Isomorphism-invariant code of a finite lattice: the element count followed by
/// the join table under the canonical labeling.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeCode(Vec<u16>);

impl LatticeCode {
    pub fn element_count(&self) -> usize {
        self.0[0] as usize
    }

    pub fn as_slice(&self) -> &[u16] {
        &self.0
    }

    /// Rebuilds the canonically labeled lattice.
    pub fn to_lattice(&self) -> Result<FinLattice> {
        let n = self.element_count();
        if self.0.len() != n * n + 1 {
            return Err(Error::TableShape {
                expected: n * n + 1,
                got: self.0.len(),
            });
        }
        let join: Vec<usize> = self.0[1..].iter().map(|&v| v as usize).collect();
        let order = Poset::from_relation(n, |a, b| join[a * n + b] == b)?;
        let l = FinLattice::from_poset(&order)?;
        if l.join_table()
            .iter()
            .map(|&v| v as usize)
            .ne(join.iter().copied())
        {
            return Err(Error::Malformed("code is not a join table".into()));
        }
        Ok(l)
    }
}

impl fmt::Display for LatticeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.0[1..].iter().map(|v| v.to_string()).collect();
        write!(f, "{}:{}", self.0[0], body.join(" "))
    }
}

impl std::str::FromStr for LatticeCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Malformed(format!("lattice code {s:?}"));
        let (n, body) = s.split_once(':').ok_or_else(bad)?;
        let mut v = vec![n.parse::<u16>().map_err(|_| bad())?];
        for tok in body.split_whitespace() {
            v.push(tok.parse().map_err(|_| bad())?);
        }
        Ok(LatticeCode(v))
    }
}

impl Serialize for LatticeCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LatticeCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub code: LatticeCode,
    /// `relabel[old] = new`; an isomorphism onto the canonical copy.
    pub relabel: Vec<usize>,
}

pub fn canonical_form(l: &FinLattice) -> CanonicalForm {
    let n = l.len();
    let up: Vec<FixedBitSet> = (0..n).map(|a| l.order().up(a).clone()).collect();
    let leaf = |perm: &[usize]| {
        let mut code = vec![0u16; n * n + 1];
        code[0] = n as u16;
        for a in 0..n {
            for b in 0..n {
                code[1 + perm[a] * n + perm[b]] = perm[l.join(a, b)] as u16;
            }
        }
        code
    };
    let (code, relabel) = canonical_labeling(&up, &leaf);
    CanonicalForm {
        code: LatticeCode(code),
        relabel,
    }
}

/// The canonically labeled copy of `l` (constants carried along).
pub fn canonical_copy(l: &FinLattice) -> (FinLattice, CanonicalForm) {
    let cf = canonical_form(l);
    (l.relabel(&cf.relabel), cf)
}

/// Isomorphism-invariant code of a poset (count, then the order matrix).
pub fn poset_code(p: &Poset) -> (Vec<u16>, Vec<usize>) {
    let n = p.len();
    let up: Vec<FixedBitSet> = (0..n).map(|a| p.up(a).clone()).collect();
    let leaf = |perm: &[usize]| {
        let mut code = vec![0u16; n * n + 1];
        code[0] = n as u16;
        for a in 0..n {
            for b in p.up(a).ones() {
                code[1 + perm[a] * n + perm[b]] = 1;
            }
        }
        code
    };
    canonical_labeling(&up, &leaf)
}

/// Returns the lexicographically least leaf code and a labeling achieving it.
pub(crate) fn canonical_labeling(
    up: &[FixedBitSet],
    leaf: &dyn Fn(&[usize]) -> Vec<u16>,
) -> (Vec<u16>, Vec<usize>) {
    let n = up.len();
    if n == 0 {
        return (leaf(&[]), Vec::new());
    }
    let mut down = vec![FixedBitSet::with_capacity(n); n];
    for (a, row) in up.iter().enumerate() {
        for b in row.ones() {
            down[b].insert(a);
        }
    }
    let mut s = Search {
        n,
        up,
        down: &down,
        leaf,
        best: None,
        first: None,
        autos: Vec::new(),
    };
    let colors = s.initial_colors();
    let mut path = Vec::new();
    s.search(colors, &mut path);
    let (code, perm) = s.best.expect("at least one leaf");
    (code, perm)
}

/// Cap on stored automorphisms; more only costs time in orbit pruning.
const MAX_AUTOS: usize = 64;

struct Search<'a> {
    n: usize,
    up: &'a [FixedBitSet],
    down: &'a [FixedBitSet],
    leaf: &'a dyn Fn(&[usize]) -> Vec<u16>,
    best: Option<(Vec<u16>, Vec<usize>)>,
    first: Option<(Vec<u16>, Vec<usize>, Vec<usize>)>,
    autos: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn initial_colors(&self) -> Vec<u32> {
        let p = Poset::from_up_rows(self.up.to_vec());
        let (h, d) = (p.heights(), p.depths());
        let keys: Vec<_> = (0..self.n)
            .map(|a| {
                (
                    self.down[a].count_ones(..),
                    self.up[a].count_ones(..),
                    h[a],
                    d[a],
                )
            })
            .collect();
        let mut colors = rank(&keys);
        self.refine(&mut colors);
        colors
    }

    /// Equitable refinement: split cells by how many strict predecessors and
    /// successors each element has in every cell.
    fn refine(&self, colors: &mut Vec<u32>) {
        let n = self.n;
        loop {
            let k = colors.iter().max().map_or(0, |&m| m as usize + 1);
            if k == n {
                return;
            }
            let sigs: Vec<Vec<u32>> = (0..n)
                .map(|x| {
                    let mut sig = vec![0u32; 2 * k + 1];
                    sig[0] = colors[x];
                    for y in self.down[x].ones() {
                        if y != x {
                            sig[1 + colors[y] as usize] += 1;
                        }
                    }
                    for y in self.up[x].ones() {
                        if y != x {
                            sig[1 + k + colors[y] as usize] += 1;
                        }
                    }
                    sig
                })
                .collect();
            let next = rank(&sigs);
            let k2 = next.iter().max().map_or(0, |&m| m as usize + 1);
            *colors = next;
            if k2 == k {
                return;
            }
        }
    }

    fn search(&mut self, colors: Vec<u32>, path: &mut Vec<usize>) -> Option<usize> {
        let n = self.n;
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let Some(target) = sizes.iter().position(|&s| s > 1) else {
            return self.at_leaf(&colors, path);
        };
        let members: Vec<usize> = (0..n).filter(|&x| colors[x] as usize == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &x in &members {
            if !explored.is_empty() && self.same_orbit(x, &explored, path) {
                continue;
            }
            explored.push(x);
            let mut child: Vec<u32> = colors
                .iter()
                .enumerate()
                .map(|(y, &c)| 2 * c + u32::from(c as usize == target && y != x))
                .collect();
            child = rank(&child);
            self.refine(&mut child);
            path.push(x);
            let r = self.search(child, path);
            path.pop();
            if let Some(level) = r {
                if level < path.len() {
                    return Some(level);
                }
            }
        }
        None
    }

    fn at_leaf(&mut self, colors: &[u32], path: &[usize]) -> Option<usize> {
        let perm: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
        let code = (self.leaf)(&perm);
        let Some((first_code, first_perm, first_path)) = &self.first else {
            self.first = Some((code.clone(), perm.clone(), path.to_vec()));
            self.best = Some((code, perm));
            return None;
        };
        if code == *first_code {
            let auto = compose_inverse(first_perm, &perm);
            let common = path
                .iter()
                .zip(first_path)
                .take_while(|(a, b)| a == b)
                .count();
            self.push_auto(auto);
            return Some(common);
        }
        let (best_code, best_perm) = self.best.as_ref().expect("set with first");
        match code.cmp(best_code) {
            std::cmp::Ordering::Less => self.best = Some((code, perm)),
            std::cmp::Ordering::Equal => {
                let auto = compose_inverse(best_perm, &perm);
                self.push_auto(auto);
            }
            std::cmp::Ordering::Greater => {}
        }
        None
    }

    fn push_auto(&mut self, auto: Vec<usize>) {
        if self.autos.len() < MAX_AUTOS && auto.iter().enumerate().any(|(i, &j)| i != j) {
            self.autos.push(auto);
        }
    }

    /// Whether `x` shares an orbit with an explored sibling under the stored
    /// automorphisms that fix `path` pointwise.
    fn same_orbit(&self, x: usize, explored: &[usize], path: &[usize]) -> bool {
        let mut uf: Vec<usize> = (0..self.n).collect();
        fn find(uf: &mut [usize], mut a: usize) -> usize {
            while uf[a] != a {
                uf[a] = uf[uf[a]];
                a = uf[a];
            }
            a
        }
        for g in &self.autos {
            if path.iter().all(|&p| g[p] == p) {
                for (i, &j) in g.iter().enumerate() {
                    let (ri, rj) = (find(&mut uf, i), find(&mut uf, j));
                    if ri != rj {
                        uf[ri] = rj;
                    }
                }
            }
        }
        let rx = find(&mut uf, x);
        explored.iter().any(|&e| find(&mut uf, e) == rx)
    }
}

/// `x ↦ p^{-1}(q(x))`: an automorphism when both labelings give the same code.
fn compose_inverse(p: &[usize], q: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (x, &i) in p.iter().enumerate() {
        inv[i] = x;
    }
    q.iter().map(|&i| inv[i]).collect()
}

/// Dense ranks of `keys` in sorted order.
fn rank<T: Ord + Clone>(keys: &[T]) -> Vec<u32> {
    let mut sorted: Vec<T> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("present") as u32)
        .collect()
}
