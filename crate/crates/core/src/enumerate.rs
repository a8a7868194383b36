//! Enumeration of finite lattices up to isomorphism.
//!
//! A lattice with at least two elements is a poset with a bottom and a top
//! adjoined, so we generate unlabeled posets of the middle elements by adding
//! one maximal element at a time, then keep the bounded extensions that are
//! lattices.

use std::collections::{BTreeMap, HashSet};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::lattice::{canonical_copy, poset_code, FinLattice, LatticeCode, Poset};

pub const DEFAULT_MAX_SIZE: usize = 7;

/// Hard ceiling: the middle-poset generation enumerates subsets by brute force.
const HARD_MAX_SIZE: usize = 10;

/// One lattice per isomorphism class with at most `k` elements, canonically
/// labeled and sorted by `(size, code)`.
pub fn enumerate_lattices_upto(k: usize) -> Result<Vec<FinLattice>> {
    enumerate_with_max(k, DEFAULT_MAX_SIZE)
}

pub fn enumerate_with_max(k: usize, max: usize) -> Result<Vec<FinLattice>> {
    let max = max.min(HARD_MAX_SIZE);
    if k > max {
        return Err(Error::BoundTooLarge { k, max });
    }
    Ok(enumerate_codes(k).into_values().collect())
}

/// Like [`enumerate_lattices_upto`] but keyed by code.
pub(crate) fn enumerate_codes(k: usize) -> BTreeMap<(usize, LatticeCode), FinLattice> {
    let mut out = BTreeMap::new();
    if k >= 1 {
        let (l, cf) = canonical_copy(&FinLattice::chain(1));
        out.insert((1, cf.code), l);
    }
    let levels = posets_up_to(k.saturating_sub(2));
    for (m, level) in levels.iter().enumerate() {
        if m + 2 > k {
            break;
        }
        for q in level {
            if let Some(l) = bounded_lattice(q) {
                let (l, cf) = canonical_copy(&l);
                out.insert((l.len(), cf.code), l);
            }
        }
    }
    out
}

/// Unlabeled posets of each size `0..=m`, one per isomorphism class.
pub fn posets_up_to(m: usize) -> Vec<Vec<Poset>> {
    let mut levels = vec![vec![Poset::antichain(0)]];
    for s in 1..=m {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for q in &levels[s - 1] {
            for d in downsets(q) {
                let p = add_maximal(q, &d);
                if seen.insert(poset_code(&p).0) {
                    next.push(p);
                }
            }
        }
        levels.push(next);
    }
    levels
}

fn downsets(q: &Poset) -> Vec<FixedBitSet> {
    let n = q.len();
    (0u64..1 << n)
        .filter_map(|mask| {
            let mut set = FixedBitSet::with_capacity(n);
            for i in (0..n).filter(|&i| mask >> i & 1 == 1) {
                set.insert(i);
            }
            q.is_downset(&set).then_some(set)
        })
        .collect()
}

/// `q` plus a new element (id `q.len()`) lying above exactly `below`.
fn add_maximal(q: &Poset, below: &FixedBitSet) -> Poset {
    let s = q.len() + 1;
    let x = q.len();
    let mut up: Vec<FixedBitSet> = (0..q.len())
        .map(|a| {
            let mut row = q.up(a).clone();
            row.grow(s);
            if below.contains(a) {
                row.insert(x);
            }
            row
        })
        .collect();
    let mut top = FixedBitSet::with_capacity(s);
    top.insert(x);
    up.push(top);
    Poset::from_up_rows(up)
}

/// Adjoins a bottom (id 0) and a top (last id) to `q`; a lattice or `None`.
fn bounded_lattice(q: &Poset) -> Option<FinLattice> {
    let m = q.len();
    let n = m + 2;
    let up: Vec<FixedBitSet> = (0..n)
        .map(|a| {
            let mut row = FixedBitSet::with_capacity(n);
            if a == 0 {
                row.insert_range(..);
            } else if a == n - 1 {
                row.insert(a);
            } else {
                for b in q.up(a - 1).ones() {
                    row.insert(b + 1);
                }
                row.insert(n - 1);
            }
            row
        })
        .collect();
    let p = Poset::from_up_rows(up);
    FinLattice::from_poset(&p).ok()
}
